use serde::{Deserialize, Serialize};

use super::GridMeasure;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};

/// Default number of cells of a reference grid.
pub const REFERENCE_CELLS: usize = 2000;

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 5] = ["gaussian", "quartic", "double_well", "product", "gaussian_2d"];

/// `∫ exp(-y⁴) dy = 2 Γ(5/4)`.
const QUARTIC_MASS: f64 = 1.812_804_954_110_954;

/// Location/scale parameters shared by the 1D entries, plus the factor list
/// of `product`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogParams {
    pub mean: f64,
    pub scale: f64,
    pub factors: Vec<String>,
}

impl Default for CatalogParams {
    fn default() -> Self {
        Self { mean: 0.0, scale: 1.0, factors: Vec::new() }
    }
}

impl CatalogParams {
    pub fn scaled(scale: f64) -> Self {
        Self { scale, ..Self::default() }
    }

    pub fn shifted(mean: f64) -> Self {
        Self { mean, ..Self::default() }
    }
}

/// A normalised reference potential `V`, so that `e^{-V}` is a probability
/// density on ℝ^dim.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    /// `V`, including the `log Z` shift.
    pub potential: ScalarField,
    pub gradient: VectorField,
    /// `V''` for one-dimensional entries.
    pub second_derivative: Option<ScalarField>,
    /// Uniform lower bound on the Hessian of `V`, when known.
    pub hessian_lower_bound: Option<f64>,
    /// `log Z` of the unnormalised potential.
    pub log_normalizer: f64,
    /// Truncation interval per coordinate; the tail mass outside is below 1e-10.
    pub support: Vec<(f64, f64)>,
}

impl CatalogEntry {
    pub fn density(&self, x: &[f64]) -> f64 {
        (-self.potential.eval(x)).exp()
    }

    pub fn density_1d(&self, x: f64) -> f64 {
        (-self.potential.eval_1d(x)).exp()
    }

    /// Drift `∇V` as a one-variable function.
    pub fn grad_1d(&self, x: f64) -> f64 {
        self.gradient.eval_1d(x)
    }

    /// The measure `e^{-V}` on its reference grid with `n_cells` cells.
    pub fn grid_measure(&self, n_cells: usize) -> Result<GridMeasure> {
        let (lo, hi) = self.support_1d()?;
        self.grid_measure_on(lo, hi, n_cells)
    }

    /// The measure `e^{-V}` sampled on an arbitrary 1D grid.
    pub fn grid_measure_on(&self, lo: f64, hi: f64, n_cells: usize) -> Result<GridMeasure> {
        self.support_1d()?;
        let v = self.potential.clone();
        GridMeasure::from_log_density(lo, hi, n_cells, move |x| -v.eval_1d(x))
    }

    pub fn support_1d(&self) -> Result<(f64, f64)> {
        if self.dim != 1 {
            return Err(Error::InvalidParameter(format!(
                "`{}` is {}-dimensional; a 1D entry is required",
                self.name, self.dim
            )));
        }
        Ok(self.support[0])
    }
}

/// Looks up a reference potential by name.
///
/// * `gaussian`: `V = (x−m)²/(2s²)`, Hessian bound `1/s²`.
/// * `quartic`: `V = ((x−m)/s)⁴`, Hessian bound 0.
/// * `double_well`: `V = y⁴/4 − y²/2` with `y = (x−m)/s`, Hessian bound `−1/s²`.
/// * `product`: independent 1D factors named in `params.factors`.
/// * `gaussian_2d`: the standard Gaussian on ℝ².
pub fn catalog(name: &str, params: &CatalogParams) -> Result<CatalogEntry> {
    let (m, s) = (params.mean, params.scale);
    if !(s > 0.0 && s.is_finite() && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("mean {m}, scale {s}")));
    }
    match name {
        "gaussian" => {
            let log_z = (s * (2.0 * std::f64::consts::PI).sqrt()).ln();
            Ok(one_dim(
                name,
                move |y| 0.5 * y * y,
                |y| y,
                |_| 1.0,
                Some(1.0),
                log_z,
                8.0,
                m,
                s,
            ))
        }
        "quartic" => {
            let log_z = (s * QUARTIC_MASS).ln();
            Ok(one_dim(
                name,
                |y| y.powi(4),
                |y| 4.0 * y.powi(3),
                |y| 12.0 * y * y,
                Some(0.0),
                log_z,
                3.0,
                m,
                s,
            ))
        }
        "double_well" => {
            let shape = |y: f64| 0.25 * y.powi(4) - 0.5 * y * y;
            let log_z = s.ln() + log_mass(shape, -6.0, 6.0, 24_000);
            Ok(one_dim(
                name,
                shape,
                |y| y.powi(3) - y,
                |y| 3.0 * y * y - 1.0,
                Some(-1.0),
                log_z,
                4.5,
                m,
                s,
            ))
        }
        "product" => product(params),
        "gaussian_2d" => {
            let log_z = (2.0 * std::f64::consts::PI).ln();
            let potential = ScalarField::new(2, move |x| 0.5 * (x[0] * x[0] + x[1] * x[1]) + log_z);
            Ok(CatalogEntry {
                name: name.into(),
                dim: 2,
                potential,
                gradient: VectorField::scaled_identity(2, 1.0),
                second_derivative: None,
                hessian_lower_bound: Some(1.0),
                log_normalizer: log_z,
                support: vec![(-8.0, 8.0); 2],
            })
        }
        other => Err(Error::UnknownCatalogEntry(other.into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn one_dim(
    name: &str,
    shape: impl Fn(f64) -> f64 + Send + Sync + 'static,
    shape_grad: impl Fn(f64) -> f64 + Send + Sync + 'static,
    shape_hess: impl Fn(f64) -> f64 + Send + Sync + 'static,
    shape_hess_bound: Option<f64>,
    log_z: f64,
    half_width: f64,
    m: f64,
    s: f64,
) -> CatalogEntry {
    let potential = ScalarField::from_1d(move |x| shape((x - m) / s) + log_z);
    let gradient = VectorField::from_1d(move |x| shape_grad((x - m) / s) / s);
    let second = ScalarField::from_1d(move |x| shape_hess((x - m) / s) / (s * s));
    CatalogEntry {
        name: name.into(),
        dim: 1,
        potential,
        gradient,
        second_derivative: Some(second),
        hessian_lower_bound: shape_hess_bound.map(|b| b / (s * s)),
        log_normalizer: log_z,
        support: vec![(m - half_width * s, m + half_width * s)],
    }
}

fn product(params: &CatalogParams) -> Result<CatalogEntry> {
    if params.factors.is_empty() {
        return Err(Error::InvalidParameter("product needs at least one factor".into()));
    }
    let factors = params
        .factors
        .iter()
        .map(|f| {
            let e = catalog(f, &CatalogParams::default())?;
            if e.dim != 1 {
                return Err(Error::InvalidParameter(format!("factor `{f}` is not 1D")));
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = factors.len();
    let pots: Vec<ScalarField> = factors.iter().map(|f| f.potential.clone()).collect();
    let grads: Vec<VectorField> = factors.iter().map(|f| f.gradient.clone()).collect();
    let potential = ScalarField::new(dim, move |x| pots.iter().zip(x).map(|(p, xi)| p.eval_1d(*xi)).sum());
    let gradient = VectorField::new(dim, move |x, out| {
        for ((o, g), xi) in out.iter_mut().zip(&grads).zip(x) {
            *o = g.eval_1d(*xi);
        }
    });
    let hessian_lower_bound = factors
        .iter()
        .map(|f| f.hessian_lower_bound)
        .try_fold(f64::INFINITY, |acc, b| b.map(|b| acc.min(b)));
    Ok(CatalogEntry {
        name: "product".into(),
        dim,
        potential,
        gradient,
        second_derivative: None,
        hessian_lower_bound,
        log_normalizer: factors.iter().map(|f| f.log_normalizer).sum(),
        support: factors.iter().map(|f| f.support[0]).collect(),
    })
}

/// `log ∫ e^{-shape}` by the midpoint rule with a log-sum-exp shift.
fn log_mass(shape: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let dx = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| -shape(lo + (i as f64 + 0.5) * dx)).collect();
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + (vals.iter().map(|v| (v - max).exp()).sum::<f64>() * dx).ln()
}

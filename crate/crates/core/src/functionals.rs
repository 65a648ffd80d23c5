//! The Hessian gap, the J functional, the Wasserstein dissipation and the
//! HWI / entropy-dissipation residuals.

use std::io::Write;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::measures::{fisher_information, log_density_gradient, relative_entropy, GridMeasure, ParticleCloud};
use crate::transport::{brenier_map_1d, w2_discrete, w2_exact_1d, MongeMap1D};

/// Densities below this are excluded from `∂ log μ`.
pub const LOG_DENSITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Brenier map on a 1D grid, all terms included.
    Exact1d,
    /// Discrete plan between clouds; the Hessian-gap term is dropped, so the
    /// value is a lower bound.
    ParticleNd,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact1d => "exact_1d",
            Method::ParticleNd => "particle_nd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalValue {
    pub value: f64,
    /// Pointwise minimum of the integrand.
    pub integrand_min: f64,
    pub method: Method,
}

/// `(√d − 1/√d)² = d + 1/d − 2`, the one-dimensional Hessian gap.
pub fn hessian_gap(d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::NotPositive(d));
    }
    let r = d.sqrt();
    Ok((r - 1.0 / r).powi(2))
}

/// Pointwise terms of the J integrand on the source grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JProfile {
    pub x: Vec<f64>,
    pub gap_term: Vec<f64>,
    pub drift_term: Vec<f64>,
}

impl JProfile {
    /// Writes `(x, gap_term, drift_term)` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::NumericalFailure(format!("csv: {e}"));
        w.write_record(["x", "gap_term", "drift_term"]).map_err(io)?;
        for ((x, g), d) in self.x.iter().zip(&self.gap_term).zip(&self.drift_term) {
            w.write_record([x.to_string(), g.to_string(), d.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::NumericalFailure(format!("csv: {e}")))?;
        Ok(())
    }
}

fn check_1d(a: &VectorField) -> Result<()> {
    if a.dim() != 1 {
        return Err(Error::InvalidParameter(format!("drift has dimension {}, expected 1", a.dim())));
    }
    Ok(())
}

/// J integrand for a map given by its values `t` and derivatives `tprime` at
/// the centres `x`.
pub fn j_profile(x: &[f64], t: &[f64], tprime: &[f64], a: &VectorField) -> Result<JProfile> {
    check_1d(a)?;
    let gap_term = tprime.iter().map(|d| hessian_gap(*d)).collect::<Result<Vec<_>>>()?;
    let drift_term = x
        .iter()
        .zip(t)
        .map(|(x, t)| (a.eval_1d(*t) - a.eval_1d(*x)) * (t - x))
        .collect();
    Ok(JProfile { x: x.to_vec(), gap_term, drift_term })
}

/// Integrates a J profile against `nu`.
fn integrate_profile(p: &JProfile, nu: &GridMeasure) -> FunctionalValue {
    let mut value = 0.0;
    let mut integrand_min = f64::INFINITY;
    for ((g, d), w) in p.gap_term.iter().zip(&p.drift_term).zip(nu.density()) {
        let f = g + d;
        value += f * w;
        integrand_min = integrand_min.min(f);
    }
    FunctionalValue { value: value * nu.dx(), integrand_min, method: Method::Exact1d }
}

/// `J(μ | (ν, A)) = ∫ [T′ + 1/T′ − 2 + (A(T) − A(x))(T − x)] dν` with `T` the
/// Brenier map pushing `ν` onto `μ`.
pub fn j_functional_1d(mu: &GridMeasure, nu: &GridMeasure, a: &VectorField) -> Result<FunctionalValue> {
    let map = brenier_map_1d(nu, mu)?;
    j_functional_of_map(&map, nu, a)
}

/// J for a precomputed map on the grid of `nu`.
pub fn j_functional_of_map(map: &MongeMap1D, nu: &GridMeasure, a: &VectorField) -> Result<FunctionalValue> {
    if !map.on_grid_of(nu) {
        return Err(Error::GridMismatch);
    }
    Ok(integrate_profile(&j_profile(&map.centers(), map.t(), map.tprime(), a)?, nu))
}

/// J for an analytic map `x ↦ t(x)` with derivative `tprime`, integrated on
/// the grid of `nu`.
pub fn j_functional_from_fn(
    nu: &GridMeasure,
    t: impl Fn(f64) -> f64,
    tprime: impl Fn(f64) -> f64,
    a: &VectorField,
) -> Result<FunctionalValue> {
    let x = nu.centers();
    let tv: Vec<f64> = x.iter().map(|v| t(*v)).collect();
    let tp: Vec<f64> = x.iter().map(|v| tprime(*v)).collect();
    Ok(integrate_profile(&j_profile(&x, &tv, &tp, a)?, nu))
}

/// The profile of [`j_functional_1d`] for plotting.
pub fn j_profile_1d(mu: &GridMeasure, nu: &GridMeasure, a: &VectorField) -> Result<JProfile> {
    let map = brenier_map_1d(nu, mu)?;
    j_profile(&map.centers(), map.t(), map.tprime(), a)
}

/// `∫ (x − ψ′(x)) (∂ log μ + A) dμ`, with `ψ′` the Brenier map pushing `μ`
/// onto `ν`. Cells with density below [`LOG_DENSITY_FLOOR`] are skipped.
pub fn dissipation_1d(mu: &GridMeasure, nu: &GridMeasure, a: &VectorField) -> Result<f64> {
    check_1d(a)?;
    let psi = brenier_map_1d(mu, nu)?;
    let grad = log_density_gradient(mu, LOG_DENSITY_FLOOR);
    let sum: f64 = mu
        .density()
        .iter()
        .zip(&grad)
        .zip(psi.t())
        .enumerate()
        .filter_map(|(i, ((m, g), s))| {
            let g = (*g)?;
            let x = mu.center(i);
            Some((x - s) * (g + a.eval_1d(x)) * m)
        })
        .sum();
    Ok(sum * mu.dx())
}

/// `W₂√I − (λ₁/2)W₂² − H`; nonnegative whenever `λ₁` bounds `∇²V` below.
pub fn hwi_gap(mu: &GridMeasure, nu: &GridMeasure, lambda1: f64) -> Result<f64> {
    let h = relative_entropy(mu, nu)?;
    let i = fisher_information(mu, nu)?;
    let w = w2_exact_1d(mu, nu);
    Ok(w * i.sqrt() - 0.5 * lambda1 * w * w - h)
}

/// `dissipation − H − (λ₁/2 + λ₂) W₂²`.
pub fn entropy_dissipation_gap(
    mu: &GridMeasure,
    nu: &GridMeasure,
    a: &VectorField,
    lambda1: f64,
    lambda2: f64,
) -> Result<f64> {
    let d = dissipation_1d(mu, nu, a)?;
    let h = relative_entropy(mu, nu)?;
    let w = w2_exact_1d(mu, nu);
    Ok(d - h - (0.5 * lambda1 + lambda2) * w * w)
}

/// Drift part of J between clouds, `Σ π(x, y) (A(y) − A(x))·(y − x)` over an
/// optimal discrete plan from `nu` to `mu`.
///
/// The Hessian-gap part is nonnegative and omitted, so for monotone `A` this
/// is a lower bound on J.
pub fn j_functional_nd(mu: &ParticleCloud, nu: &ParticleCloud, a: &VectorField) -> Result<FunctionalValue> {
    if a.dim() != nu.dim() || mu.dim() != nu.dim() {
        return Err(Error::InvalidParameter("drift and clouds disagree on dimension".into()));
    }
    let (_, plan) = w2_discrete(nu, mu)?;
    let mut value = 0.0;
    let mut integrand_min = f64::INFINITY;
    for e in &plan.entries {
        let f = a.monotonicity_product(nu.point(e.source), mu.point(e.target));
        value += e.weight * f;
        integrand_min = integrand_min.min(f);
    }
    Ok(FunctionalValue { value, integrand_min, method: Method::ParticleNd })
}

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::measures::CatalogEntry;

/// Drift `A = ∇V + F` of the Fokker-Planck equation `∂ₜμ = ∇·(∇μ + μA)`.
#[derive(Debug, Clone)]
pub struct DriftSpec {
    pub dim: usize,
    /// `V`, when known; the grid solver uses it for exact potential jumps.
    pub potential: Option<ScalarField>,
    pub grad_v: VectorField,
    /// Non-gradient perturbation `F`; `None` means `F = 0`.
    pub perturbation: Option<VectorField>,
    /// Lower bound on `∇²V`.
    pub lambda1: Option<f64>,
    /// Lower bound on the symmetric part of `∇F`.
    pub lambda2: Option<f64>,
}

impl DriftSpec {
    /// `A = ∇V` for a catalog potential.
    pub fn from_catalog(entry: &CatalogEntry) -> Self {
        Self {
            dim: entry.dim,
            potential: Some(entry.potential.clone()),
            grad_v: entry.gradient.clone(),
            perturbation: None,
            lambda1: entry.hessian_lower_bound,
            lambda2: Some(0.0),
        }
    }

    /// `A = ∇V` with `V` unknown; the grid solver integrates `A` instead.
    pub fn gradient(grad_v: VectorField, lambda1: Option<f64>) -> Self {
        Self { dim: grad_v.dim(), potential: None, grad_v, perturbation: None, lambda1, lambda2: Some(0.0) }
    }

    /// `A(x) = c x`, the Ornstein-Uhlenbeck drift of `V = c|x|²/2`.
    pub fn linear(dim: usize, c: f64) -> Self {
        Self {
            dim,
            potential: Some(ScalarField::new(dim, move |x| 0.5 * c * x.iter().map(|v| v * v).sum::<f64>())),
            grad_v: VectorField::scaled_identity(dim, c),
            perturbation: None,
            lambda1: Some(c),
            lambda2: Some(0.0),
        }
    }

    /// Adds a perturbation `F` whose symmetric gradient is bounded below by
    /// `lambda2`.
    pub fn with_perturbation(mut self, f: VectorField, lambda2: Option<f64>) -> Result<Self> {
        if f.dim() != self.dim {
            return Err(Error::InvalidParameter(format!("perturbation has dimension {}", f.dim())));
        }
        self.perturbation = Some(f);
        self.lambda2 = lambda2;
        Ok(self)
    }

    /// The full drift `A`.
    pub fn drift(&self) -> VectorField {
        match &self.perturbation {
            Some(f) => self.grad_v.add(f),
            None => self.grad_v.clone(),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        self.grad_v.eval(x, out);
        if let Some(f) = &self.perturbation {
            let mut tmp = [0.0; 8];
            f.eval(x, &mut tmp[..self.dim]);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
        }
    }

    #[inline]
    pub fn eval_1d(&self, x: f64) -> f64 {
        let mut out = [0.0];
        self.eval(&[x], &mut out);
        out[0]
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::InvalidParameter(format!("drift is {}-dimensional, state is {dim}-dimensional", self.dim)));
        }
        if dim > 8 {
            return Err(Error::InvalidParameter("at most 8 dimensions are supported".into()));
        }
        Ok(())
    }
}

/// `F = J ∇V` for an antisymmetric 2×2 matrix `J`. Since `tr(J ∇²V) = 0` and
/// `∇V·J∇V = 0`, the field satisfies `∇·(e^{-V} F) = 0`.
#[allow(non_snake_case)]
pub fn make_rotational_F(grad_v: &VectorField, jmat: [[f64; 2]; 2]) -> Result<VectorField> {
    if grad_v.dim() != 2 {
        return Err(Error::InvalidParameter("rotational perturbations are two-dimensional".into()));
    }
    let scale = jmat.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;
    if jmat[0][0].abs() > tol || jmat[1][1].abs() > tol || (jmat[0][1] + jmat[1][0]).abs() > tol {
        return Err(Error::NotAntisymmetric);
    }
    let g = grad_v.clone();
    Ok(VectorField::new(2, move |x, out| {
        let mut d = [0.0; 2];
        g.eval(x, &mut d);
        out[0] = jmat[0][0] * d[0] + jmat[0][1] * d[1];
        out[1] = jmat[1][0] * d[0] + jmat[1][1] * d[1];
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{catalog, CatalogParams};

    #[test]
    fn rotation_field() {
        let g = catalog("gaussian_2d", &CatalogParams::default()).unwrap();
        let f = make_rotational_F(&g.gradient, [[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert_eq!(f.eval_vec(&[0.3, -2.0]), vec![-2.0, -0.3]);
        let zero = make_rotational_F(&g.gradient, [[0.0; 2]; 2]).unwrap();
        assert_eq!(zero.eval_vec(&[1.0, 1.0]), vec![0.0, 0.0]);
        assert_eq!(make_rotational_F(&g.gradient, [[0.0, 1.0], [1.0, 0.0]]).unwrap_err(), Error::NotAntisymmetric);
    }

    #[test]
    fn perturbed_drift_adds_fields() {
        let d = DriftSpec::linear(2, 1.0)
            .with_perturbation(VectorField::linear(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]), Some(0.0))
            .unwrap();
        let mut out = [0.0; 2];
        d.eval(&[1.0, 2.0], &mut out);
        assert_eq!(out, [3.0, 1.0]);
        assert_eq!(d.drift().eval_vec(&[1.0, 2.0]), vec![3.0, 1.0]);
    }
}

//! Type-erased scalar and vector fields on ℝⁿ.

use std::fmt;
use std::sync::Arc;

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type VectorFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// A scalar field `ℝⁿ → ℝ`, cheap to clone.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    f: Arc<ScalarFn>,
}

impl ScalarField {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { dim, f: Arc::new(f) }
    }

    /// Wraps a function of one real variable.
    pub fn from_1d(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(1, move |x| f(x[0]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.f)(x)
    }

    #[inline]
    pub fn eval_1d(&self, x: f64) -> f64 {
        (self.f)(&[x])
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField(dim={})", self.dim)
    }
}

/// A vector field `ℝⁿ → ℝⁿ` evaluated into a caller-provided buffer.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    f: Arc<VectorFn>,
}

impl VectorField {
    pub fn new(dim: usize, f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        Self { dim, f: Arc::new(f) }
    }

    pub fn from_1d(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(1, move |x, out| out[0] = f(x[0]))
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, |_, out| out.iter_mut().for_each(|o| *o = 0.0))
    }

    /// `x ↦ M x` for a row-major square matrix.
    pub fn linear(matrix: Vec<Vec<f64>>) -> Self {
        let dim = matrix.len();
        Self::new(dim, move |x, out| {
            for (o, row) in out.iter_mut().zip(&matrix) {
                *o = row.iter().zip(x).map(|(m, xi)| m * xi).sum();
            }
        })
    }

    /// `x ↦ c x`.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        Self::new(dim, move |x, out| {
            for (o, xi) in out.iter_mut().zip(x) {
                *o = c * xi;
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        (self.f)(x, out)
    }

    pub fn eval_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval(x, &mut out);
        out
    }

    #[inline]
    pub fn eval_1d(&self, x: f64) -> f64 {
        let mut out = [0.0];
        (self.f)(&[x], &mut out);
        out[0]
    }

    /// Pointwise sum of two fields of the same dimension.
    pub fn add(&self, other: &VectorField) -> VectorField {
        assert_eq!(self.dim, other.dim, "field dimensions differ");
        let (a, b) = (self.clone(), other.clone());
        let dim = self.dim;
        VectorField::new(dim, move |x, out| {
            a.eval(x, out);
            let mut tmp = [0.0; 8];
            if dim <= tmp.len() {
                b.eval(x, &mut tmp[..dim]);
                out.iter_mut().zip(&tmp[..dim]).for_each(|(o, t)| *o += t);
            } else {
                let extra = b.eval_vec(x);
                out.iter_mut().zip(extra).for_each(|(o, t)| *o += t);
            }
        })
    }

    /// `(A(y) − A(x))·(y − x)`.
    pub fn monotonicity_product(&self, x: &[f64], y: &[f64]) -> f64 {
        let ax = self.eval_vec(x);
        let ay = self.eval_vec(y);
        ax.iter()
            .zip(&ay)
            .zip(x.iter().zip(y))
            .map(|((a, b), (xi, yi))| (b - a) * (yi - xi))
            .sum()
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField(dim={})", self.dim)
    }
}

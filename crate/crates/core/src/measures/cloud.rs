use crate::error::{Error, Result};

/// Tolerance on the total weight of a particle cloud.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// A weighted point set in ℝⁿ, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ParticleCloud {
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if points.len() != dim * weights.len() || weights.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not describe {} points in dimension {dim}",
                points.len(),
                weights.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("non-finite point".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidDensity("negative weight".into()));
        }
        let total = compensated_sum(&weights);
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidDensity(format!("weights sum to {total}")));
        }
        Ok(Self { dim, points, weights })
    }

    /// Equal weights on the given points.
    pub fn uniform(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 || !points.len().is_multiple_of(dim) || points.is_empty() {
            return Err(Error::InvalidParameter("ragged point array".into()));
        }
        let n = points.len() / dim;
        Self::new(dim, points, vec![1.0 / n as f64; n])
    }

    /// Equal weights on scalar points.
    pub fn uniform_1d(points: Vec<f64>) -> Result<Self> {
        Self::uniform(1, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn expect(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (p, w) in self.iter() {
            m.iter_mut().zip(p).for_each(|(mi, pi)| *mi += w * pi);
        }
        m
    }

    /// Returns a cloud with the same weights and every point shifted by `v`.
    pub fn translated(&self, v: &[f64]) -> Self {
        assert_eq!(v.len(), self.dim);
        let points = self
            .points
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(v).map(|(a, b)| a + b))
            .collect();
        Self { dim: self.dim, points, weights: self.weights.clone() }
    }

    /// Replaces the point coordinates, keeping weights; used by the
    /// integrators.
    pub(crate) fn with_points(&self, points: Vec<f64>) -> Self {
        debug_assert_eq!(points.len(), self.points.len());
        Self { dim: self.dim, points, weights: self.weights.clone() }
    }
}

/// Neumaier summation; plain summation of `n` copies of `1/n` drifts by
/// about `n` ulps, which exceeds the weight tolerance for large clouds.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

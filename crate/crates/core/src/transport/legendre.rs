//! Discrete Legendre transform of convex sampled functions.

use crate::error::{Error, Result};

/// A function sampled at strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if x.len() != values.len() || x.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "{} abscissae for {} values",
                x.len(),
                values.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("abscissae must increase strictly".into()));
        }
        Ok(Self { x, values })
    }

    /// Samples `f` on `n` equally spaced points of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("need at least 2 samples".into()));
        }
        let x: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let values = x.iter().map(|&v| f(v)).collect();
        Self::new(x, values)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Piecewise-linear interpolation, constant beyond the ends.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.values[0];
        }
        if t >= self.x[n - 1] {
            return self.values[n - 1];
        }
        let k = self.x.partition_point(|v| *v <= t) - 1;
        let s = (t - self.x[k]) / (self.x[k + 1] - self.x[k]);
        self.values[k] + s * (self.values[k + 1] - self.values[k])
    }

    /// Chord slopes between consecutive samples.
    pub fn slopes(&self) -> Vec<f64> {
        self.x
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, f)| (f[1] - f[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Checks that the samples form a convex sequence: every discrete second
    /// difference is at least `-1e-10` (relative to the local magnitude).
    pub fn check_convex(&self) -> Result<()> {
        let s = self.slopes();
        for k in 1..s.len() {
            let second = (s[k] - s[k - 1]) * 0.5 * (self.x[k + 1] - self.x[k - 1]);
            let scale = 1f64.max(self.values[k].abs()).max(self.values[k - 1].abs()).max(self.values[k + 1].abs());
            if second < -1e-10 * scale {
                return Err(Error::NotConvex { index: k, second_difference: second });
            }
        }
        Ok(())
    }
}

/// `φ*(q) = max_k (q·x_k − φ(x_k))` on a uniform dual grid spanning the
/// range of chord slopes of `φ`, with as many points as the primal grid.
pub fn legendre(phi: &SampledFunction) -> Result<SampledFunction> {
    phi.check_convex()?;
    let s = phi.slopes();
    let (lo, hi) = (s[0], s[s.len() - 1]);
    let n = phi.len();
    let q: Vec<f64> = if hi > lo {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    } else {
        // affine input: the conjugate is finite at a single slope only
        vec![lo - 0.5, lo, lo + 0.5]
    };
    legendre_onto(phi, &q)
}

/// The discrete conjugate evaluated on the given increasing dual points.
///
/// For convex input the maximiser index is nondecreasing in `q`, so one pass
/// with two pointers costs `O(n + m)`.
pub fn legendre_onto(phi: &SampledFunction, q: &[f64]) -> Result<SampledFunction> {
    phi.check_convex()?;
    if q.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("dual grid must increase strictly".into()));
    }
    let slopes = phi.slopes();
    let mut k = 0;
    let values = q
        .iter()
        .map(|&qi| {
            // vertex k maximises q·x − φ while the slope after it is below q
            while k < slopes.len() && slopes[k] < qi {
                k += 1;
            }
            qi * phi.x[k] - phi.values[k]
        })
        .collect();
    SampledFunction::new(q.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(a: &SampledFunction, f: impl Fn(f64) -> f64, keep: impl Fn(f64) -> bool) -> f64 {
        a.x.iter()
            .zip(&a.values)
            .filter(|(x, _)| keep(**x))
            .map(|(x, v)| (v - f(*x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn half_square_is_self_dual() {
        let phi = SampledFunction::from_fn(-5.0, 5.0, 2001, |x| 0.5 * x * x).unwrap();
        let dual = legendre(&phi).unwrap();
        assert!(max_err(&dual, |q| 0.5 * q * q, |_| true) < 1e-5);
    }

    #[test]
    fn linear_shift_moves_the_conjugate() {
        let b = 0.7;
        let phi = SampledFunction::from_fn(-5.0, 5.0, 2001, |x| 0.5 * x * x + b * x).unwrap();
        let dual = legendre(&phi).unwrap();
        assert!(max_err(&dual, |q| 0.5 * (q - b).powi(2), |_| true) < 1e-5);
    }

    #[test]
    fn quartic_conjugate() {
        let phi = SampledFunction::from_fn(-2.0, 2.0, 4001, |x| 0.25 * x.powi(4)).unwrap();
        let q: Vec<f64> = (0..801).map(|i| -7.5 + 15.0 * i as f64 / 800.0).collect();
        let dual = legendre_onto(&phi, &q).unwrap();
        assert!(max_err(&dual, |q| 0.75 * q.abs().powf(4.0 / 3.0), |_| true) < 1e-4);
    }

    #[test]
    fn double_conjugate_recovers_the_interior() {
        let phi = SampledFunction::from_fn(-3.0, 3.0, 1201, |x| x.cosh()).unwrap();
        let back = legendre(&legendre(&phi).unwrap()).unwrap();
        let interior = SampledFunction::new(back.x.clone(), back.values.clone()).unwrap();
        assert!(max_err(&interior, |x| x.cosh(), |x| x.abs() < 2.5) < 1e-3);
    }

    #[test]
    fn conjugate_is_convex() {
        let phi = SampledFunction::from_fn(-3.0, 3.0, 301, |x| x.abs().powf(1.5)).unwrap();
        legendre(&phi).unwrap().check_convex().unwrap();
    }

    #[test]
    fn non_convex_input_is_rejected() {
        let phi = SampledFunction::from_fn(-2.0, 2.0, 101, |x| -x * x).unwrap();
        assert!(matches!(legendre(&phi), Err(Error::NotConvex { .. })));
    }
}

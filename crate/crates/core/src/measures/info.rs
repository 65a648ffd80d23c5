//! Relative entropy, relative Fisher information and log-density gradients.

use super::GridMeasure;
use crate::error::{Error, Result};

/// Lower clamp on density ratios before taking logarithms.
pub const RATIO_FLOOR: f64 = 1e-300;

/// `H(μ|ν) = ∫ h log h dν` with `h = dμ/dν`.
pub fn relative_entropy(mu: &GridMeasure, nu: &GridMeasure) -> Result<f64> {
    check_pair(mu, nu)?;
    let h: f64 = mu
        .density()
        .iter()
        .zip(nu.density())
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, n)| m * (m / n).max(RATIO_FLOOR).ln())
        .sum();
    Ok((h * mu.dx()).max(0.0))
}

/// `I(μ|ν) = ∫ |∇h|²/h dν = ∫ |∇ log h|² dμ`, with the derivative of
/// `log h` taken by central differences (one-sided at the ends).
pub fn fisher_information(mu: &GridMeasure, nu: &GridMeasure) -> Result<f64> {
    check_pair(mu, nu)?;
    let log_h: Vec<Option<f64>> = mu
        .density()
        .iter()
        .zip(nu.density())
        .map(|(m, n)| (*m > 0.0).then(|| (m / n).max(RATIO_FLOOR).ln()))
        .collect();
    let grad = differentiate(&log_h, mu.dx());
    let sum: f64 = mu
        .density()
        .iter()
        .zip(&grad)
        .filter_map(|(m, g)| g.map(|g| m * g * g))
        .sum();
    Ok(sum * mu.dx())
}

/// Derivative of `log μ` at the cell centres; `None` where the density is
/// below `floor`.
pub fn log_density_gradient(mu: &GridMeasure, floor: f64) -> Vec<Option<f64>> {
    let logs: Vec<Option<f64>> = mu.density().iter().map(|d| (*d >= floor && *d > 0.0).then(|| d.ln())).collect();
    differentiate(&logs, mu.dx())
}

/// Central differences on a sequence with holes; falls back to one-sided
/// differences next to a hole or an end.
pub(crate) fn differentiate(values: &[Option<f64>], dx: f64) -> Vec<Option<f64>> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let here = values[i]?;
            let left = if i > 0 { values[i - 1] } else { None };
            let right = if i + 1 < n { values[i + 1] } else { None };
            match (left, right) {
                (Some(l), Some(r)) => Some((r - l) / (2.0 * dx)),
                (None, Some(r)) => Some((r - here) / dx),
                (Some(l), None) => Some((here - l) / dx),
                (None, None) => None,
            }
        })
        .collect()
}

fn check_pair(mu: &GridMeasure, nu: &GridMeasure) -> Result<()> {
    if !mu.same_grid(nu) {
        return Err(Error::GridMismatch);
    }
    if let Some(index) = mu
        .density()
        .iter()
        .zip(nu.density())
        .position(|(m, n)| *m > 0.0 && *n <= 0.0)
    {
        return Err(Error::SingularDensity { index });
    }
    Ok(())
}

use crate::error::{Error, Result};

/// R² below which a decay profile is flagged as non-exponential.
pub const EXPONENTIAL_R2: f64 = 0.98;

/// Least-squares fit `log w ≈ intercept − rate · t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `r_squared ≥ 0.98`.
    pub exponential: bool,
}

/// Fits an exponential decay rate to a positive series.
pub fn decay_rate_fit(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::InvalidSeries(format!("{} times for {} values", times.len(), values.len())));
    }
    if values.len() < 5 {
        return Err(Error::InvalidSeries(format!("need at least 5 samples, got {}", values.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidSeries(format!("nonpositive value {v}")));
    }
    let n = times.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mt = times.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let stt: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    if !(stt > 0.0) {
        return Err(Error::InvalidSeries("times do not vary".into()));
    }
    let stl: f64 = times.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    let sll: f64 = logs.iter().map(|l| (l - ml).powi(2)).sum();
    let slope = stl / stt;
    let intercept = ml - slope * mt;
    let r_squared = if sll > 0.0 { stl * stl / (stt * sll) } else { 1.0 };
    Ok(DecayFit { rate: -slope, intercept, r_squared, exponential: r_squared >= EXPONENTIAL_R2 })
}

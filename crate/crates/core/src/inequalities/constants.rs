//! Constants obtained by closed-form arithmetic from other constants.

use super::report::ConstantReport;
use crate::error::{Error, Result};

/// WJ constant `(c + λ₁ + 2λ₂)/2` from a WH(c) inequality, `∇²V ≥ λ₁` and
/// `∇ˢF ≥ λ₂`; valid when `c > −λ₁ − 2λ₂`.
pub fn derived_agswh(c: f64, lambda1: f64, lambda2: f64) -> ConstantReport {
    let value = 0.5 * (c + lambda1 + 2.0 * lambda2);
    let valid = c > -lambda1 - 2.0 * lambda2;
    let reason = if valid {
        "c > -lambda1 - 2 lambda2".to_string()
    } else {
        format!("requires c > {}", -lambda1 - 2.0 * lambda2)
    };
    ConstantReport::derived("WJ", value, valid, reason, &[("c", c), ("lambda1", lambda1), ("lambda2", lambda2)])
}

/// WJ constant `Ce^{−2K} + β + α(1 − e^{−2K})` after a bounded density
/// perturbation `|T| ≤ K` and a drift perturbation with monotonicity `β`;
/// valid when `−βe^{2K} − α(e^{2K} − 1) < C` and `α ≤ 0`.
pub fn derived_perturbation(c: f64, alpha: f64, beta: f64, k: f64) -> Result<ConstantReport> {
    if !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("K must be nonnegative, got {k}")));
    }
    let e = (2.0 * k).exp();
    let value = c / e + beta + alpha * (1.0 - 1.0 / e);
    let threshold = -beta * e - alpha * (e - 1.0);
    let reason = if alpha > 0.0 {
        "requires alpha <= 0".to_string()
    } else if threshold < c {
        "-beta e^{2K} - alpha (e^{2K} - 1) < C".to_string()
    } else {
        format!("requires C > {threshold}")
    };
    Ok(ConstantReport::derived(
        "WJ",
        value,
        alpha <= 0.0 && threshold < c,
        reason,
        &[("C", c), ("alpha", alpha), ("beta", beta), ("K", k)],
    ))
}

/// WJ constant `min_i Cᵢ` of a product measure with a diagonal drift.
pub fn derived_tensorization(constants: &[f64]) -> Result<ConstantReport> {
    if constants.is_empty() {
        return Err(Error::InvalidParameter("no factor constants".into()));
    }
    if let Some(c) = constants.iter().find(|c| !(**c > 0.0)) {
        return Err(Error::InvalidParameter(format!("factor constant {c} is not positive")));
    }
    let value = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    let inputs: Vec<(String, f64)> = constants.iter().enumerate().map(|(i, c)| (format!("C{}", i + 1), *c)).collect();
    let mut r = ConstantReport::derived("WJ", value, true, "minimum over factors", &[]);
    r.inputs = inputs;
    Ok(r)
}

/// Log-Sobolev constant `C(1 + ρ₋/(2C))^{−2}` from WJ(C) and `∇²V ≥ ρ`.
pub fn derived_lsi(c: f64, rho: f64) -> Result<ConstantReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    let rho_minus = (-rho).max(0.0);
    let value = c / (1.0 + rho_minus / (2.0 * c)).powi(2);
    Ok(ConstantReport::derived("LSI", value, true, "WJ(C) with Hessian bound rho", &[("C", c), ("rho", rho)]))
}

/// The alternative log-Sobolev constant `C(2 − ρ/C)^{−1}`, available when
/// `C ≥ max(ρ, 0)`.
pub fn alternative_lsi(c: f64, rho: f64) -> Result<ConstantReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    let valid = c >= rho.max(0.0);
    let reason = if valid { "C >= max(rho, 0)" } else { "requires C >= max(rho, 0)" };
    Ok(ConstantReport::derived("LSI", c / (2.0 - rho / c), valid, reason, &[("C", c), ("rho", rho)]))
}

/// `sup_{x>0} (1 − e^{−x})²/x`, by golden-section search.
pub fn decay_to_wh_factor() -> f64 {
    let g = |x: f64| (-x).exp_m1().powi(2) / x;
    let (mut a, mut b) = (0.1f64, 5.0f64);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    g(0.5 * (a + b))
}

/// WH constant `2C · sup_{x>0}(1 − e^{−x})²/x ≈ 0.8145 C` implied by a
/// uniform Wasserstein decay at rate `C`.
pub fn derived_wh_from_decay(c: f64) -> Result<ConstantReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be positive, got {c}")));
    }
    Ok(ConstantReport::derived("WH", 2.0 * c * decay_to_wh_factor(), true, "uniform W2 decay at rate C", &[("C", c)]))
}

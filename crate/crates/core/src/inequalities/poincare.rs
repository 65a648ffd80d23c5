//! Spectral gap of the weighted Dirichlet form on a 1D grid.

use super::report::ConstantReport;
use crate::error::{Error, Result};
use crate::measures::GridMeasure;

/// Largest admissible `C` in `Var_ν(f) ≤ (1/C) ∫ |f′|² dν`.
///
/// With `f` sampled at cell centres, face weights `√(νᵢνᵢ₊₁)` and the
/// substitution `g = √ν f`, the Dirichlet form becomes the symmetric
/// tridiagonal matrix with off-diagonal `−1/dx²` and diagonal
/// `(√(νᵢ₋₁/νᵢ) + √(νᵢ₊₁/νᵢ))/dx²` (Neumann ends). Its kernel is `√ν`; the
/// constant is the second-smallest eigenvalue, located by Sturm bisection.
pub fn poincare_constant_1d(nu: &GridMeasure) -> Result<ConstantReport> {
    let (diag, off) = dirichlet_matrix(nu)?;
    let value = spectral_gap(&diag, off)?;
    Ok(ConstantReport::estimated("Poincare", value, format!("tridiagonal eigensolve on {} cells", diag.len())))
}

/// The spectral gap together with its eigenfunction `f` at the cell centres,
/// normalised by `∫ f dν = 0`, `∫ f² dν = 1` and `∫ x f dν > 0`.
pub fn poincare_eigenfunction_1d(nu: &GridMeasure) -> Result<(f64, Vec<f64>)> {
    let (diag, off) = dirichlet_matrix(nu)?;
    let lambda = spectral_gap(&diag, off)?;
    let n = diag.len();
    let d = nu.density();
    // inverse iteration with a shift just below the eigenvalue
    let shift = lambda - 1e-9 * lambda.max(1.0);
    let mut g: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64 - 0.5).collect();
    for _ in 0..4 {
        g = solve_shifted(&diag, off, shift, &g)?;
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NumericalFailure("inverse iteration broke down".into()));
        }
        g.iter_mut().for_each(|v| *v /= norm);
    }
    let dx = nu.dx();
    let mut f: Vec<f64> = g.iter().zip(d).map(|(g, d)| g / d.sqrt()).collect();
    let mean = f.iter().zip(d).map(|(v, d)| v * d).sum::<f64>() * dx;
    f.iter_mut().for_each(|v| *v -= mean);
    let var: f64 = f.iter().zip(d).map(|(v, d)| v * v * d).sum::<f64>() * dx;
    let sign = if (0..n).map(|i| nu.center(i) * f[i] * d[i]).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let scale = sign / var.sqrt();
    f.iter_mut().for_each(|v| *v *= scale);
    Ok((lambda, f))
}

/// Symmetrised Dirichlet form: diagonal and (negated) constant off-diagonal.
fn dirichlet_matrix(nu: &GridMeasure) -> Result<(Vec<f64>, f64)> {
    let d = nu.density();
    if let Some(index) = d.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::SingularDensity { index });
    }
    let n = d.len();
    if n < 3 {
        return Err(Error::InvalidParameter("need at least 3 cells".into()));
    }
    let h2 = nu.dx() * nu.dx();
    let diag = (0..n)
        .map(|i| {
            let left = if i > 0 { (d[i - 1] / d[i]).sqrt() } else { 0.0 };
            let right = if i + 1 < n { (d[i + 1] / d[i]).sqrt() } else { 0.0 };
            (left + right) / h2
        })
        .collect();
    Ok((diag, 1.0 / h2))
}

fn spectral_gap(diag: &[f64], off: f64) -> Result<f64> {
    let value = kth_eigenvalue(diag, off, 1)?;
    if !(value > 0.0) {
        return Err(Error::NumericalFailure(format!("spectral gap {value} is not positive")));
    }
    Ok(value)
}

/// Solves `(M − σ)y = b` by the Thomas algorithm.
fn solve_shifted(diag: &[f64], off: f64, sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut denom = diag[0] - sigma;
    for i in 0..n {
        if i > 0 {
            denom = diag[i] - sigma + off * c[i - 1];
        }
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::NumericalFailure(format!("zero pivot at row {i}")));
        }
        c[i] = -off / denom;
        y[i] = (b[i] + if i > 0 { off * y[i - 1] } else { 0.0 }) / denom;
    }
    for i in (0..n - 1).rev() {
        y[i] -= c[i] * y[i + 1];
    }
    Ok(y)
}

/// Number of eigenvalues below `x` of the tridiagonal matrix with diagonal
/// `diag` and constant off-diagonal `-off`.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut q = 1.0;
    for (i, a) in diag.iter().enumerate() {
        q = if i == 0 { a - x } else { a - x - off2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (a.abs() + off);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based).
fn kth_eigenvalue(diag: &[f64], off: f64, k: usize) -> Result<f64> {
    let mut lo = diag.iter().fold(f64::INFINITY, |m, a| m.min(a - 2.0 * off));
    let mut hi = diag.iter().fold(f64::NEG_INFINITY, |m, a| m.max(a + 2.0 * off));
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NumericalFailure("non-finite matrix entries".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

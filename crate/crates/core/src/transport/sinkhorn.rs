//! Entropic optimal transport by log-domain Sinkhorn iterations.

use rayon::prelude::*;

use super::simplex::squared_distances;
use crate::error::{Error, Result};
use crate::measures::ParticleCloud;

/// Stopping threshold on the largest marginal violation.
pub const SINKHORN_TOLERANCE: f64 = 1e-8;

/// Iteration cap at the target `epsilon`.
pub const SINKHORN_MAX_ITER: usize = 100_000;

/// Outcome of an entropic solve at a given `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornResult {
    pub epsilon: f64,
    /// Transport cost `⟨π_ε, C⟩` of the entropic plan.
    pub cost: f64,
    /// `⟨π_ε, C⟩ + ε·KL(π_ε | a⊗b)`.
    pub regularized: f64,
    /// `Σ aᵢ gᶜᵢ + Σ bⱼ gⱼ`, a certified lower bound on the exact `W₂²`.
    pub dual_lower_bound: f64,
    pub iterations: usize,
    pub marginal_error: f64,
}

/// Entropic `W₂²` between two clouds with `ε`-scaling from the cost scale
/// down to `epsilon`, warm-starting each stage from the previous potentials.
pub fn sinkhorn_w2(a: &ParticleCloud, b: &ParticleCloud, epsilon: f64) -> Result<SinkhornResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if a.dim() != b.dim() {
        return Err(Error::InvalidParameter(format!("dimensions {} and {}", a.dim(), b.dim())));
    }
    let cost = squared_distances(a, b);
    let mut s = Solver::new(a.weights(), b.weights(), &cost);
    let mut eps = cost.iter().cloned().fold(0.0, f64::max).max(epsilon);
    let mut total_iter = 0;
    while eps > epsilon {
        total_iter += s.iterate(eps, 1e-5, SINKHORN_MAX_ITER).unwrap_or_else(|(it, _)| it);
        eps = (eps * 0.5).max(epsilon);
    }
    let iterations = s
        .iterate(epsilon, SINKHORN_TOLERANCE, SINKHORN_MAX_ITER)
        .map_err(|(iterations, residual)| Error::NoConvergence { iterations, residual })?;
    Ok(s.result(epsilon, total_iter + iterations))
}

struct Solver<'a> {
    m: usize,
    n: usize,
    log_a: Vec<f64>,
    log_b: Vec<f64>,
    a: &'a [f64],
    b: &'a [f64],
    cost: &'a [f64],
    f: Vec<f64>,
    g: Vec<f64>,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl<'a> Solver<'a> {
    fn new(a: &'a [f64], b: &'a [f64], cost: &'a [f64]) -> Self {
        let ln = |w: &f64| if *w > 0.0 { w.ln() } else { f64::NEG_INFINITY };
        Self {
            m: a.len(),
            n: b.len(),
            log_a: a.iter().map(ln).collect(),
            log_b: b.iter().map(ln).collect(),
            a,
            b,
            cost,
            f: vec![0.0; a.len()],
            g: vec![0.0; b.len()],
        }
    }

    /// `log π_ij = log aᵢ + log bⱼ + (fᵢ + gⱼ − Cᵢⱼ)/ε`.
    #[inline]
    fn log_plan(&self, i: usize, j: usize, eps: f64) -> f64 {
        self.log_a[i] + self.log_b[j] + (self.f[i] + self.g[j] - self.cost[i * self.n + j]) / eps
    }

    fn update_f(&mut self, eps: f64) {
        let (n, cost, g, log_b) = (self.n, self.cost, &self.g, &self.log_b);
        self.f.par_iter_mut().enumerate().for_each(|(i, fi)| {
            let row = &cost[i * n..(i + 1) * n];
            *fi = -eps * log_sum_exp((0..n).map(|j| log_b[j] + (g[j] - row[j]) / eps));
        });
    }

    fn update_g(&mut self, eps: f64) {
        let (m, n, cost, f, log_a) = (self.m, self.n, self.cost, &self.f, &self.log_a);
        self.g.par_iter_mut().enumerate().for_each(|(j, gj)| {
            *gj = -eps * log_sum_exp((0..m).map(|i| log_a[i] + (f[i] - cost[i * n + j]) / eps));
        });
    }

    /// Largest violation of either marginal.
    fn marginal_error(&self, eps: f64) -> f64 {
        let rows = (0..self.m)
            .into_par_iter()
            .map(|i| {
                let r: f64 = (0..self.n).map(|j| self.log_plan(i, j, eps).exp()).sum();
                (r - self.a[i]).abs()
            })
            .reduce(|| 0.0, f64::max);
        let cols = (0..self.n)
            .into_par_iter()
            .map(|j| {
                let c: f64 = (0..self.m).map(|i| self.log_plan(i, j, eps).exp()).sum();
                (c - self.b[j]).abs()
            })
            .reduce(|| 0.0, f64::max);
        rows.max(cols)
    }

    /// Alternating updates until the marginal error drops below `tol`.
    /// On failure returns the iteration count and the last residual.
    fn iterate(&mut self, eps: f64, tol: f64, cap: usize) -> Result<usize, (usize, f64)> {
        let mut residual = f64::INFINITY;
        for it in 1..=cap {
            self.update_f(eps);
            self.update_g(eps);
            if it % 10 == 0 || it == 1 {
                residual = self.marginal_error(eps);
                if residual < tol {
                    return Ok(it);
                }
            }
        }
        Err((cap, residual))
    }

    fn result(&self, eps: f64, iterations: usize) -> SinkhornResult {
        let (m, n) = (self.m, self.n);
        let (cost, kl) = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut c = 0.0;
                let mut k = 0.0;
                for j in 0..n {
                    let lp = self.log_plan(i, j, eps);
                    let p = lp.exp();
                    if p > 0.0 {
                        c += p * self.cost[i * n + j];
                        k += p * (lp - self.log_a[i] - self.log_b[j]);
                    }
                }
                (c, k)
            })
            .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
        // c-transform of g gives a feasible dual pair
        let g_c: f64 = (0..m)
            .map(|i| {
                let row = &self.cost[i * n..(i + 1) * n];
                self.a[i] * (0..n).map(|j| row[j] - self.g[j]).fold(f64::INFINITY, f64::min)
            })
            .sum();
        let dual = g_c + self.b.iter().zip(&self.g).map(|(b, g)| b * g).sum::<f64>();
        SinkhornResult {
            epsilon: eps,
            cost,
            regularized: cost + eps * kl.max(0.0),
            dual_lower_bound: dual,
            iterations,
            marginal_error: self.marginal_error(eps),
        }
    }
}

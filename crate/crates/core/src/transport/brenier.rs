//! Monotone (Brenier) transport maps between 1D grid measures.

use std::io::Write;

use super::legendre::{legendre_onto, SampledFunction};
use super::quantile::QuantileFunction;
use crate::error::{Error, Result};
use crate::measures::GridMeasure;

/// Bounded test functions used to check `T#ν = μ`.
pub const PUSHFORWARD_BATTERY: [fn(f64) -> f64; 10] = [
    |x| x.sin(),
    |x| x.cos(),
    |x| (2.0 * x).sin(),
    |x| (0.5 * x).cos(),
    |x| x.tanh(),
    |x| (x - 1.0).tanh(),
    |x| (-x * x).exp(),
    |x| (-(x - 1.5).powi(2)).exp(),
    |x| 1.0 / (1.0 + x * x),
    |x| 1.0 / (1.0 + (-2.0 * x).exp()),
];

/// Nondecreasing map `T = F_μ⁻¹ ∘ F_ν` sampled at the cell centres of the
/// source grid, with its derivative from the 1D Monge–Ampère relation
/// `T′(x) = ν(x)/μ(T(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeMap1D {
    lo: f64,
    hi: f64,
    t: Vec<f64>,
    tprime: Vec<f64>,
    /// `T` at the `n + 1` cell edges.
    t_edges: Vec<f64>,
}

/// The Brenier map pushing `nu` onto `mu`.
pub fn brenier_map_1d(nu: &GridMeasure, mu: &GridMeasure) -> Result<MongeMap1D> {
    if let Some(index) = mu.density().iter().position(|d| *d <= 0.0) {
        return Err(Error::SingularDensity { index });
    }
    if let Some(index) = nu.density().iter().position(|d| *d <= 0.0) {
        return Err(Error::SingularDensity { index });
    }
    let q = QuantileFunction::of_grid(mu);
    let masses = nu.cell_masses();
    let total: f64 = masses.iter().sum();
    let n = masses.len();

    // mass strictly left and strictly right of each centre, accumulated from
    // the nearer end
    let mut left = vec![0.0; n];
    let mut acc = 0.0;
    for i in 0..n {
        left[i] = (acc + 0.5 * masses[i]) / total;
        acc += masses[i];
    }
    let mut right = vec![0.0; n];
    acc = 0.0;
    for i in (0..n).rev() {
        right[i] = (acc + 0.5 * masses[i]) / total;
        acc += masses[i];
    }
    let t: Vec<f64> = (0..n)
        .map(|i| if left[i] <= 0.5 { q.lower_quantile(left[i]) } else { q.upper_quantile(right[i]) })
        .collect();
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + masses[i];
    }
    let mut below = 0.0;
    let mut t_edges = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let l = below / total;
        t_edges.push(if l <= 0.5 { q.lower_quantile(l) } else { q.upper_quantile(suffix[i] / total) });
        if i < n {
            below += masses[i];
        }
    }
    let tprime: Vec<f64> = nu
        .density()
        .iter()
        .zip(&t)
        .map(|(d, y)| {
            let target = mu.interpolate(*y);
            if target > 0.0 {
                d / target
            } else {
                f64::INFINITY
            }
        })
        .collect();
    if let Some(index) = tprime.iter().position(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::SingularDensity { index });
    }
    Ok(MongeMap1D { lo: nu.lo(), hi: nu.hi(), t, tprime, t_edges })
}

impl MongeMap1D {
    pub fn n_cells(&self) -> usize {
        self.t.len()
    }

    pub fn dx(&self) -> f64 {
        (self.hi - self.lo) / self.t.len() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|i| self.center(i)).collect()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn tprime(&self) -> &[f64] {
        &self.tprime
    }

    /// `T′` by central differences of `T`, for cross-checking.
    pub fn differenced_tprime(&self) -> Vec<f64> {
        let n = self.t.len();
        let dx = self.dx();
        (0..n)
            .map(|i| match i {
                0 => (self.t[1] - self.t[0]) / dx,
                i if i == n - 1 => (self.t[i] - self.t[i - 1]) / dx,
                i => (self.t[i + 1] - self.t[i - 1]) / (2.0 * dx),
            })
            .collect()
    }

    /// Whether the source grid matches `nu`.
    pub fn on_grid_of(&self, nu: &GridMeasure) -> bool {
        self.lo == nu.lo() && self.hi == nu.hi() && self.n_cells() == nu.n_cells()
    }

    /// Brenier potential `φ` with `φ′ = T`, normalised by `φ(x₀) = 0` at the
    /// first centre.
    pub fn potential(&self) -> SampledFunction {
        let dx = self.dx();
        let mut values = Vec::with_capacity(self.t.len());
        let mut acc = 0.0;
        values.push(0.0);
        for w in self.t.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * dx;
            values.push(acc);
        }
        SampledFunction { x: self.centers(), values }
    }

    /// Legendre conjugate `φ*`, evaluated at the distinct values of `T`.
    pub fn conjugate(&self) -> Result<SampledFunction> {
        let mut q = self.t.clone();
        q.dedup_by(|a, b| *a <= *b);
        legendre_onto(&self.potential(), &q)
    }

    /// `T⁻¹(y)` by monotone linear interpolation; clamped to the grid.
    pub fn inverse(&self, y: f64) -> f64 {
        let n = self.t.len();
        if y <= self.t[0] {
            return self.center(0);
        }
        if y >= self.t[n - 1] {
            return self.center(n - 1);
        }
        let k = self.t.partition_point(|v| *v <= y).clamp(1, n - 1) - 1;
        let span = self.t[k + 1] - self.t[k];
        let s = if span > 0.0 { (y - self.t[k]) / span } else { 0.0 };
        self.center(k) + s * self.dx()
    }

    /// `T` at the cell edges `lo + i·dx`, `i = 0..=n`.
    pub fn t_edges(&self) -> &[f64] {
        &self.t_edges
    }

    /// `∫ |T(x) − x|² dν` by Simpson's rule on each cell.
    pub fn transport_cost(&self, nu: &GridMeasure) -> f64 {
        let dx = self.dx();
        let sq = |t: f64, x: f64| (t - x) * (t - x);
        self.t
            .iter()
            .zip(nu.density())
            .enumerate()
            .map(|(i, (t, d))| {
                let (xl, xr) = (self.lo + i as f64 * dx, self.lo + (i + 1) as f64 * dx);
                let s = sq(self.t_edges[i], xl) + 4.0 * sq(*t, self.center(i)) + sq(self.t_edges[i + 1], xr);
                s / 6.0 * d
            })
            .sum::<f64>()
            * dx
    }

    /// Largest discrepancy `|∫ g∘T dν − ∫ g dμ|` over the test battery.
    pub fn pushforward_residual(&self, nu: &GridMeasure, mu: &GridMeasure) -> f64 {
        let dx = self.dx();
        PUSHFORWARD_BATTERY
            .iter()
            .map(|g| {
                let pushed: f64 = self.t.iter().zip(nu.density()).map(|(t, d)| g(*t) * d).sum::<f64>() * dx;
                (pushed - mu.expect_1d(g)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Writes `(x, T, Tprime)` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::NumericalFailure(format!("csv: {e}"));
        w.write_record(["x", "T", "Tprime"]).map_err(io)?;
        for (i, (t, tp)) in self.t.iter().zip(&self.tprime).enumerate() {
            w.write_record([self.center(i).to_string(), t.to_string(), tp.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::NumericalFailure(format!("csv: {e}")))?;
        Ok(())
    }
}

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wjgap_core::measures::REFERENCE_CELLS;
use wjgap_core::{catalog, CatalogEntry, CatalogParams, GridMeasure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn entry(name: &str) -> CatalogEntry {
    catalog(name, &CatalogParams::default()).unwrap()
}

pub fn reference(name: &str) -> GridMeasure {
    entry(name).grid_measure(REFERENCE_CELLS).unwrap()
}

pub fn normal_on(lo: f64, hi: f64, n: usize, mean: f64, sd: f64) -> GridMeasure {
    GridMeasure::from_log_density(lo, hi, n, |x| -0.5 * ((x - mean) / sd).powi(2)).unwrap()
}

pub fn normal(mean: f64, sd: f64) -> GridMeasure {
    normal_on(-8.0, 8.0, REFERENCE_CELLS, mean, sd)
}

/// A mixture of one to three Gaussians placed around `nu`, on its grid.
pub fn random_measure(rng: &mut ChaCha8Rng, nu: &GridMeasure) -> GridMeasure {
    let (m, s) = (nu.mean(), nu.variance().sqrt());
    let k = rng.random_range(1..=3);
    let comps: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| (rng.random_range(0.2..1.0), m + s * rng.random_range(-1.5..1.5), s * rng.random_range(0.4..1.5)))
        .collect();
    GridMeasure::from_log_density(nu.lo(), nu.hi(), nu.n_cells(), |x| {
        let logs: Vec<f64> =
            comps.iter().map(|(w, c, sd)| w.ln() - sd.ln() - 0.5 * ((x - c) / sd).powi(2)).collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
    })
    .unwrap()
}

/// Piecewise-linear CDF inverted by binary search over the cumulative
/// masses; `W₂²` by the midpoint rule in `u` over `levels` levels.
pub fn w2_squared_by_bisection(mu: &GridMeasure, nu: &GridMeasure, levels: usize) -> f64 {
    fn cumulative(g: &GridMeasure) -> Vec<f64> {
        let mut acc = 0.0;
        g.density()
            .iter()
            .map(|d| {
                acc += d * g.dx();
                acc
            })
            .collect()
    }
    fn inverse(g: &GridMeasure, cum: &[f64], u: f64) -> f64 {
        let i = cum.partition_point(|c| *c < u).min(cum.len() - 1);
        let below = if i == 0 { 0.0 } else { cum[i - 1] };
        let frac = ((u - below) / (g.density()[i] * g.dx())).clamp(0.0, 1.0);
        g.lo() + (i as f64 + frac) * g.dx()
    }
    let (cm, cn) = (cumulative(mu), cumulative(nu));
    (0..levels)
        .map(|k| {
            let u = (k as f64 + 0.5) / levels as f64;
            (inverse(mu, &cm, u) - inverse(nu, &cn, u)).powi(2)
        })
        .sum::<f64>()
        / levels as f64
}

/// `x(t)` for `x′ = −x³` by classical Runge–Kutta.
pub fn cubic_flow(x0: f64, t: f64, steps: usize) -> f64 {
    let f = |x: f64| -x * x * x;
    let h = t / steps as f64;
    let mut x = x0;
    for _ in 0..steps {
        let k1 = f(x);
        let k2 = f(x + 0.5 * h * k1);
        let k3 = f(x + 0.5 * h * k2);
        let k4 = f(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    x
}

/// Trapezoid rule on a sampled series.
pub fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1])).sum()
}

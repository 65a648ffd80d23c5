//! Pair scans of the drift monotonicity and the coupling contraction rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::fit::{decay_rate_fit, DecayFit};
use crate::dynamics::{coupled_sde_with, uniform_times, DriftSpec, Scheme, SdeOptions};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::measures::ParticleCloud;

/// Outcome of [`monotone_at_infinity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub passed: bool,
    /// Every far pair satisfies the `K/3` bound.
    pub far_monotone: bool,
    /// Every pair satisfies `(A(x) − A(y))·(x − y) ≥ 0`.
    pub global_monotone: bool,
    /// Smallest `(A(x) − A(y))·(x − y)/|x − y|²` over far pairs.
    pub worst_far_ratio: f64,
    pub worst_global_ratio: f64,
    pub threshold: f64,
    pub n_pairs: usize,
    /// The far pair attaining the worst ratio.
    pub worst_pair: (Vec<f64>, Vec<f64>),
}

fn monotonicity_ratio(a: &VectorField, x: &[f64], y: &[f64]) -> Option<f64> {
    let d2: f64 = x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum();
    (d2 > 1e-24).then(|| a.monotonicity_product(x, y) / d2)
}

fn uniform_point(rng: &mut ChaCha8Rng, half: f64, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-half..=half)).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Checks `(A(x) − A(y))·(x − y) ≥ (K/3)|x − y|²` on `n_pairs` pairs with
/// `|x| ≥ 2R` and `y` in `[−4R, 4R]^d`, and `(A(x) − A(y))·(x − y) ≥ 0` on
/// `n_pairs` pairs drawn uniformly from `[−4R, 4R]^d`. Pair `i` uses the ChaCha
/// stream `i` of `seed`.
pub fn monotone_at_infinity_check(a: &VectorField, r: f64, k: f64, n_pairs: usize, seed: u64) -> Result<MonotoneReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be positive".into()));
    }
    if !(r > 0.0 && r.is_finite() && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("R = {r}, K = {k}")));
    }
    let d = a.dim();
    let half = 4.0 * r;
    let scan = (0..n_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let gx = uniform_point(&mut rng, half, d);
            let gy = uniform_point(&mut rng, half, d);
            let global = monotonicity_ratio(a, &gx, &gy).unwrap_or(f64::INFINITY);
            // far point: uniform radius in [2R, 4R], isotropic direction
            let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let radius = rng.random_range(2.0 * r..=half);
            let n = norm(&dir).max(f64::MIN_POSITIVE);
            let fx: Vec<f64> = dir.iter().map(|v| v / n * radius).collect();
            let fy = uniform_point(&mut rng, half, d);
            let far = monotonicity_ratio(a, &fx, &fy).unwrap_or(f64::INFINITY);
            (global, far, fx, fy)
        })
        .collect::<Vec<_>>();
    let worst_global_ratio = scan.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let worst = scan.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("n_pairs > 0");
    let threshold = k / 3.0;
    let far_monotone = worst.1 >= threshold - 1e-9 * threshold.abs().max(1.0);
    let global_monotone = worst_global_ratio >= -1e-9;
    Ok(MonotoneReport {
        passed: far_monotone && global_monotone,
        far_monotone,
        global_monotone,
        worst_far_ratio: worst.1,
        worst_global_ratio,
        threshold,
        n_pairs,
        worst_pair: (worst.2.clone(), worst.3.clone()),
    })
}

/// Simulation settings of [`sturm_vonrenesse_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrOptions {
    pub t_end: f64,
    pub dt: f64,
    pub record_step: f64,
    /// Replicas used for the standard error.
    pub batches: usize,
}

impl Default for SvrOptions {
    fn default() -> Self {
        Self { t_end: 2.0, dt: 1e-3, record_step: 0.1, batches: 20 }
    }
}

/// Geometric versus dynamic contraction constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrReport {
    /// `inf (A(y) − A(x))·(y − x)/|y − x|²` over the sampled pairs.
    pub c_geo: f64,
    /// Half the fitted decay rate of `E|Xₜ − Yₜ|²` under synchronous coupling.
    pub c_dyn: f64,
    /// Standard error of `c_dyn` across replicas.
    pub c_dyn_se: f64,
    /// `c_dyn ≥ c_geo − 3·se`.
    pub consistent: bool,
    pub fit: DecayFit,
    pub times: Vec<f64>,
    pub coupling: Vec<f64>,
}

pub fn sturm_vonrenesse_probe(drift: &DriftSpec, domain: &[(f64, f64)], n_pairs: usize, seed: u64) -> Result<SvrReport> {
    sturm_vonrenesse_probe_with(drift, domain, n_pairs, seed, &SvrOptions::default())
}

/// Samples `n_pairs` starting pairs uniformly in the box `domain`, takes the
/// worst monotonicity ratio among them as `c_geo`, then runs the coupled
/// diffusions from the same pairs.
pub fn sturm_vonrenesse_probe_with(
    drift: &DriftSpec,
    domain: &[(f64, f64)],
    n_pairs: usize,
    seed: u64,
    opts: &SvrOptions,
) -> Result<SvrReport> {
    if n_pairs < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 pairs, got {n_pairs}")));
    }
    if domain.len() != drift.dim || domain.iter().any(|(l, h)| !(h > l)) {
        return Err(Error::InvalidParameter("domain must give one increasing interval per coordinate".into()));
    }
    if opts.batches < 2 || opts.batches > n_pairs {
        return Err(Error::InvalidParameter(format!("{} batches for {n_pairs} pairs", opts.batches)));
    }
    let d = drift.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> Vec<f64> { domain.iter().map(|(l, h)| rng.random_range(*l..=*h)).collect() };
    let (mut xs, mut ys) = (Vec::with_capacity(n_pairs * d), Vec::with_capacity(n_pairs * d));
    for _ in 0..n_pairs {
        xs.extend(draw());
        ys.extend(draw());
    }
    let a = drift.drift();
    let c_geo = (0..n_pairs)
        .filter_map(|i| monotonicity_ratio(&a, &xs[i * d..(i + 1) * d], &ys[i * d..(i + 1) * d]))
        .fold(f64::INFINITY, f64::min);

    let x0 = ParticleCloud::uniform(d, xs)?;
    let y0 = ParticleCloud::uniform(d, ys)?;
    let times = uniform_times(opts.t_end, opts.record_step);
    let sde = SdeOptions::new(opts.t_end, opts.dt, seed).scheme(Scheme::SplitRk4).times(times.clone());
    let traj = coupled_sde_with(&x0, &y0, drift, &sde)?;

    let sq: Vec<Vec<f64>> = traj
        .states
        .iter()
        .map(|(x, y)| {
            (0..n_pairs)
                .map(|k| x.point(k).iter().zip(y.point(k)).map(|(u, v)| (u - v) * (u - v)).sum())
                .collect()
        })
        .collect();
    let coupling: Vec<f64> = sq.iter().map(|row: &Vec<f64>| row.iter().sum::<f64>() / n_pairs as f64).collect();
    let fit = decay_rate_fit(&times, &coupling)?;
    let rates = (0..opts.batches)
        .map(|b| {
            let series: Vec<f64> = sq
                .iter()
                .map(|row| {
                    let (s, c) = row.iter().skip(b).step_by(opts.batches).fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
                    s / c as f64
                })
                .collect();
            decay_rate_fit(&times, &series).map(|f| 0.5 * f.rate)
        })
        .collect::<Result<Vec<f64>>>()?;
    let nb = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / nb;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (nb - 1.0);
    let c_dyn_se = (var / nb).sqrt();
    let c_dyn = 0.5 * fit.rate;
    let consistent = c_dyn >= c_geo - 3.0 * c_dyn_se - 1e-9 * c_geo.abs().max(1.0);
    Ok(SvrReport { c_geo, c_dyn, c_dyn_se, consistent, fit, times, coupling })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_drift_passes_the_far_scan() {
        let a = VectorField::from_1d(|x| x.powi(3));
        let r = monotone_at_infinity_check(&a, 1.0, 3.0, 10_000, 7).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.worst_far_ratio >= 1.0);
    }

    #[test]
    fn linear_drift_passes() {
        let a = VectorField::from_1d(|x| x);
        let r = monotone_at_infinity_check(&a, 2.5, 1.0, 1000, 1).unwrap();
        assert!(r.passed);
        assert!((r.worst_far_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expanding_drift_fails_globally() {
        let a = VectorField::from_1d(|x| -x);
        let r = monotone_at_infinity_check(&a, 1.0, 1.0, 1000, 1).unwrap();
        assert!(!r.passed && !r.global_monotone);
    }

    #[test]
    fn scan_is_reproducible() {
        let a = VectorField::linear(vec![vec![1.0, 0.5], vec![-0.5, 2.0]]);
        let r1 = monotone_at_infinity_check(&a, 1.0, 1.0, 500, 3).unwrap();
        let r2 = monotone_at_infinity_check(&a, 1.0, 1.0, 500, 3).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn linear_contraction_is_exact() {
        for c in [0.5, 1.0, 2.0] {
            let r = sturm_vonrenesse_probe(&DriftSpec::linear(1, c), &[(-3.0, 3.0)], 200, 5).unwrap();
            assert!((r.c_geo - c).abs() < 1e-12);
            assert!((r.c_dyn - c).abs() < 1e-8, "{} vs {c}", r.c_dyn);
            assert!(r.consistent);
        }
    }

    #[test]
    fn expanding_flow_has_negative_constants() {
        let r = sturm_vonrenesse_probe(&DriftSpec::linear(1, -1.0), &[(-3.0, 3.0)], 200, 5).unwrap();
        assert!((r.c_geo + 1.0).abs() < 1e-12);
        assert!((r.c_dyn + 1.0).abs() < 1e-8);
    }

    #[test]
    fn too_few_pairs() {
        assert!(sturm_vonrenesse_probe(&DriftSpec::linear(1, 1.0), &[(-1.0, 1.0)], 10, 0).is_err());
    }
}

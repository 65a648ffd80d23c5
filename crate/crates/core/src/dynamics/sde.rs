use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::drift::DriftSpec;
use super::trajectory::{check_times, geometric_times, Trajectory};
use crate::error::{Error, Result};
use crate::measures::ParticleCloud;

/// Positions beyond this magnitude count as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e8;

/// Name of the coupling metric recorded by [`coupled_sde`].
pub const COUPLING_METRIC: &str = "coupling_distance";

/// Standard error of [`COUPLING_METRIC`] across particles.
pub const COUPLING_SE_METRIC: &str = "coupling_distance_se";

/// Time discretisation of `dXₜ = −A(Xₜ)dt + √2 dBₜ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `X ← X − A(X)Δt + √(2Δt) ξ`.
    #[default]
    EulerMaruyama,
    /// A classical Runge–Kutta step of the drift ODE followed by the same
    /// additive Gaussian increment. For linear drifts the deterministic part
    /// is exact to `O(Δt⁴)`.
    SplitRk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdeOptions {
    pub dt: f64,
    pub seed: u64,
    pub scheme: Scheme,
    /// Recording times; the geometric grid up to `t_end` when `None`.
    pub times: Option<Vec<f64>>,
    pub t_end: f64,
}

impl SdeOptions {
    pub fn new(t_end: f64, dt: f64, seed: u64) -> Self {
        Self { dt, seed, scheme: Scheme::EulerMaruyama, times: None, t_end }
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn times(mut self, times: Vec<f64>) -> Self {
        self.times = Some(times);
        self
    }

    fn resolved_times(&self) -> Result<Vec<f64>> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        let times = match &self.times {
            Some(t) => t.clone(),
            None => {
                if !(self.t_end > 0.0) {
                    return Err(Error::InvalidParameter(format!("t_end must be positive, got {}", self.t_end)));
                }
                geometric_times(self.t_end)
            }
        };
        check_times(&times)?;
        Ok(times)
    }
}

/// Independent Gaussian stream of particle `index`: the ChaCha stream number
/// is the particle index, so draws do not depend on scheduling.
fn particle_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct Stepper<'a> {
    drift: &'a DriftSpec,
    dim: usize,
    scheme: Scheme,
}

impl Stepper<'_> {
    /// Deterministic part of one step, in place.
    fn drift_step(&self, x: &mut [f64], h: f64) {
        let d = self.dim;
        let mut k1 = [0.0; 8];
        self.drift.eval(x, &mut k1[..d]);
        match self.scheme {
            Scheme::EulerMaruyama => {
                for i in 0..d {
                    x[i] -= h * k1[i];
                }
            }
            Scheme::SplitRk4 => {
                let (mut k2, mut k3, mut k4, mut y) = ([0.0; 8], [0.0; 8], [0.0; 8], [0.0; 8]);
                for i in 0..d {
                    y[i] = x[i] - 0.5 * h * k1[i];
                }
                self.drift.eval(&y[..d], &mut k2[..d]);
                for i in 0..d {
                    y[i] = x[i] - 0.5 * h * k2[i];
                }
                self.drift.eval(&y[..d], &mut k3[..d]);
                for i in 0..d {
                    y[i] = x[i] - h * k3[i];
                }
                self.drift.eval(&y[..d], &mut k4[..d]);
                for i in 0..d {
                    x[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
    }

    /// Integrates the particles of `starts` (each a `dim`-block) driven by one
    /// shared noise stream, returning their positions at every record time.
    fn run(&self, starts: &[&[f64]], times: &[f64], dt: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>, f64> {
        let d = self.dim;
        let mut states: Vec<Vec<f64>> = starts.iter().map(|s| s.to_vec()).collect();
        let mut out = Vec::with_capacity(times.len());
        let mut t = 0.0;
        let mut xi = [0.0; 8];
        for &target in times {
            while t < target {
                let h = dt.min(target - t);
                let h = if target - t - h < 1e-9 * dt { target - t } else { h };
                let s = (2.0 * h).sqrt();
                for v in xi.iter_mut().take(d) {
                    *v = StandardNormal.sample(rng);
                }
                for x in states.iter_mut() {
                    self.drift_step(x, h);
                    for i in 0..d {
                        x[i] += s * xi[i];
                    }
                }
                t += h;
                if t >= target - 1e-12 * dt.max(target) {
                    t = target;
                }
                if states.iter().flatten().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
                    return Err(t);
                }
            }
            out.push(states.iter().flatten().copied().collect());
        }
        Ok(out)
    }
}

/// Euler–Maruyama evolution of a particle cloud with the default options.
pub fn sde_evolve(
    cloud0: &ParticleCloud,
    drift: &DriftSpec,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<Trajectory<ParticleCloud>> {
    sde_evolve_with(cloud0, drift, &SdeOptions::new(t_end, dt, seed))
}

/// Evolves each particle with its own noise stream.
pub fn sde_evolve_with(cloud0: &ParticleCloud, drift: &DriftSpec, opts: &SdeOptions) -> Result<Trajectory<ParticleCloud>> {
    drift.check_dim(cloud0.dim())?;
    let times = opts.resolved_times()?;
    let stepper = Stepper { drift, dim: cloud0.dim(), scheme: opts.scheme };
    let paths: Vec<Vec<Vec<f64>>> = (0..cloud0.len())
        .into_par_iter()
        .map(|k| {
            let mut rng = particle_rng(opts.seed, k);
            stepper
                .run(&[cloud0.point(k)], &times, opts.dt, &mut rng)
                .map_err(|time| Error::DivergedParticle { index: k, time })
        })
        .collect::<Result<_>>()?;
    let mut traj = Trajectory::new();
    for (r, &t) in times.iter().enumerate() {
        let points: Vec<f64> = paths.iter().flat_map(|p| p[r].iter().copied()).collect();
        traj.push(t, cloud0.with_points(points));
    }
    Ok(traj)
}

/// Two clouds evolved under synchronous coupling: particle `k` of both
/// clouds receives the same Gaussian increments. Records
/// `E|Xₜ − Yₜ|²` (weighted by the weights of `x0`) and its standard error.
pub fn coupled_sde(
    x0: &ParticleCloud,
    y0: &ParticleCloud,
    drift: &DriftSpec,
    t_end: f64,
    dt: f64,
    seed: u64,
) -> Result<Trajectory<(ParticleCloud, ParticleCloud)>> {
    coupled_sde_with(x0, y0, drift, &SdeOptions::new(t_end, dt, seed))
}

pub fn coupled_sde_with(
    x0: &ParticleCloud,
    y0: &ParticleCloud,
    drift: &DriftSpec,
    opts: &SdeOptions,
) -> Result<Trajectory<(ParticleCloud, ParticleCloud)>> {
    if x0.len() != y0.len() || x0.dim() != y0.dim() {
        return Err(Error::CloudMismatch { left: x0.len(), right: y0.len() });
    }
    drift.check_dim(x0.dim())?;
    let times = opts.resolved_times()?;
    let d = x0.dim();
    let stepper = Stepper { drift, dim: d, scheme: opts.scheme };
    let paths: Vec<Vec<Vec<f64>>> = (0..x0.len())
        .into_par_iter()
        .map(|k| {
            let mut rng = particle_rng(opts.seed, k);
            stepper
                .run(&[x0.point(k), y0.point(k)], &times, opts.dt, &mut rng)
                .map_err(|time| Error::DivergedParticle { index: k, time })
        })
        .collect::<Result<_>>()?;

    let mut traj = Trajectory::new();
    let mut mean = Vec::with_capacity(times.len());
    let mut se = Vec::with_capacity(times.len());
    let w = x0.weights();
    for (r, &t) in times.iter().enumerate() {
        let mut xs = Vec::with_capacity(x0.len() * d);
        let mut ys = Vec::with_capacity(x0.len() * d);
        let mut sq = Vec::with_capacity(x0.len());
        for p in &paths {
            let (x, y) = p[r].split_at(d);
            xs.extend_from_slice(x);
            ys.extend_from_slice(y);
            sq.push(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
        }
        let m: f64 = sq.iter().zip(w).map(|(s, w)| s * w).sum();
        let var: f64 = sq.iter().zip(w).map(|(s, w)| w * (s - m) * (s - m)).sum();
        let eff = 1.0 / w.iter().map(|w| w * w).sum::<f64>();
        mean.push(m);
        se.push((var / eff).sqrt());
        traj.push(t, (x0.with_points(xs), y0.with_points(ys)));
    }
    traj.insert_metric(COUPLING_METRIC, mean)?;
    traj.insert_metric(COUPLING_SE_METRIC, se)?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::trajectory::uniform_times;
    use crate::field::VectorField;

    fn spread(n: usize, center: f64) -> ParticleCloud {
        ParticleCloud::uniform_1d((0..n).map(|k| center + (k as f64 / n as f64 - 0.5) * 2.0).collect()).unwrap()
    }

    #[test]
    fn free_diffusion_variance_grows_like_2t() {
        let cloud = ParticleCloud::uniform_1d(vec![0.0; 20_000]).unwrap();
        let drift = DriftSpec::gradient(VectorField::zero(1), Some(0.0));
        let tr = sde_evolve_with(&cloud, &drift, &SdeOptions::new(1.0, 0.01, 3).times(vec![1.0])).unwrap();
        let pts = tr.states[0].points();
        let var = pts.iter().map(|x| x * x).sum::<f64>() / pts.len() as f64;
        // the sample variance has standard error 2t·√(2/n)
        assert!((var - 2.0).abs() < 3.0 * 2.0 * (2.0 / 20_000f64).sqrt(), "{var}");
    }

    #[test]
    fn same_seed_same_trajectory() {
        let cloud = spread(100, 1.0);
        let drift = DriftSpec::linear(1, 1.0);
        let a = sde_evolve(&cloud, &drift, 1.0, 0.01, 9).unwrap();
        let b = sde_evolve(&cloud, &drift, 1.0, 0.01, 9).unwrap();
        assert_eq!(a, b);
        let c = sde_evolve(&cloud, &drift, 1.0, 0.01, 10).unwrap();
        assert_ne!(a.states.last(), c.states.last());
    }

    #[test]
    fn coupling_of_identical_clouds_stays_at_zero() {
        let cloud = spread(50, 0.0);
        let drift = DriftSpec::linear(1, 1.0);
        let tr = coupled_sde(&cloud, &cloud, &drift, 1.0, 0.01, 1).unwrap();
        assert!(tr.metric(COUPLING_METRIC).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_drift_contracts_exactly() {
        let x0 = spread(64, 1.0);
        let y0 = spread(64, -1.5);
        let c = 1.0;
        let opts = SdeOptions::new(1.0, 1e-3, 5).scheme(Scheme::SplitRk4).times(uniform_times(1.0, 0.25));
        let tr = coupled_sde_with(&x0, &y0, &DriftSpec::linear(1, c), &opts).unwrap();
        let m = tr.metric(COUPLING_METRIC).unwrap();
        for (t, v) in tr.times.iter().zip(m) {
            let oracle = (-2.0 * c * t).exp() * m[0];
            assert!((v / oracle - 1.0).abs() < 1e-10, "t {t}: {v} vs {oracle}");
        }
    }

    #[test]
    fn divergence_and_mismatch_are_reported() {
        let cloud = spread(4, 50.0);
        let drift = DriftSpec::gradient(VectorField::from_1d(|x| x * x * x), Some(0.0));
        assert!(matches!(sde_evolve(&cloud, &drift, 1.0, 0.1, 1), Err(Error::DivergedParticle { .. })));
        let other = spread(5, 0.0);
        assert_eq!(
            coupled_sde(&cloud, &other, &drift, 1.0, 0.1, 1).unwrap_err(),
            Error::CloudMismatch { left: 4, right: 5 }
        );
    }
}

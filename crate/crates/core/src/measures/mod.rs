//! Discretised probability measures, reference potentials and information
//! functionals.

mod catalog;
mod cloud;
mod grid;
mod info;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use catalog::{catalog, CatalogEntry, CatalogParams, CATALOG_NAMES, REFERENCE_CELLS};
pub use cloud::{ParticleCloud, WEIGHT_TOLERANCE};
pub use grid::{normalize_grid, GridMeasure, MASS_TOLERANCE};
pub use info::{fisher_information, log_density_gradient, relative_entropy, RATIO_FLOOR};

use crate::error::{Error, Result};

/// Anything that can integrate a test function.
pub trait Expectation {
    fn expectation(&self, f: &dyn Fn(&[f64]) -> f64) -> f64;
}

impl Expectation for GridMeasure {
    fn expectation(&self, f: &dyn Fn(&[f64]) -> f64) -> f64 {
        self.expect_1d(|x| f(&[x]))
    }
}

impl Expectation for ParticleCloud {
    fn expectation(&self, f: &dyn Fn(&[f64]) -> f64) -> f64 {
        self.expect(f)
    }
}

/// `∫ |x|^k dμ`.
pub fn moment<M: Expectation + ?Sized>(mu: &M, k: u32) -> f64 {
    if k == 0 {
        // unit mass is an invariant of both measure types
        return 1.0;
    }
    mu.expectation(&|x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if k.is_multiple_of(2) {
            r2.powi(k as i32 / 2)
        } else {
            r2.sqrt().powi(k as i32)
        }
    })
}

/// Draws `n` i.i.d. points from a grid measure by inverting its piecewise
/// linear distribution function. Deterministic in `seed`.
pub fn sample(mu: &GridMeasure, n: usize, seed: u64) -> Result<ParticleCloud> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    let masses = mu.cell_masses();
    let mut cumulative = Vec::with_capacity(masses.len());
    let mut acc = 0.0;
    for m in &masses {
        acc += m;
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dx = mu.dx();
    let points = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            let i = cumulative.partition_point(|c| *c <= u).min(masses.len() - 1);
            let below = if i == 0 { 0.0 } else { cumulative[i - 1] };
            let frac = if masses[i] > 0.0 { ((u - below) / masses[i]).clamp(0.0, 1.0) } else { 0.5 };
            mu.edge(i) + frac * dx
        })
        .collect();
    ParticleCloud::uniform_1d(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> GridMeasure {
        catalog("gaussian", &CatalogParams::default()).unwrap().grid_measure(REFERENCE_CELLS).unwrap()
    }

    #[test]
    fn moments_of_grid_and_cloud() {
        let g = standard();
        assert_eq!(moment(&g, 0), 1.0);
        assert!((moment(&g, 2) - 1.0).abs() < 1e-6);
        let delta = ParticleCloud::uniform_1d(vec![1.0]).unwrap();
        assert_eq!(moment(&delta, 2), 1.0);
        let planar = ParticleCloud::uniform(2, vec![3.0, 4.0]).unwrap();
        assert_eq!(moment(&planar, 1), 5.0);
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let g = standard();
        let a = sample(&g, 100_000, 7).unwrap();
        let b = sample(&g, 100_000, 7).unwrap();
        assert_eq!(a, b);
        let mean = a.mean()[0];
        assert!(mean.abs() < 3.0 / (1e5f64).sqrt(), "mean {mean}");
        let one = sample(&g, 1, 3).unwrap();
        assert!(one.point(0)[0] >= g.lo() && one.point(0)[0] <= g.hi());
        assert!(sample(&g, 0, 1).is_err());
    }
}

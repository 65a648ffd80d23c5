//! Fixtures shared by the criterion benchmarks in `benches/`.

use wjgap_core::measures::sample;
use wjgap_core::{catalog, CatalogParams, GridMeasure, ParticleCloud};

/// Catalog measure `name` on its support with `n` cells.
pub fn grid(name: &str, n: usize) -> GridMeasure {
    catalog(name, &CatalogParams::default()).unwrap().grid_measure(n).unwrap()
}

/// `N(mean, sd²)` on `[-8, 8]` with `n` cells.
pub fn normal(mean: f64, sd: f64, n: usize) -> GridMeasure {
    GridMeasure::from_log_density(-8.0, 8.0, n, |x| -0.5 * ((x - mean) / sd).powi(2)).unwrap()
}

/// `n` points drawn from the standard Gaussian, moved by `shift`.
pub fn cloud(n: usize, shift: f64, seed: u64) -> ParticleCloud {
    sample(&grid("gaussian", 2000), n, seed).unwrap().translated(&[shift])
}

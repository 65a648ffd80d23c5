//! Numerical machinery for convergence to equilibrium of Fokker-Planck
//! equations in Wasserstein distance.
//!
//! The crate is organised in five layers:
//!
//! * [`measures`]: discretised probability measures on a uniform 1D grid,
//!   weighted particle clouds, a catalog of reference potentials, relative
//!   entropy and Fisher information.
//! * [`transport`]: exact 1D quadratic transport through quantiles, Brenier
//!   maps, discrete Legendre transforms, an exact network-simplex solver for
//!   point clouds and a log-domain Sinkhorn solver.
//! * [`functionals`]: the Hessian gap, the J functional, the Wasserstein
//!   dissipation along the flow and the HWI / entropy-dissipation residuals.
//! * [`dynamics`]: an exponentially fitted finite-volume Fokker-Planck
//!   solver, synchronous-coupling SDE integrators, the zero-diffusion quartic
//!   flow and non-gradient stationary perturbations.
//! * [`inequalities`]: Poincaré spectral gaps, WJ constant estimation over
//!   test families, decay-rate fitting, closed-form constant formulas and the
//!   monotonicity / contraction probes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod field;
pub mod functionals;
pub mod inequalities;
pub mod measures;
pub mod transport;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use measures::{catalog, CatalogEntry, CatalogParams, GridMeasure, ParticleCloud};

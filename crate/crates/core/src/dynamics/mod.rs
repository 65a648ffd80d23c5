//! Fokker-Planck evolution on grids and particle SDEs.

mod drift;
mod fokker_planck;
mod quartic;
mod sde;
mod stationarity;
mod trajectory;

pub use drift::{make_rotational_F, DriftSpec};
pub use fokker_planck::{bernoulli, fp_max_stable_dt, fp_solve_1d, fp_solve_1d_at, BOUNDARY_LEAK_RATE};
pub use quartic::quartic_zero_diffusion_w2;
pub use sde::{
    coupled_sde, coupled_sde_with, sde_evolve, sde_evolve_with, Scheme, SdeOptions, COUPLING_METRIC,
    COUPLING_SE_METRIC, DIVERGENCE_BOUND,
};
pub use stationarity::{stationarity_residual, NodeGrid, STATIONARITY_STEP};
pub use trajectory::{geometric_times, uniform_times, Trajectory};

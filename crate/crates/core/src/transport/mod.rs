//! Quadratic optimal transport: exact 1D distances and maps, discrete
//! Legendre transforms, exact and entropic solvers for point clouds.

mod brenier;
mod legendre;
mod quantile;
mod simplex;
mod sinkhorn;

pub use brenier::{brenier_map_1d, MongeMap1D, PUSHFORWARD_BATTERY};
pub use legendre::{legendre, legendre_onto, SampledFunction};
pub use quantile::{w2_exact_1d, w2_grid_cloud_1d, w2_squared_quantiles, QuantileFunction};
pub use simplex::{
    squared_distances, transport_lp, w2_discrete, DiscretePlan, PlanEntry, EXACT_BUDGET, PLAN_TOLERANCE,
};
pub use sinkhorn::{sinkhorn_w2, SinkhornResult, SINKHORN_MAX_ITER, SINKHORN_TOLERANCE};

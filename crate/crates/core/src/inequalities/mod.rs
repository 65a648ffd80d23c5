//! Functional-inequality constants: estimates over test families, closed
//! forms, decay fits and monotonicity probes.

mod constants;
mod estimate;
mod family;
mod fit;
mod poincare;
mod probes;
mod report;

pub use constants::{
    alternative_lsi, decay_to_wh_factor, derived_agswh, derived_lsi, derived_perturbation, derived_tensorization,
    derived_wh_from_decay,
};
pub use estimate::{
    family_ratios, wj_constant_estimate, wj_product_estimate, MemberRatio, ProductFactor, WjEstimate, MIN_W2,
};
pub use family::{
    hermite_profile_derivatives, FamilyMember, MemberKind, TestFamily, HERMITE_AMPLITUDES, HERMITE_MODES,
    LOG_DENSITY_FLOOR, SPECTRAL_AMPLITUDES,
};
pub use fit::{decay_rate_fit, DecayFit, EXPONENTIAL_R2};
pub use poincare::{poincare_constant_1d, poincare_eigenfunction_1d};
pub use probes::{
    monotone_at_infinity_check, sturm_vonrenesse_probe, sturm_vonrenesse_probe_with, MonotoneReport, SvrOptions,
    SvrReport,
};
pub use report::{write_reports_csv, ConstantKind, ConstantReport};

//! Variable selection for multivariate linear regression Y = X Theta + E.
//!
//! The crate provides, for the regime n - k > p with both the response
//! dimension p and the candidate count k allowed to be large:
//!
//! - the classical AIC, BIC and Mallows Cp criteria with exhaustive
//!   best-subset search ([`criteria`]);
//! - the kick-one-out (KOO) statistics that compare the full model against
//!   each single-deletion model, and the penalty-free general KOO statistics
//!   with theoretical or outlier-based thresholds ([`koo`]);
//! - the asymptotic consistency diagnostics: the phi/psi boundary functions,
//!   condition values V1-V4, noncentrality functionals tau and kappa, and a
//!   per-method classification of a configuration ([`consistency`]);
//! - seeded data generators and a deterministic Monte Carlo harness for the
//!   selection-percentage experiments ([`simulation`]).
//!
//! The numerical core ([`model`]) keeps all determinant work in log space and
//! drives every per-variable statistic through a rank-one determinant
//! downdate, so one full-model factorization prices all k deletions.

pub mod consistency;
pub mod criteria;
pub mod error;
pub mod koo;
pub mod model;
pub mod simulation;

pub use consistency::{
    aic_fixed_k_boundary, classify_theorems, koo_condition_values, noncentrality, phi, psi,
    region_grid, AsymptoticParams, ConditionValues, GridPoint, MethodVerdicts,
    NoncentralityLimit, NoncentralityReport, Verdict,
};
pub use criteria::{
    aic, bic, cp, select_exhaustive, CriterionKind, CriterionValue, ExhaustiveSelection,
    SubsetScore, ENUMERATION_GUARD,
};
pub use error::{Error, Result};
pub use koo::{
    general_koo_select, koo_profile, koo_select, KooFlavor, KooProfile, ThresholdRule,
};
pub use model::{
    logdet_spd, residual_gram, Dataset, FullModelCache, ModelIndex, ResidualGram,
};
pub use simulation::{
    generate_setting, estimate_condition_values, run_monte_carlo, sample_errors, ErrorDist, MethodReport,
    MethodSpec, Setting, SimulationConfig, SimulationReport, Truth,
};

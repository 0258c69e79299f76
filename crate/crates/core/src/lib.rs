//! Optimal consumption and investment with a consumption-peak habit, a
//! drawdown floor `c ≥ λh` and absolute risk aversion that switches from `β1`
//! to `β2` at the reference level `αh`.
//!
//! The value function is obtained in closed form through its convex dual.
//! [`Model`] bundles validated parameters with the dual constants and a cache
//! of per-`h` coefficients; every other operation takes a `&Model`.

pub mod analysis;
pub mod dual;
pub mod error;
pub mod inversion;
pub mod jet;
pub mod model;
pub mod params;
pub mod policy;
pub mod quad;
pub mod roots;
pub mod simulate;
pub mod thresholds;

pub use analysis::{
    beta1_limit, limiting_case, pointwise_trend, run_sweep, Beta1Limit, LimitDirection, LimitReport, SweepParam,
    SweepQuantity, SweepRow, SweepSpec, Trend, XGrid,
};
pub use dual::{
    coefficients, dual_constants, smooth_fit_residuals, Branch, CoefficientSet, DualConstants, DualSlice,
    ReferenceCase, ResidualReport,
};
pub use error::{Error, Result};
pub use inversion::{dual_value, f_h, f_x, invert, primal_value, DualPoint, DualValue};
pub use jet::{Jet, Scalar};
pub use model::{HSlice, Model, SolverConfig};
pub use params::{
    classify_region, validate, ModelParams, Phi, PhiKind, PhiSpec, RegionLabel, StatePoint, ValidatedParams, Variant,
};
pub use policy::{
    evaluate_policy, mpc_jump_ratio, mpc_turning_point, proportion_profile, PolicyEvaluation, ProportionProfile,
};
pub use simulate::{
    budget_functional, budget_functional_multi, simulate_dual, simulate_primal, solve_y_star, solve_y_star_with_probes,
    truncation_bound, BudgetEstimate, DualPathRecord, PathRecord, Scheme, SimConfig, YStar,
};
pub use thresholds::{
    bliss_concavity_threshold, bliss_inverse, thresholds_at, thresholds_on_grid, w_updt_jet, ThresholdSet,
};

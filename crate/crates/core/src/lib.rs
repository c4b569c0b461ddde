//! Closed-form solution engine for the Lucas-Uzawa endogenous growth model
//! with human-capital externalities.
//!
//! The crate evaluates the model's closed-form solution families in both
//! transformed and original variables, computes balanced-growth-path
//! analytics and growth rates, and independently verifies every trajectory
//! against the Pontryagin first-order-condition ODE system.
//!
//! Layout:
//!
//! - [`params`]: structural parameters, validation, and the state
//!   transformation onto the basic two-sector model.
//! - [`bgp`]: balanced-growth-path quantities in both variable sets.
//! - [`kernel`]: the transition variable z(t) and the quadrature kernels
//!   F(t), G(t) with infinite-horizon limits.
//! - [`closed_form`]: integration constants and pointwise evaluation of the
//!   five solution families.
//! - [`foc`]: the first-order-condition ODE system, an adaptive integrator,
//!   and residual reports for arbitrary trajectory closures.
//! - [`growth`]: analytic growth-rate formulas and a finite-difference
//!   cross-checker.

pub mod bgp;
pub mod closed_form;
pub mod error;
pub mod foc;
pub mod growth;
pub mod kernel;
pub mod params;
pub mod quadrature;

mod roots;

pub use bgp::{bgp_summary, bgp_summary_transformed, BgpSummary};
pub use closed_form::{
    derive_constants_sigma_beta, derive_constants_sol1, derive_constants_sol2,
    derive_constants_sol3, eval_general, eval_log, eval_sigma_beta, to_original, LogPoint,
    SolutionConstants, SolutionFamily, TrajectoryPoint,
};
pub use error::ModelError;
pub use foc::{foc_rhs, integrate, residual_report, FocDerivs, FocState, FocTrajectory, ResidualReport};
pub use growth::{
    growth_dynamic, growth_finite_diff, growth_rates_at, growth_sigma_beta, growth_static,
    GrowthRates,
};
pub use kernel::KernelContext;
pub use params::{
    inverse_transform_state, to_transformed, transform_state, validate, ModelParams,
    TransformedParams, ValidatedParams,
};
pub use quadrature::QuadratureResult;

use thiserror::Error;

/// Errors produced by parameter validation, constant derivation, and
/// trajectory evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A structural parameter violates one of its hard bounds.
    #[error("parameter `{0}` is outside its admissible range")]
    OutOfRange(&'static str),

    /// sigma = 1 (log utility) is excluded from the model.
    #[error("parameter `sigma` must differ from 1 (log utility is not supported)")]
    SigmaIsOne,

    /// A state value that must be strictly positive is not.
    #[error("state value must be strictly positive")]
    NonPositiveState,

    /// The initial transition ratio z0 = u0*h0*/k0 must be strictly positive.
    #[error("initial transition ratio z0 must be strictly positive")]
    NonPositiveZ0,

    /// The balanced-growth parameter window does not hold.
    #[error("parameters violate the balanced-growth window rho*(1-beta) < delta*(1-beta+theta) < rho*(1-beta) + delta*sigma*(1-beta+theta)")]
    WindowViolated,

    /// Adaptive quadrature exhausted its evaluation budget.
    #[error("quadrature failed to reach the requested tolerance within the evaluation budget")]
    NonConvergent,

    /// The bracketing scan for the labor share u0 found no sign change in (0, 1].
    #[error("no labor share u0 in (0, 1] satisfies the consistency relation")]
    NoRoot,

    /// A SigmaBeta solution family was requested with sigma != beta.
    #[error("solution family requires sigma = beta")]
    SigmaBetaMismatch,

    /// An intermediate base of a fractional power was non-positive, which
    /// signals inconsistent solution constants.
    #[error("evaluation left the domain of the closed form (non-positive intermediate)")]
    EvalDomain,

    /// The adaptive integrator could not continue (positivity violation or
    /// step underflow). Expected behavior off the saddle path.
    #[error("integration step failure: {0}")]
    StepFailure(String),
}

//! Structural parameters, the admissible parameter window, and the state
//! transformation that maps the externality model onto the basic two-sector
//! model.
//!
//! The transformation replaces human capital `h` and its costate `mu` by
//! `h* = h^phi` and `mu* = mu / (phi * h^(phi-1))` with
//! `phi = (1 - beta + theta) / (1 - beta)` and `delta* = delta * phi`. For
//! `theta = 0` both maps are identities.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Raw structural parameters as supplied by the user (e.g. from a JSON file).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Inverse of the intertemporal elasticity of substitution (> 0, != 1).
    pub sigma: f64,
    /// Discount rate (> 0).
    pub rho: f64,
    /// Elasticity of output with respect to physical capital (in (0, 1)).
    pub beta: f64,
    /// Technology level of the goods sector (> 0).
    pub gamma: f64,
    /// Depreciation rate of physical capital (>= 0).
    pub pi: f64,
    /// Technology level of the education sector (> 0).
    pub delta: f64,
    /// Human-capital externality exponent (>= 0).
    pub theta: f64,
}

/// Parameters that passed [`validate`]. Immutable, safe to share across
/// threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams {
    params: ModelParams,
    bgp_window_satisfied: bool,
}

/// Derived constants of the externality-absorbing state transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedParams {
    /// Exponent (1 - beta + theta) / (1 - beta); equals 1 iff theta = 0.
    pub phi: f64,
    /// Education technology of the transformed model, delta * phi.
    pub delta_star: f64,
}

const SIGMA_ONE_TOL: f64 = 1e-12;

/// Checks the hard parameter bounds and evaluates the balanced-growth window
/// of the model.
///
/// The window `rho*(1-beta) < delta*(1-beta+theta) < rho*(1-beta) +
/// delta*sigma*(1-beta+theta)` is recorded as a flag rather than enforced:
/// closed-form evaluators reject parameters outside it, but the first-order
/// condition oracle can still integrate there.
pub fn validate(raw: ModelParams) -> Result<ValidatedParams, ModelError> {
    let ModelParams {
        sigma,
        rho,
        beta,
        gamma,
        pi,
        delta,
        theta,
    } = raw;

    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(ModelError::OutOfRange("sigma"));
    }
    if (sigma - 1.0).abs() < SIGMA_ONE_TOL {
        return Err(ModelError::SigmaIsOne);
    }
    if !rho.is_finite() || rho <= 0.0 {
        return Err(ModelError::OutOfRange("rho"));
    }
    if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
        return Err(ModelError::OutOfRange("beta"));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(ModelError::OutOfRange("gamma"));
    }
    if !pi.is_finite() || pi < 0.0 {
        return Err(ModelError::OutOfRange("pi"));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(ModelError::OutOfRange("delta"));
    }
    if !theta.is_finite() || theta < 0.0 {
        return Err(ModelError::OutOfRange("theta"));
    }

    let lower = rho * (1.0 - beta);
    let mid = delta * (1.0 - beta + theta);
    let upper = lower + delta * sigma * (1.0 - beta + theta);
    let bgp_window_satisfied = lower < mid && mid < upper;

    Ok(ValidatedParams {
        params: raw,
        bgp_window_satisfied,
    })
}

impl ValidatedParams {
    pub fn sigma(&self) -> f64 {
        self.params.sigma
    }

    pub fn rho(&self) -> f64 {
        self.params.rho
    }

    pub fn beta(&self) -> f64 {
        self.params.beta
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn pi(&self) -> f64 {
        self.params.pi
    }

    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    pub fn theta(&self) -> f64 {
        self.params.theta
    }

    pub fn raw(&self) -> ModelParams {
        self.params
    }

    /// Whether the balanced-growth window of the model holds.
    pub fn bgp_window_satisfied(&self) -> bool {
        self.bgp_window_satisfied
    }

    /// Returns `WindowViolated` unless the balanced-growth window holds.
    pub fn require_window(&self) -> Result<(), ModelError> {
        if self.bgp_window_satisfied {
            Ok(())
        } else {
            Err(ModelError::WindowViolated)
        }
    }
}

/// Computes the transformation constants phi and delta*.
pub fn to_transformed(p: &ValidatedParams) -> TransformedParams {
    let phi = (1.0 - p.beta() + p.theta()) / (1.0 - p.beta());
    TransformedParams {
        phi,
        delta_star: p.delta() * phi,
    }
}

/// Maps `(h, mu)` of the externality model to `(h*, mu*)` of the basic model.
pub fn transform_state(h: f64, mu: f64, p: &ValidatedParams) -> Result<(f64, f64), ModelError> {
    if h.is_nan() || h <= 0.0 {
        return Err(ModelError::NonPositiveState);
    }
    let phi = to_transformed(p).phi;
    let h_star = h.powf(phi);
    let mu_star = mu / phi * h.powf(1.0 - phi);
    Ok((h_star, mu_star))
}

/// Exact algebraic inverse of [`transform_state`]:
/// `h = (h*)^(1/phi)`, `mu = phi * mu* * (h*)^((phi-1)/phi)`.
pub fn inverse_transform_state(
    h_star: f64,
    mu_star: f64,
    p: &ValidatedParams,
) -> Result<(f64, f64), ModelError> {
    if h_star.is_nan() || h_star <= 0.0 {
        return Err(ModelError::NonPositiveState);
    }
    let phi = to_transformed(p).phi;
    let h = h_star.powf(1.0 / phi);
    let mu = phi * mu_star * h_star.powf((phi - 1.0) / phi);
    Ok((h, mu))
}

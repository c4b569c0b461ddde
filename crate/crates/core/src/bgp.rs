//! Balanced-growth-path quantities in original and transformed variables.
//!
//! [`bgp_summary`] works directly from the structural parameters of the
//! externality model; [`bgp_summary_transformed`] works from the transformed
//! constants (delta*, sigma, ...). Both describe the same steady state and
//! agree to rounding, which the tests exploit as a dual-route check.

use serde::Serialize;

use crate::error::ModelError;
use crate::params::{to_transformed, ValidatedParams};

/// Steady-state growth rates and ratios on the balanced growth path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BgpSummary {
    /// Asymptotic growth rate of consumption.
    pub g_c: f64,
    /// Asymptotic growth rate of physical capital.
    pub g_k: f64,
    /// Asymptotic growth rate of human capital (original variable).
    pub g_h: f64,
    /// Asymptotic growth rate of transformed human capital h* = h^phi.
    pub g_hstar: f64,
    /// Asymptotic growth rate of the goods-sector labor share (zero).
    pub g_u: f64,
    /// Steady labor share in goods production.
    pub u_bar: f64,
    /// Steady consumption/capital ratio.
    pub xi: f64,
    /// Steady transition ratio z = u h* / k.
    pub z_bar: f64,
    /// Steady k / h^phi ratio (equivalently k / h* = u_bar / z_bar).
    pub k_over_hphi: f64,
}

/// Balanced-growth-path summary from the original structural parameters.
pub fn bgp_summary(p: &ValidatedParams) -> Result<BgpSummary, ModelError> {
    p.require_window()?;
    let (sigma, rho, beta, gamma, pi, delta, theta) = (
        p.sigma(),
        p.rho(),
        p.beta(),
        p.gamma(),
        p.pi(),
        p.delta(),
        p.theta(),
    );
    let one_b = 1.0 - beta;
    let one_bt = 1.0 - beta + theta;

    let num = (delta - rho) * one_b + delta * theta;
    let g_c = num / (sigma * one_b);
    let g_h = num / (sigma * one_bt);
    let u_bar =
        ((rho - delta + sigma * delta) * one_b + delta * theta * (sigma - 1.0)) / (delta * sigma * one_bt);
    let xi = (delta * one_bt + pi * one_b * one_b) / (beta * one_b)
        - (delta * one_bt - rho * one_b) / (sigma * one_b);
    let z_bar =
        (beta * gamma * one_b / (delta * one_bt + pi * one_b)).powf(1.0 / (beta - 1.0));
    let k_over_hphi = u_bar / z_bar;
    let phi = one_bt / one_b;

    Ok(BgpSummary {
        g_c,
        g_k: g_c,
        g_h,
        g_hstar: phi * g_h,
        g_u: 0.0,
        u_bar,
        xi,
        z_bar,
        k_over_hphi,
    })
}

/// Balanced-growth-path summary computed in the transformed variables
/// (k, h*, delta*), where the model reduces to the basic two-sector form:
/// g = (delta* - rho)/sigma, u_bar = (rho + delta*(sigma-1))/(delta* sigma),
/// xi = (delta* + pi(1-beta))/beta - (delta* - rho)/sigma.
pub fn bgp_summary_transformed(p: &ValidatedParams) -> Result<BgpSummary, ModelError> {
    p.require_window()?;
    let tp = to_transformed(p);
    let (sigma, rho, beta, gamma, pi) = (p.sigma(), p.rho(), p.beta(), p.gamma(), p.pi());
    let ds = tp.delta_star;

    let g = (ds - rho) / sigma;
    let u_bar = (rho + ds * (sigma - 1.0)) / (ds * sigma);
    let xi = (ds + pi * (1.0 - beta)) / beta - g;
    let z_bar = ((ds + pi) / (beta * gamma)).powf(1.0 / (1.0 - beta));
    let k_over_hphi = u_bar / z_bar;

    Ok(BgpSummary {
        g_c: g,
        g_k: g,
        g_h: g / tp.phi,
        g_hstar: g,
        g_u: 0.0,
        u_bar,
        xi,
        z_bar,
        k_over_hphi,
    })
}

//! Integration constants and pointwise evaluation of the five closed-form
//! solution families.
//!
//! Families and their free inputs:
//!
//! - `General1` (k0): the exact balanced growth path; every ratio is pinned.
//! - `General2` (k0, h0): transition dynamics expressed through z(t) and the
//!   kernel F(t); the labor share u0 solves a scalar consistency relation.
//! - `General3` (k0, h0): same c, k, lambda, mu* expressions as `General2`
//!   but h* and u written through both kernels F and G; u0 solves the
//!   G-limit relation.
//! - `SigmaBeta1`, `SigmaBeta2`: the sigma = beta specializations, written
//!   directly in original variables.
//!
//! Evaluation works in log space throughout. The factors that the textbook
//! formulas express as differences against infinite-horizon limits
//! (F_lim - F(t) and the G bracket) are computed as tail integrals
//! e^(-xi t) QF(t), which is exact on the saddle path and free of the
//! catastrophic cancellation the raw difference suffers once t exceeds a few
//! multiples of 1/xi.

use serde::Serialize;

use crate::bgp::bgp_summary_transformed;
use crate::error::ModelError;
use crate::kernel::KernelContext;
use crate::params::{to_transformed, ValidatedParams};
use crate::roots::bracket_and_bisect;

/// Base quadrature tolerance used while deriving constants and evaluating
/// trajectories; scaled by the magnitude of the tail integrals.
const QUAD_TOL: f64 = 1e-13;

fn quad_tol(ctx: &KernelContext) -> f64 {
    QUAD_TOL * ctx.tail_scale().max(1.0)
}
/// Number of scan points for the u0 bracketing scan over (0, 1].
const U0_SCAN_POINTS: usize = 64;
const U0_SCAN_LO: f64 = 1e-4;
const SIGMA_BETA_TOL: f64 = 1e-12;

/// Tags for the closed-form solution families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionFamily {
    General1,
    General2,
    General3,
    SigmaBeta1,
    SigmaBeta2,
}

impl SolutionFamily {
    pub fn is_general(self) -> bool {
        matches!(
            self,
            SolutionFamily::General1 | SolutionFamily::General2 | SolutionFamily::General3
        )
    }

    pub fn is_sigma_beta(self) -> bool {
        !self.is_general()
    }

    /// Families whose labor share varies over the transition.
    pub fn has_dynamic_labor_share(self) -> bool {
        matches!(self, SolutionFamily::General2 | SolutionFamily::General3)
    }
}

impl std::fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self {
            SolutionFamily::General1 => "General1",
            SolutionFamily::General2 => "General2",
            SolutionFamily::General3 => "General3",
            SolutionFamily::SigmaBeta1 => "SigmaBeta1",
            SolutionFamily::SigmaBeta2 => "SigmaBeta2",
        };
        f.write_str(tag)
    }
}

impl std::str::FromStr for SolutionFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "General1" => Ok(SolutionFamily::General1),
            "General2" => Ok(SolutionFamily::General2),
            "General3" => Ok(SolutionFamily::General3),
            "SigmaBeta1" => Ok(SolutionFamily::SigmaBeta1),
            "SigmaBeta2" => Ok(SolutionFamily::SigmaBeta2),
            other => Err(format!(
                "unknown family `{other}` (expected General1|General2|General3|SigmaBeta1|SigmaBeta2)"
            )),
        }
    }
}

/// Per-family integration constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionConstants {
    pub family: SolutionFamily,
    pub c0: f64,
    pub k0: f64,
    pub h0_star: f64,
    pub u0: f64,
    pub z0: f64,
    pub c1: f64,
}

/// All state and costate values at one time, in both variable sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub c: f64,
    pub k: f64,
    pub h: f64,
    pub h_star: f64,
    pub u: f64,
    pub lambda: f64,
    pub mu: f64,
    pub mu_star: f64,
    pub z: f64,
}

/// Natural logarithms of the six transformed-model components. This is the
/// primitive evaluation result; it stays finite for arbitrarily large t where
/// the linear values would overflow or underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPoint {
    pub t: f64,
    pub ln_c: f64,
    pub ln_k: f64,
    pub ln_h_star: f64,
    pub ln_u: f64,
    pub ln_lambda: f64,
    pub ln_mu_star: f64,
}

impl LogPoint {
    /// Exponentiates into a [`TrajectoryPoint`], adding the original-variable
    /// fields via the inverse state transform.
    pub fn to_point(&self, p: &ValidatedParams) -> TrajectoryPoint {
        let phi = to_transformed(p).phi;
        TrajectoryPoint {
            t: self.t,
            c: self.ln_c.exp(),
            k: self.ln_k.exp(),
            h: (self.ln_h_star / phi).exp(),
            h_star: self.ln_h_star.exp(),
            u: self.ln_u.exp(),
            lambda: self.ln_lambda.exp(),
            mu: phi * (self.ln_mu_star + (phi - 1.0) / phi * self.ln_h_star).exp(),
            mu_star: self.ln_mu_star.exp(),
            z: (self.ln_u + self.ln_h_star - self.ln_k).exp(),
        }
    }
}

fn require_positive(value: f64, _name: &'static str) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::NonPositiveState)
    }
}

/// Back-solves the costate scale c1 from c0 and z0 so that the static
/// allocation condition holds at t = 0.
fn c1_from(p: &ValidatedParams, c0: f64, z0: f64) -> f64 {
    let ds = to_transformed(p).delta_star;
    (1.0 - p.beta()) * p.gamma() / (ds * z0.powf(p.beta()) * c0.powf(p.sigma()))
}

/// Constants of the balanced-growth family: c0/k0 = xi, u0 = u_bar,
/// z0 = z_bar, h0* = z_bar k0 / u_bar.
pub fn derive_constants_sol1(
    p: &ValidatedParams,
    k0: f64,
) -> Result<SolutionConstants, ModelError> {
    p.require_window()?;
    require_positive(k0, "k0")?;
    let bgp = bgp_summary_transformed(p)?;
    let c0 = bgp.xi * k0;
    let z0 = bgp.z_bar;
    Ok(SolutionConstants {
        family: SolutionFamily::General1,
        c0,
        k0,
        h0_star: bgp.z_bar * k0 / bgp.u_bar,
        u0: bgp.u_bar,
        z0,
        c1: c1_from(p, c0, z0),
    })
}

/// Shared scaffold for the General2/General3 derivations: both take (k0, h0),
/// eliminate c0 through the F-limit identity c0 = k0 z0^p / lim F, and
/// root-find u0 in (0, 1] on a family-specific residual.
fn derive_transition_constants(
    p: &ValidatedParams,
    k0: f64,
    h0: f64,
    family: SolutionFamily,
) -> Result<SolutionConstants, ModelError> {
    p.require_window()?;
    require_positive(k0, "k0")?;
    require_positive(h0, "h0")?;
    let tp = to_transformed(p);
    let (sigma, rho, beta, gamma, pi) = (p.sigma(), p.rho(), p.beta(), p.gamma(), p.pi());
    let ds = tp.delta_star;
    let h0_star = h0.powf(tp.phi);

    let c0_of = |z0: f64| -> Result<(f64, KernelContext), ModelError> {
        let ctx = KernelContext::new(p, z0)?;
        let flim = ctx.f_limit(quad_tol(&ctx))?;
        Ok((k0 * z0.powf(ctx.p_exp) / flim, ctx))
    };

    let residual = |u0: f64| -> Result<f64, ModelError> {
        let z0 = u0 * h0_star / k0;
        let (c0, ctx) = c0_of(z0)?;
        match family {
            SolutionFamily::General2 => {
                let d = sigma * c0 * z0.powf(beta - 1.0)
                    - (rho + pi - pi * sigma) * k0 * z0.powf(beta - 1.0)
                    + beta * gamma * (1.0 - sigma) * k0;
                let target = gamma * (1.0 - beta) * (rho - ds + ds * sigma) / ds;
                Ok(u0 / k0 * d - target)
            }
            SolutionFamily::General3 => {
                let flim = k0 * z0.powf(ctx.p_exp) / c0;
                let glim = ctx.g_limit(quad_tol(&ctx))?;
                Ok(ds * u0 * glim - (ctx.decay_a + ds * u0) * flim)
            }
            _ => unreachable!("transition constants exist only for General2/General3"),
        }
    };

    let u0 = bracket_and_bisect(residual, U0_SCAN_LO, 1.0, U0_SCAN_POINTS)?;
    let z0 = u0 * h0_star / k0;
    let (c0, _ctx) = c0_of(z0)?;
    Ok(SolutionConstants {
        family,
        c0,
        k0,
        h0_star,
        u0,
        z0,
        c1: c1_from(p, c0, z0),
    })
}

/// Constants for the second family: u0 solves the labor-share consistency
/// relation with c0 eliminated via the F-limit identity.
pub fn derive_constants_sol2(
    p: &ValidatedParams,
    k0: f64,
    h0: f64,
) -> Result<SolutionConstants, ModelError> {
    derive_transition_constants(p, k0, h0, SolutionFamily::General2)
}

/// Constants for the third family: u0 solves the G-limit relation
/// lim G = ((A + delta* u0) / (delta* u0)) lim F.
pub fn derive_constants_sol3(
    p: &ValidatedParams,
    k0: f64,
    h0: f64,
) -> Result<SolutionConstants, ModelError> {
    derive_transition_constants(p, k0, h0, SolutionFamily::General3)
}

/// Constants for the sigma = beta families. `SigmaBeta1` pins everything to
/// the balanced growth path from k0 alone; `SigmaBeta2` additionally takes
/// h0, with u0 = u_bar and c0 = xi k0 (at sigma = beta the F-limit identity
/// forces exactly these values, so no root finding is needed).
pub fn derive_constants_sigma_beta(
    p: &ValidatedParams,
    family: SolutionFamily,
    k0: f64,
    h0: Option<f64>,
) -> Result<SolutionConstants, ModelError> {
    if (p.sigma() - p.beta()).abs() > SIGMA_BETA_TOL {
        return Err(ModelError::SigmaBetaMismatch);
    }
    p.require_window()?;
    match family {
        SolutionFamily::SigmaBeta1 => {
            let mut consts = derive_constants_sol1(p, k0)?;
            consts.family = SolutionFamily::SigmaBeta1;
            Ok(consts)
        }
        SolutionFamily::SigmaBeta2 => {
            require_positive(k0, "k0")?;
            let bgp = bgp_summary_transformed(p)?;
            let h0 = h0.ok_or(ModelError::NonPositiveState)?;
            require_positive(h0, "h0")?;
            let h0_star = h0.powf(to_transformed(p).phi);
            let u0 = bgp.u_bar;
            let z0 = u0 * h0_star / k0;
            let c0 = bgp.xi * k0;
            Ok(SolutionConstants {
                family: SolutionFamily::SigmaBeta2,
                c0,
                k0,
                h0_star,
                u0,
                z0,
                c1: c1_from(p, c0, z0),
            })
        }
        _ => Err(ModelError::SigmaBetaMismatch),
    }
}

/// Evaluates any family in log space. This is the primitive every other
/// evaluation routine builds on; it stays finite for time horizons where the
/// linear state values would overflow.
pub fn eval_log(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<LogPoint, ModelError> {
    match consts.family {
        SolutionFamily::General1 => eval_log_bgp(consts, p, t),
        SolutionFamily::General2 => eval_log_general2(consts, p, t),
        SolutionFamily::General3 => eval_log_general3(consts, p, t),
        SolutionFamily::SigmaBeta1 => eval_log_sigma_beta1(consts, p, t),
        SolutionFamily::SigmaBeta2 => eval_log_sigma_beta2(consts, p, t),
    }
}

fn eval_log_bgp(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<LogPoint, ModelError> {
    let tp = to_transformed(p);
    let g = (tp.delta_star - p.rho()) / p.sigma();
    let ln_c = consts.c0.ln() + g * t;
    Ok(LogPoint {
        t,
        ln_c,
        ln_k: consts.k0.ln() + g * t,
        ln_h_star: consts.h0_star.ln() + g * t,
        ln_u: consts.u0.ln(),
        ln_lambda: -p.sigma() * ln_c,
        ln_mu_star: consts.c1.ln() + (p.rho() - tp.delta_star) * t,
    })
}

fn eval_log_general2(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<LogPoint, ModelError> {
    let tp = to_transformed(p);
    let (sigma, rho, beta, gamma, pi) = (p.sigma(), p.rho(), p.beta(), p.gamma(), p.pi());
    let ds = tp.delta_star;
    let g = (ds - rho) / sigma;
    let ctx = KernelContext::new(p, consts.z0)?;

    let z = ctx.z_path(t);
    let ln_z = z.ln();
    let ln_z0 = consts.z0.ln();
    let ln_scale = consts.c0.ln() + beta / sigma * ln_z0;

    let ln_c = ln_scale - beta / sigma * ln_z + g * t;

    let qf = ctx.f_tail_detrended(t, quad_tol(&ctx))?;
    // Detrended (growth-free) capital and consumption.
    let k_det = qf * (ln_scale - ln_z).exp();
    let c_det = (ln_scale - beta / sigma * ln_z).exp();
    let ln_k = k_det.ln() + g * t;

    // h* = (h0*/(z0 D)) z [sigma c z^(beta-1) + (beta gamma (1-sigma)
    //      - (rho+pi-pi sigma) z^(beta-1)) k], with the common e^(g t) factor
    // pulled out of the bracket.
    let d = sigma * consts.c0 * consts.z0.powf(beta - 1.0)
        - (rho + pi - pi * sigma) * consts.k0 * consts.z0.powf(beta - 1.0)
        + beta * gamma * (1.0 - sigma) * consts.k0;
    let w = z.powf(beta - 1.0);
    let bracket =
        sigma * c_det * w + (beta * gamma * (1.0 - sigma) - (rho + pi - pi * sigma) * w) * k_det;
    if bracket.is_nan() || bracket <= 0.0 || d.is_nan() || d <= 0.0 {
        return Err(ModelError::EvalDomain);
    }
    let ln_h_star = consts.h0_star.ln() - (consts.z0 * d).ln() + ln_z + bracket.ln() + g * t;

    Ok(LogPoint {
        t,
        ln_c,
        ln_k,
        ln_h_star,
        ln_u: ln_z + ln_k - ln_h_star,
        ln_lambda: -sigma * ln_c,
        ln_mu_star: consts.c1.ln() + (rho - ds) * t,
    })
}

fn eval_log_general3(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<LogPoint, ModelError> {
    let tp = to_transformed(p);
    let (sigma, rho, beta) = (p.sigma(), p.rho(), p.beta());
    let ds = tp.delta_star;
    let g = (ds - rho) / sigma;
    let ctx = KernelContext::new(p, consts.z0)?;

    let z = ctx.z_path(t);
    let ln_z = z.ln();
    let ln_scale = consts.c0.ln() + beta / sigma * consts.z0.ln();

    let ln_c = ln_scale - beta / sigma * ln_z + g * t;

    let qf = ctx.f_tail_detrended(t, quad_tol(&ctx))?;
    let qg = ctx.g_tail_detrended(t, quad_tol(&ctx))?;
    let diff = qg - qf;
    if diff.is_nan() || diff <= 0.0 || qf.is_nan() || qf <= 0.0 {
        return Err(ModelError::EvalDomain);
    }
    let ln_k = qf.ln() + ln_scale - ln_z + g * t;

    // h* = delta* u0 C (QG - QF) e^(g t) with C = c0 z0^(beta/sigma)/(A u0);
    // u = A QF / (delta* (QG - QF)).
    let ln_c_pref = ln_scale - (ctx.decay_a * consts.u0).ln();
    let ln_h_star = (ds * consts.u0).ln() + ln_c_pref + diff.ln() + g * t;
    let ln_u = ctx.decay_a.ln() + qf.ln() - ds.ln() - diff.ln();

    Ok(LogPoint {
        t,
        ln_c,
        ln_k,
        ln_h_star,
        ln_u,
        ln_lambda: -sigma * ln_c,
        ln_mu_star: consts.c1.ln() + (rho - ds) * t,
    })
}

/// Constant growth-rate pieces of the sigma = beta families, in original
/// variables.
struct SigmaBetaRates {
    g_ck: f64,
    g_h: f64,
    g_lambda: f64,
    g_mu: f64,
}

fn sigma_beta_rates(p: &ValidatedParams) -> SigmaBetaRates {
    let (rho, beta, delta, theta) = (p.rho(), p.beta(), p.delta(), p.theta());
    let one_b = 1.0 - beta;
    let one_bt = 1.0 - beta + theta;
    let up = (delta - rho) * one_b + delta * theta;
    let down = (rho - delta) * one_b - delta * theta;
    SigmaBetaRates {
        g_ck: up / (beta * one_b),
        g_h: up / (beta * one_bt),
        g_lambda: down / one_b,
        g_mu: down * (beta - theta) / (beta * one_bt),
    }
}

fn check_sigma_beta(p: &ValidatedParams) -> Result<(), ModelError> {
    if (p.sigma() - p.beta()).abs() > SIGMA_BETA_TOL {
        return Err(ModelError::SigmaBetaMismatch);
    }
    p.require_window()
}

fn sigma_beta_mu_star_log(
    p: &ValidatedParams,
    consts: &SolutionConstants,
    ln_h: f64,
    t: f64,
) -> f64 {
    // The family states its costate as mu(t) = phi h0^(phi-1) c1 e^(g_mu t);
    // map it back to mu* through the inverse of the state transform.
    let phi = to_transformed(p).phi;
    let rates = sigma_beta_rates(p);
    let ln_h0 = consts.h0_star.ln() / phi;
    let ln_mu = phi.ln() + (phi - 1.0) * ln_h0 + consts.c1.ln() + rates.g_mu * t;
    ln_mu - phi.ln() - (phi - 1.0) * ln_h
}

fn eval_log_sigma_beta1(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<LogPoint, ModelError> {
    check_sigma_beta(p)?;
    let phi = to_transformed(p).phi;
    let rates = sigma_beta_rates(p);
    let ln_h = consts.h0_star.ln() / phi + rates.g_h * t;
    Ok(LogPoint {
        t,
        ln_c: consts.c0.ln() + rates.g_ck * t,
        ln_k: consts.k0.ln() + rates.g_ck * t,
        ln_h_star: phi * ln_h,
        ln_u: consts.u0.ln(),
        ln_lambda: -p.beta() * consts.c0.ln() + rates.g_lambda * t,
        ln_mu_star: sigma_beta_mu_star_log(p, consts, ln_h, t),
    })
}

fn eval_log_sigma_beta2(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<LogPoint, ModelError> {
    check_sigma_beta(p)?;
    let phi = to_transformed(p).phi;
    let rates = sigma_beta_rates(p);
    let ctx = KernelContext::new(p, consts.z0)?;
    let ln_z = ctx.z_path(t).ln();
    let ln_z0 = consts.z0.ln();
    let ln_h = consts.h0_star.ln() / phi + rates.g_h * t;
    Ok(LogPoint {
        t,
        ln_c: consts.c0.ln() + ln_z0 + rates.g_ck * t - ln_z,
        ln_k: consts.k0.ln() + ln_z0 + rates.g_ck * t - ln_z,
        ln_h_star: phi * ln_h,
        ln_u: consts.u0.ln(),
        ln_lambda: -p.beta() * (consts.c0.ln() + ln_z0) + rates.g_lambda * t + p.beta() * ln_z,
        ln_mu_star: sigma_beta_mu_star_log(p, consts, ln_h, t),
    })
}

/// Evaluates one of the general families (General1/2/3) at time t.
pub fn eval_general(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<TrajectoryPoint, ModelError> {
    assert!(
        consts.family.is_general(),
        "eval_general called with {}",
        consts.family
    );
    Ok(eval_log(consts, p, t)?.to_point(p))
}

/// Evaluates one of the sigma = beta families at time t.
pub fn eval_sigma_beta(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<TrajectoryPoint, ModelError> {
    assert!(
        consts.family.is_sigma_beta(),
        "eval_sigma_beta called with {}",
        consts.family
    );
    Ok(eval_log(consts, p, t)?.to_point(p))
}

/// Recomputes the original-variable fields (h, mu) of a point from its
/// transformed fields. Idempotent.
pub fn to_original(point: &TrajectoryPoint, p: &ValidatedParams) -> TrajectoryPoint {
    let phi = to_transformed(p).phi;
    let mut out = *point;
    out.h = point.h_star.powf(1.0 / phi);
    out.mu = phi * point.mu_star * point.h_star.powf((phi - 1.0) / phi);
    out
}

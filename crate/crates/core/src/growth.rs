//! Analytic growth-rate formulas for each solution family, plus a
//! finite-difference cross-checker.
//!
//! The balanced-growth family has constant rates. The transition families
//! carry z-dependent corrections: consumption picks up -(beta/sigma) zdot/z,
//! capital the kernel quotient z^p e^(-xi t)/(F_lim - F(t)) (evaluated in its
//! stable detrended form z^p/QF(t)), and the costate of human capital
//! follows mudot/mu = rho - delta - theta delta u(t)/(1-beta), which is
//! constant whenever u is (theta = 0 or the BGP) and converges to the
//! balanced-growth value as t grows.

use serde::Serialize;

use crate::closed_form::{eval_log, SolutionConstants, SolutionFamily, TrajectoryPoint};
use crate::error::ModelError;
use crate::kernel::KernelContext;
use crate::params::{to_transformed, ValidatedParams};

const QUAD_TOL: f64 = 1e-13;
const FD_STEP: f64 = 1e-4;

fn quad_tol(ctx: &KernelContext) -> f64 {
    QUAD_TOL * ctx.tail_scale().max(1.0)
}

/// Growth rates of the six trajectory components at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRates {
    pub family: SolutionFamily,
    pub t: f64,
    pub g_c: f64,
    pub g_k: f64,
    pub g_h: f64,
    pub g_u: f64,
    pub g_lambda: f64,
    pub g_mu: f64,
}

/// Constant growth rates of the balanced-growth family, in original
/// variables.
pub fn growth_static(p: &ValidatedParams) -> Result<GrowthRates, ModelError> {
    p.require_window()?;
    let (sigma, rho, beta, delta, theta) = (p.sigma(), p.rho(), p.beta(), p.delta(), p.theta());
    let one_b = 1.0 - beta;
    let one_bt = 1.0 - beta + theta;
    let up = (delta - rho) * one_b + delta * theta;
    let down = (rho - delta) * one_b - delta * theta;
    let g_lambda = down / one_b;
    Ok(GrowthRates {
        family: SolutionFamily::General1,
        t: 0.0,
        g_c: up / (sigma * one_b),
        g_k: up / (sigma * one_b),
        g_h: up / (sigma * one_bt),
        g_u: 0.0,
        g_lambda,
        g_mu: g_lambda * (sigma * one_bt - theta) / (sigma * one_bt),
    })
}

/// Time-varying growth rates of the General2/General3 transition families.
///
/// For General2 the human-capital rate uses the composite closed formula in
/// (z, c/k, cdot/c, zdot/z, kdot/k); for General3 no closed formula is
/// available and central differences of log h are authoritative. The labor-share rate
/// is the decomposition udot/u = kdot/k - phi hdot/h + zdot/z.
pub fn growth_dynamic(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<GrowthRates, ModelError> {
    assert!(
        consts.family.has_dynamic_labor_share(),
        "growth_dynamic called with {}",
        consts.family
    );
    p.require_window()?;
    let tp = to_transformed(p);
    let (sigma, rho, beta, gamma, pi, delta, theta) = (
        p.sigma(),
        p.rho(),
        p.beta(),
        p.gamma(),
        p.pi(),
        p.delta(),
        p.theta(),
    );
    let stat = growth_static(p)?;

    let ctx = KernelContext::new(p, consts.z0)?;
    let z = ctx.z_path(t);
    let zdot = ctx.z_log_derivative(t);
    let qf = ctx.f_tail_detrended(t, quad_tol(&ctx))?;

    let g_c = stat.g_c - beta / sigma * zdot;
    // kdot/k = (pi(1-b)^2 + delta(1-b+t))/(b(1-b)) - z^p e^(-xi t)/(P - F(t)) - zdot/z,
    // with the quotient evaluated as z^p/QF(t).
    let prefactor_rate =
        (pi * (1.0 - beta) * (1.0 - beta) + delta * (1.0 - beta + theta)) / (beta * (1.0 - beta));
    let g_k = prefactor_rate - z.powf(ctx.p_exp) / qf - zdot;

    let g_h = match consts.family {
        SolutionFamily::General2 => {
            let w = z.powf(beta - 1.0);
            // c/k in detrended form: z^(1 - beta/sigma)/QF.
            let r = z.powf(1.0 - beta / sigma) / qf;
            let q = beta * gamma * (1.0 - sigma) - (rho + pi - pi * sigma) * w;
            let denom = sigma * w * r + q;
            let t1 = sigma * w * r / denom;
            let t2 = (sigma * beta * w * r - (rho + pi - pi * sigma) * (beta - 1.0) * w + q) / denom;
            let t3 = q / denom;
            (t1 * g_c + t2 * zdot + t3 * g_k) / tp.phi
        }
        SolutionFamily::General3 => {
            let lp = eval_log(consts, p, t + FD_STEP)?;
            let lm = eval_log(consts, p, t - FD_STEP)?;
            (lp.ln_h_star - lm.ln_h_star) / (2.0 * FD_STEP * tp.phi)
        }
        _ => unreachable!(),
    };

    let g_u = g_k - tp.phi * g_h + zdot;
    let g_lambda = stat.g_lambda + beta * zdot;
    // mudot/mu = rho - delta - theta delta u/(1-beta), exact for any u path.
    let u = eval_log(consts, p, t)?.ln_u.exp();
    let g_mu = rho - delta - theta * delta * u / (1.0 - beta);

    Ok(GrowthRates {
        family: consts.family,
        t,
        g_c,
        g_k,
        g_h,
        g_u,
        g_lambda,
        g_mu,
    })
}

/// Growth rates of the sigma = beta families. `SigmaBeta1` is constant;
/// `SigmaBeta2` subtracts zdot/z from the consumption and capital rates and
/// adds beta zdot/z to the rate of lambda.
pub fn growth_sigma_beta(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<GrowthRates, ModelError> {
    if (p.sigma() - p.beta()).abs() > 1e-12 {
        return Err(ModelError::SigmaBetaMismatch);
    }
    p.require_window()?;
    let (rho, beta, delta, theta) = (p.rho(), p.beta(), p.delta(), p.theta());
    let one_b = 1.0 - beta;
    let one_bt = 1.0 - beta + theta;
    let up = (delta - rho) * one_b + delta * theta;
    let down = (rho - delta) * one_b - delta * theta;
    let g_ck = up / (beta * one_b);
    let g_h = up / (beta * one_bt);
    let g_lambda = down / one_b;
    let g_mu = down * (beta - theta) / (beta * one_bt);

    let zdot = match consts.family {
        SolutionFamily::SigmaBeta1 => 0.0,
        SolutionFamily::SigmaBeta2 => KernelContext::new(p, consts.z0)?.z_log_derivative(t),
        _ => return Err(ModelError::SigmaBetaMismatch),
    };

    Ok(GrowthRates {
        family: consts.family,
        t,
        g_c: g_ck - zdot,
        g_k: g_ck - zdot,
        g_h,
        g_u: 0.0,
        g_lambda: g_lambda + beta * zdot,
        g_mu,
    })
}

/// Dispatches to the analytic growth-rate formula matching the family.
pub fn growth_rates_at(
    consts: &SolutionConstants,
    p: &ValidatedParams,
    t: f64,
) -> Result<GrowthRates, ModelError> {
    match consts.family {
        SolutionFamily::General1 => {
            let mut r = growth_static(p)?;
            r.t = t;
            Ok(r)
        }
        SolutionFamily::General2 | SolutionFamily::General3 => growth_dynamic(consts, p, t),
        SolutionFamily::SigmaBeta1 | SolutionFamily::SigmaBeta2 => growth_sigma_beta(consts, p, t),
    }
}

/// Central differences of the log of each trajectory component. Falls back
/// to a Richardson-extrapolated stencil when the component magnitudes span
/// more than six orders of magnitude.
pub fn growth_finite_diff<F>(
    traj: F,
    family: SolutionFamily,
    t: f64,
    h_step: f64,
) -> Result<GrowthRates, ModelError>
where
    F: Fn(f64) -> Result<TrajectoryPoint, ModelError>,
{
    if h_step.is_nan() || h_step <= 0.0 || t < 2.0 * h_step {
        return Err(ModelError::OutOfRange("h_step"));
    }
    let comps = |pt: &TrajectoryPoint| [pt.c, pt.k, pt.h, pt.u, pt.lambda, pt.mu];

    let p1 = traj(t + h_step)?;
    let m1 = traj(t - h_step)?;
    let (a1, b1) = (comps(&p1), comps(&m1));
    if a1.iter().chain(b1.iter()).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(ModelError::NonPositiveState);
    }

    let center = comps(&traj(t)?);
    let magnitude_span = center.iter().fold(0.0_f64, |m, v| m.max(*v))
        / center.iter().fold(f64::INFINITY, |m, v| m.min(*v));

    let mut rates = [0.0; 6];
    if magnitude_span > 1e6 {
        let p2 = traj(t + 2.0 * h_step)?;
        let m2 = traj(t - 2.0 * h_step)?;
        let (a2, b2) = (comps(&p2), comps(&m2));
        for i in 0..6 {
            let d1 = (a1[i].ln() - b1[i].ln()) / (2.0 * h_step);
            let d2 = (a2[i].ln() - b2[i].ln()) / (4.0 * h_step);
            rates[i] = (4.0 * d1 - d2) / 3.0;
        }
    } else {
        for i in 0..6 {
            rates[i] = (a1[i].ln() - b1[i].ln()) / (2.0 * h_step);
        }
    }

    Ok(GrowthRates {
        family,
        t,
        g_c: rates[0],
        g_k: rates[1],
        g_h: rates[2],
        g_u: rates[3],
        g_lambda: rates[4],
        g_mu: rates[5],
    })
}

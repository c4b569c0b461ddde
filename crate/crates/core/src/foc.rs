//! Independent verification engine: the Pontryagin first-order-condition
//! ODE system in transformed variables, an embedded Runge-Kutta integrator,
//! and residual reports for arbitrary trajectory closures.
//!
//! Verification is residual-based rather than integration-based. The FOC
//! system is saddle-path unstable, so long-horizon forward integration
//! cannot certify an analytic path; comparing numerical derivatives of the
//! closure against the right-hand side at sampled times is an exact local
//! check that instability cannot contaminate.

use serde::Serialize;

use crate::error::ModelError;
use crate::params::{to_transformed, ValidatedParams};

/// State of the transformed first-order-condition system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocState {
    pub c: f64,
    pub k: f64,
    pub h_star: f64,
    pub u: f64,
    pub lambda: f64,
    pub mu_star: f64,
}

/// Time derivatives of [`FocState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocDerivs {
    pub c: f64,
    pub k: f64,
    pub h_star: f64,
    pub u: f64,
    pub lambda: f64,
    pub mu_star: f64,
}

impl FocState {
    pub fn to_array(self) -> [f64; 6] {
        [self.c, self.k, self.h_star, self.u, self.lambda, self.mu_star]
    }

    pub fn from_array(y: [f64; 6]) -> Self {
        Self {
            c: y[0],
            k: y[1],
            h_star: y[2],
            u: y[3],
            lambda: y[4],
            mu_star: y[5],
        }
    }

    fn all_positive(&self) -> bool {
        self.to_array().iter().all(|v| *v > 0.0 && v.is_finite())
    }
}

/// Right-hand side of the transformed FOC system:
///
///   kdot   = gamma k^b (u h*)^(1-b) - pi k - c
///   h*dot  = delta* (1 - u) h*
///   cdot/c = (b gamma / sigma) (u h*/k)^(1-b) - (rho + pi)/sigma
///   udot/u = (delta* + pi)(1-b)/b - c/k + delta* u
///   ldot   = -l b gamma (u h*/k)^(1-b) + l (rho + pi)
///   m*dot  = m* (rho - delta*)
pub fn foc_rhs(s: &FocState, p: &ValidatedParams) -> Result<FocDerivs, ModelError> {
    if !s.all_positive() {
        return Err(ModelError::NonPositiveState);
    }
    let (sigma, rho, beta, gamma, pi) = (p.sigma(), p.rho(), p.beta(), p.gamma(), p.pi());
    let ds = to_transformed(p).delta_star;

    let cd = gamma * s.k.powf(beta) * (s.u * s.h_star).powf(1.0 - beta);
    let z_pow = (s.u * s.h_star / s.k).powf(1.0 - beta);

    Ok(FocDerivs {
        c: s.c * (beta * gamma / sigma * z_pow - (rho + pi) / sigma),
        k: cd - pi * s.k - s.c,
        h_star: ds * (1.0 - s.u) * s.h_star,
        u: s.u * ((ds + pi) * (1.0 - beta) / beta - s.c / s.k + ds * s.u),
        lambda: -s.lambda * beta * gamma * z_pow + s.lambda * (rho + pi),
        mu_star: s.mu_star * (rho - ds),
    })
}

fn rhs_array(y: [f64; 6], p: &ValidatedParams) -> Result<[f64; 6], ModelError> {
    let d = foc_rhs(&FocState::from_array(y), p)?;
    Ok([d.c, d.k, d.h_star, d.u, d.lambda, d.mu_star])
}

/// Dense trajectory produced by [`integrate`]: accepted steps plus cubic
/// Hermite interpolation between them.
#[derive(Debug, Clone)]
pub struct FocTrajectory {
    ts: Vec<f64>,
    states: Vec<[f64; 6]>,
    derivs: Vec<[f64; 6]>,
}

impl FocTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn end_time(&self) -> f64 {
        *self.ts.last().expect("trajectory has at least the initial point")
    }

    pub fn state_at(&self, idx: usize) -> FocState {
        FocState::from_array(self.states[idx])
    }

    /// Cubic Hermite interpolation at `t` (clamped to the covered span).
    pub fn sample(&self, t: f64) -> FocState {
        if self.ts.len() == 1 {
            return FocState::from_array(self.states[0]);
        }
        let t = t.clamp(self.ts[0], self.end_time());
        let i = match self.ts.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return FocState::from_array(self.states[i]),
            Err(i) => (i - 1).min(self.ts.len() - 2),
        };
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let dt = t1 - t0;
        let s = (t - t0) / dt;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut y = [0.0; 6];
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = h00 * self.states[i][j]
                + h10 * dt * self.derivs[i][j]
                + h01 * self.states[i + 1][j]
                + h11 * dt * self.derivs[i + 1][j];
        }
        FocState::from_array(y)
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MIN_STEP: f64 = 1e-12;
const MAX_STEPS: usize = 2_000_000;

/// Accepted state, its derivative, and the embedded error vector.
type StepTrial = ([f64; 6], [f64; 6], [f64; 6]);

fn axpy(y: &[f64; 6], h: f64, coeffs: &[(f64, &[f64; 6])]) -> [f64; 6] {
    let mut out = *y;
    for j in 0..6 {
        let mut acc = 0.0;
        for (a, k) in coeffs {
            acc += a * k[j];
        }
        out[j] += h * acc;
    }
    out
}

/// Integrates the FOC system from `s0` to `t_end` with an adaptive embedded
/// Runge-Kutta pair of orders 4/5 (PI step control, relative/absolute
/// tolerance `tol`). Steps producing a non-positive state are rejected and
/// retried with half the step; if the step underflows below 1e-12 the run
/// aborts with `StepFailure`, which is the expected outcome off the saddle
/// path.
pub fn integrate(
    s0: &FocState,
    p: &ValidatedParams,
    t_end: f64,
    tol: f64,
) -> Result<FocTrajectory, ModelError> {
    if t_end.is_nan() || t_end <= 0.0 {
        return Err(ModelError::OutOfRange("t_end"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(ModelError::OutOfRange("tol"));
    }
    if !s0.all_positive() {
        return Err(ModelError::NonPositiveState);
    }

    let (rtol, atol) = (tol, tol);
    let mut t = 0.0;
    let mut y = s0.to_array();
    let mut f = rhs_array(y, p)?;
    let mut dt = (t_end / 1000.0).clamp(1e-6, 0.1);
    let mut err_prev: f64 = 1.0;

    let mut traj = FocTrajectory {
        ts: vec![0.0],
        states: vec![y],
        derivs: vec![f],
    };

    let positive = |y: &[f64; 6]| y.iter().all(|v| *v > 0.0 && v.is_finite());

    for _ in 0..MAX_STEPS {
        if t_end - t <= MIN_STEP {
            return Ok(traj);
        }
        dt = dt.min(t_end - t);
        if dt < MIN_STEP {
            return Err(ModelError::StepFailure(format!(
                "step size underflow at t = {t:.6e}"
            )));
        }

        let k1 = f;
        let y2 = axpy(&y, dt, &[(A21, &k1)]);
        let trial = (|| -> Result<StepTrial, ModelError> {
            let k2 = rhs_array(y2, p)?;
            let k3 = rhs_array(axpy(&y, dt, &[(A31, &k1), (A32, &k2)]), p)?;
            let k4 = rhs_array(axpy(&y, dt, &[(A41, &k1), (A42, &k2), (A43, &k3)]), p)?;
            let k5 = rhs_array(
                axpy(&y, dt, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                p,
            )?;
            let k6 = rhs_array(
                axpy(
                    &y,
                    dt,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
                p,
            )?;
            let y_new = axpy(
                &y,
                dt,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            if !positive(&y_new) {
                return Err(ModelError::NonPositiveState);
            }
            let k7 = rhs_array(y_new, p)?;
            let mut err_vec = [0.0; 6];
            for j in 0..6 {
                err_vec[j] = dt
                    * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j]
                        + E7 * k7[j]);
            }
            Ok((y_new, k7, err_vec))
        })();

        match trial {
            Err(_) => {
                // Positivity violation inside the step: retry with half.
                dt *= 0.5;
            }
            Ok((y_new, f_new, err_vec)) => {
                let mut err_norm = 0.0;
                for j in 0..6 {
                    let scale = atol + rtol * y[j].abs().max(y_new[j].abs());
                    err_norm += (err_vec[j] / scale).powi(2);
                }
                let err_norm = (err_norm / 6.0).sqrt();

                if err_norm <= 1.0 {
                    t += dt;
                    y = y_new;
                    f = f_new;
                    traj.ts.push(t);
                    traj.states.push(y);
                    traj.derivs.push(f);

                    let factor = 0.9
                        * err_norm.max(1e-10).powf(-0.7 / 5.0)
                        * err_prev.max(1e-10).powf(0.4 / 5.0);
                    dt *= factor.clamp(0.2, 5.0);
                    err_prev = err_norm;
                } else {
                    dt *= (0.9 * err_norm.powf(-1.0 / 5.0)).clamp(0.1, 0.9);
                }
            }
        }
    }
    Err(ModelError::StepFailure(format!(
        "exceeded {MAX_STEPS} steps at t = {t:.6e}"
    )))
}

/// Maximum normalized residual per ODE equation. Level equations (kdot,
/// h*dot, lambdadot, mu*dot) are normalized by max(|numeric|, |rhs|, |state|);
/// rate equations (cdot/c, udot/u) by max(|numeric|, |rhs|, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdeResiduals {
    pub k_dot: f64,
    pub h_star_dot: f64,
    pub c_rate: f64,
    pub u_rate: f64,
    pub lambda_dot: f64,
    pub mu_star_dot: f64,
}

impl OdeResiduals {
    pub fn max(&self) -> f64 {
        [
            self.k_dot,
            self.h_star_dot,
            self.c_rate,
            self.u_rate,
            self.lambda_dot,
            self.mu_star_dot,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Maximum relative residual of the static first-order conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticResiduals {
    /// lambda = c^(-sigma).
    pub marginal_utility: f64,
    /// (u h*/k)^beta = gamma (1-beta) lambda / (delta* mu*).
    pub allocation: f64,
}

impl StaticResiduals {
    pub fn max(&self) -> f64 {
        self.marginal_utility.max(self.allocation)
    }
}

/// Residuals of a trajectory closure against the FOC system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_rel_ode_residual: OdeResiduals,
    pub max_rel_static_residual: StaticResiduals,
    /// Both discounted shadow values decay monotonically over the last
    /// quarter of the grid.
    pub transversality_decay_ok: bool,
    pub grid: Vec<f64>,
}

impl ResidualReport {
    /// Largest residual of any kind.
    pub fn max_residual(&self) -> f64 {
        self.max_rel_ode_residual.max().max(self.max_rel_static_residual.max())
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol && self.transversality_decay_ok
    }
}

fn rel_level(numeric: f64, rhs: f64, state: f64) -> f64 {
    (numeric - rhs).abs() / numeric.abs().max(rhs.abs()).max(state.abs()).max(1e-300)
}

fn rel_rate(numeric: f64, rhs: f64) -> f64 {
    (numeric - rhs).abs() / numeric.abs().max(rhs.abs()).max(1.0)
}

/// Compares 5-point central-difference derivatives of `traj` against the FOC
/// right-hand side on `grid`, evaluates the static conditions directly, and
/// checks transversality decay. The closure must be evaluable on
/// `[grid_min - 2 fd_step, grid_max + 2 fd_step]`; closed-form closures
/// extend smoothly to slightly negative times.
pub fn residual_report(
    traj: &dyn Fn(f64) -> FocState,
    p: &ValidatedParams,
    grid: &[f64],
    fd_step: f64,
) -> Result<ResidualReport, ModelError> {
    if grid.len() < 2 || fd_step.is_nan() || fd_step <= 0.0 {
        return Err(ModelError::OutOfRange("grid"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModelError::OutOfRange("grid"));
    }
    let (sigma, beta, gamma, rho) = (p.sigma(), p.beta(), p.gamma(), p.rho());
    let ds = to_transformed(p).delta_star;

    let mut ode = OdeResiduals {
        k_dot: 0.0,
        h_star_dot: 0.0,
        c_rate: 0.0,
        u_rate: 0.0,
        lambda_dot: 0.0,
        mu_star_dot: 0.0,
    };
    let mut statics = StaticResiduals {
        marginal_utility: 0.0,
        allocation: 0.0,
    };

    let h = fd_step;
    for &t in grid {
        let s = traj(t);
        let rhs = foc_rhs(&s, p)?;
        let sm2 = traj(t - 2.0 * h).to_array();
        let sm1 = traj(t - h).to_array();
        let sp1 = traj(t + h).to_array();
        let sp2 = traj(t + 2.0 * h).to_array();

        // 5-point central difference: f' ~ (f(-2h) - 8 f(-h) + 8 f(h) - f(2h)) / 12h.
        let d5 = |i: usize| (sm2[i] - 8.0 * sm1[i] + 8.0 * sp1[i] - sp2[i]) / (12.0 * h);
        let d5ln =
            |i: usize| (sm2[i].ln() - 8.0 * sm1[i].ln() + 8.0 * sp1[i].ln() - sp2[i].ln())
                / (12.0 * h);

        ode.c_rate = ode.c_rate.max(rel_rate(d5ln(0), rhs.c / s.c));
        ode.k_dot = ode.k_dot.max(rel_level(d5(1), rhs.k, s.k));
        ode.h_star_dot = ode.h_star_dot.max(rel_level(d5(2), rhs.h_star, s.h_star));
        ode.u_rate = ode.u_rate.max(rel_rate(d5ln(3), rhs.u / s.u));
        ode.lambda_dot = ode.lambda_dot.max(rel_level(d5(4), rhs.lambda, s.lambda));
        ode.mu_star_dot = ode
            .mu_star_dot
            .max(rel_level(d5(5), rhs.mu_star, s.mu_star));

        let lam_target = s.c.powf(-sigma);
        statics.marginal_utility = statics
            .marginal_utility
            .max((s.lambda - lam_target).abs() / s.lambda.abs().max(lam_target.abs()));
        let lhs = (s.u * s.h_star / s.k).powf(beta);
        let alloc = gamma * (1.0 - beta) * s.lambda / (ds * s.mu_star);
        statics.allocation = statics
            .allocation
            .max((lhs - alloc).abs() / lhs.abs().max(alloc.abs()));
    }

    // Transversality: both discounted shadow values must decay monotonically
    // over the last quarter of the grid.
    let start = grid.len() - (grid.len() / 4).max(2);
    let mut decay_ok = true;
    let mut prev: Option<(f64, f64)> = None;
    for &t in &grid[start..] {
        let s = traj(t);
        let tv1 = (-rho * t).exp() * s.lambda * s.k;
        let tv2 = (-rho * t).exp() * s.mu_star * s.h_star;
        if let Some((p1, p2)) = prev {
            if tv1 > p1 * (1.0 + 1e-12) || tv2 > p2 * (1.0 + 1e-12) {
                decay_ok = false;
            }
        }
        prev = Some((tv1, tv2));
    }

    Ok(ResidualReport {
        max_rel_ode_residual: ode,
        max_rel_static_residual: statics,
        transversality_decay_ok: decay_ok,
        grid: grid.to_vec(),
    })
}

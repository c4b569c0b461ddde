//! The transition variable z(t) = u h*/k, its analytic log-derivative, and
//! the quadrature kernels F(t) and G(t) with their infinite-horizon limits.
//!
//! z relaxes from z0 to the steady value z_bar at rate
//! a = (1-beta)(delta*+pi)/beta:
//!
//!   z(t) = z_bar z0 / [(z_bar^(1-b) - z0^(1-b)) e^(-a t) + z0^(1-b)]^(1/(1-b))
//!
//! F and G integrate z^((sigma-beta)/sigma) against exponentials with decay
//! rates xi_tilde and (delta* sigma - delta* + rho)/sigma. Both integrands
//! are bounded by powers of min/max(z0, z_bar), which gives analytic tail
//! bounds for truncating the improper integrals.
//!
//! The "detrended" tails
//!
//!   QF(t) = e^(xi t) * int_t^inf z^p e^(-xi s) ds
//!         = int_0^inf z(t+v)^p e^(-xi v) dv
//!
//! (and QG alike) are the numerically safe building blocks for evaluating
//! the closed forms at large t: the decaying factor F_lim - F(t) is computed
//! directly as a tail integral instead of as a catastrophic subtraction.

use crate::error::ModelError;
use crate::params::{to_transformed, TransformedParams, ValidatedParams};
use crate::quadrature::{adaptive_gk21, QuadratureResult};

const MAX_QUAD_EVALS: usize = 2_000_000;

/// Precomputed constants for the z / F / G kernels at a given z0.
#[derive(Debug, Clone, Copy)]
pub struct KernelContext {
    beta: f64,
    pi: f64,
    transformed: TransformedParams,
    /// Initial transition ratio z(0).
    pub z0: f64,
    /// Steady transition ratio.
    pub z_bar: f64,
    /// Relaxation rate of z: (1-beta)(delta*+pi)/beta.
    pub decay_a: f64,
    /// Decay rate of the F integrand: (delta*+pi-pi*beta)/beta - (delta*-rho)/sigma.
    pub xi_tilde: f64,
    /// Decay rate of the G integrand: (delta*sigma - delta* + rho)/sigma.
    pub g_decay: f64,
    /// Integrand exponent (sigma-beta)/sigma.
    pub p_exp: f64,
    // z_bar^(1-beta) - z0^(1-beta), cached for the z expressions.
    delta_pow: f64,
    z0_pow: f64,
}

impl KernelContext {
    pub fn new(p: &ValidatedParams, z0: f64) -> Result<Self, ModelError> {
        if !z0.is_finite() || z0 <= 0.0 {
            return Err(ModelError::NonPositiveZ0);
        }
        let tp = to_transformed(p);
        let (sigma, rho, beta, gamma, pi) = (p.sigma(), p.rho(), p.beta(), p.gamma(), p.pi());
        let ds = tp.delta_star;
        let z_bar = ((ds + pi) / (beta * gamma)).powf(1.0 / (1.0 - beta));
        let decay_a = (1.0 - beta) * (ds + pi) / beta;
        let xi_tilde = (ds + pi * (1.0 - beta)) / beta - (ds - rho) / sigma;
        let g_decay = (ds * sigma - ds + rho) / sigma;
        Ok(Self {
            beta,
            pi,
            transformed: tp,
            z0,
            z_bar,
            decay_a,
            xi_tilde,
            g_decay,
            p_exp: (sigma - beta) / sigma,
            delta_pow: z_bar.powf(1.0 - beta) - z0.powf(1.0 - beta),
            z0_pow: z0.powf(1.0 - beta),
        })
    }

    pub fn transformed(&self) -> TransformedParams {
        self.transformed
    }

    /// True when the integrands of F and G are constant in s (z0 = z_bar, or
    /// sigma = beta so that z^p = 1).
    fn constant_integrand(&self) -> bool {
        self.p_exp == 0.0 || (self.z0 - self.z_bar).abs() <= 1e-13 * self.z_bar
    }

    fn constant_integrand_value(&self) -> f64 {
        if self.p_exp == 0.0 {
            1.0
        } else {
            self.z_bar.powf(self.p_exp)
        }
    }

    /// Closed-form transition ratio z(t). Defined for all t with
    /// (z_bar^(1-b) - z0^(1-b)) e^(-a t) + z0^(1-b) > 0, which covers every
    /// t >= 0 and a margin of negative t used by finite-difference stencils.
    pub fn z_path(&self, t: f64) -> f64 {
        if (self.z0 - self.z_bar).abs() <= 1e-13 * self.z_bar {
            return self.z_bar;
        }
        if t == 0.0 {
            return self.z0;
        }
        let w = self.delta_pow * (-self.decay_a * t).exp() + self.z0_pow;
        self.z_bar * self.z0 * w.powf(-1.0 / (1.0 - self.beta))
    }

    /// Analytic log-derivative of [`Self::z_path`]:
    /// zdot/z = ((delta*+pi)/beta) (zb^(1-b) - z0^(1-b)) e^(-a t) / W(t).
    pub fn z_log_derivative(&self, t: f64) -> f64 {
        if (self.z0 - self.z_bar).abs() <= 1e-13 * self.z_bar {
            return 0.0;
        }
        let num = self.delta_pow * (-self.decay_a * t).exp();
        let w = num + self.z0_pow;
        (self.transformed.delta_star + self.pi) / self.beta * num / w
    }

    fn f_integrand(&self, s: f64) -> f64 {
        self.z_path(s).powf(self.p_exp) * (-self.xi_tilde * s).exp()
    }

    fn g_integrand(&self, s: f64) -> f64 {
        self.z_path(s).powf(self.p_exp) * (-self.g_decay * s).exp()
    }

    /// Largest value of z^p over the whole trajectory.
    fn zp_max(&self) -> f64 {
        let (lo, hi) = (self.z0.min(self.z_bar), self.z0.max(self.z_bar));
        if self.p_exp >= 0.0 {
            hi.powf(self.p_exp)
        } else {
            lo.powf(self.p_exp)
        }
    }

    /// Magnitude of the largest tail integral (the t = 0 limits). Absolute
    /// quadrature tolerances below roughly 1e-14 of this are not reachable
    /// in double precision, so internal callers scale their tolerance by it.
    pub fn tail_scale(&self) -> f64 {
        self.zp_max() / self.xi_tilde.min(self.g_decay).max(1e-12)
    }

    fn require_positive_rate(rate: f64) -> Result<(), ModelError> {
        if rate > 0.0 {
            Ok(())
        } else {
            Err(ModelError::WindowViolated)
        }
    }

    /// F(t) = int_0^t z(s)^p e^(-xi_tilde s) ds.
    pub fn f_integral(&self, t: f64, tol: f64) -> Result<QuadratureResult, ModelError> {
        Self::require_positive_rate(self.xi_tilde)?;
        self.finite_integral(t, tol, self.xi_tilde, |s| self.f_integrand(s))
    }

    /// G(t) = int_0^t z(s)^p e^(-g_decay s) ds.
    pub fn g_integral(&self, t: f64, tol: f64) -> Result<QuadratureResult, ModelError> {
        Self::require_positive_rate(self.g_decay)?;
        self.finite_integral(t, tol, self.g_decay, |s| self.g_integrand(s))
    }

    fn finite_integral(
        &self,
        t: f64,
        tol: f64,
        rate: f64,
        integrand: impl Fn(f64) -> f64,
    ) -> Result<QuadratureResult, ModelError> {
        debug_assert!(tol > 0.0);
        if self.constant_integrand() {
            let c = self.constant_integrand_value();
            return Ok(QuadratureResult {
                value: c * (-(-rate * t).exp_m1()) / rate,
                abs_error_estimate: 0.0,
                evaluations: 0,
            });
        }
        adaptive_gk21(&integrand, 0.0, t, tol, MAX_QUAD_EVALS)
    }

    /// F over an arbitrary subinterval [a, b].
    pub fn f_integral_between(&self, a: f64, b: f64, tol: f64) -> Result<QuadratureResult, ModelError> {
        Self::require_positive_rate(self.xi_tilde)?;
        adaptive_gk21(&|s| self.f_integrand(s), a, b, tol, MAX_QUAD_EVALS)
    }

    /// lim_{t->inf} F(t), via truncation plus the analytic exponential tail
    /// bound max(z^p) e^(-xi T)/xi.
    pub fn f_limit(&self, tol: f64) -> Result<f64, ModelError> {
        Ok(self.detrended_tail(0.0, tol, self.xi_tilde)?.value)
    }

    /// lim_{t->inf} G(t).
    pub fn g_limit(&self, tol: f64) -> Result<f64, ModelError> {
        Ok(self.detrended_tail(0.0, tol, self.g_decay)?.value)
    }

    /// QF(t) = int_0^inf z(t+v)^p e^(-xi_tilde v) dv, so that
    /// F_lim - F(t) = e^(-xi_tilde t) QF(t) without any subtraction.
    pub fn f_tail_detrended(&self, t: f64, tol: f64) -> Result<f64, ModelError> {
        Ok(self.detrended_tail(t, tol, self.xi_tilde)?.value)
    }

    /// QG(t) = int_0^inf z(t+v)^p e^(-g_decay v) dv.
    pub fn g_tail_detrended(&self, t: f64, tol: f64) -> Result<f64, ModelError> {
        Ok(self.detrended_tail(t, tol, self.g_decay)?.value)
    }

    fn detrended_tail(&self, t: f64, tol: f64, rate: f64) -> Result<QuadratureResult, ModelError> {
        debug_assert!(tol > 0.0);
        Self::require_positive_rate(rate)?;
        if self.constant_integrand() {
            return Ok(QuadratureResult {
                value: self.constant_integrand_value() / rate,
                abs_error_estimate: 0.0,
                evaluations: 0,
            });
        }
        // Truncate where the analytic tail bound drops below tol/2.
        let horizon = ((2.0 * self.zp_max() / (rate * tol)).ln() / rate).max(1.0);
        let integrand = |v: f64| self.z_path(t + v).powf(self.p_exp) * (-rate * v).exp();
        let mut r = adaptive_gk21(&integrand, 0.0, horizon, 0.5 * tol, MAX_QUAD_EVALS)?;
        r.abs_error_estimate += self.zp_max() * (-rate * horizon).exp() / rate;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate, ModelParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn canonical() -> ValidatedParams {
        validate(ModelParams {
            sigma: 2.0,
            rho: 0.04,
            beta: 0.33,
            gamma: 1.0,
            pi: 0.02,
            delta: 0.05,
            theta: 0.1,
        })
        .unwrap()
    }

    fn ctx(z0: f64) -> KernelContext {
        KernelContext::new(&canonical(), z0).unwrap()
    }

    #[test]
    fn z_path_boundary_values() {
        let c = ctx(0.05);
        assert_eq!(c.z_path(0.0), 0.05);
        let c_bar = ctx(c.z_bar);
        for t in [0.0, 3.0, 57.0] {
            assert_eq!(c_bar.z_path(t), c.z_bar);
            assert_eq!(c_bar.z_log_derivative(t), 0.0);
        }
    }

    #[test]
    fn z_path_matches_ode_integration_oracle() {
        // Integrate zdot = z * z_log_derivative with a fixed-step RK4 and
        // compare against the closed form at t = 50.
        let c = ctx(0.05);
        let rhs = |t: f64, z: f64| z * c.z_log_derivative(t);
        let mut z = 0.05;
        let mut t = 0.0;
        let h = 1e-3;
        while t < 50.0 - 0.5 * h {
            let k1 = rhs(t, z);
            let k2 = rhs(t + 0.5 * h, z + 0.5 * h * k1);
            let k3 = rhs(t + 0.5 * h, z + 0.5 * h * k2);
            let k4 = rhs(t + h, z + h * k3);
            z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        assert!(
            (z - c.z_path(50.0)).abs() < 1e-8,
            "rk4 {} vs closed form {}",
            z,
            c.z_path(50.0)
        );
    }

    #[test]
    fn z_log_derivative_matches_finite_differences() {
        let c = ctx(0.05);
        let h = 1e-4;
        let fd = (c.z_path(10.0 + h).ln() - c.z_path(10.0 - h).ln()) / (2.0 * h);
        assert!((c.z_log_derivative(10.0) - fd).abs() < 1e-7);
    }

    #[test]
    fn z_log_derivative_vanishes_in_the_long_run() {
        let c = ctx(0.05);
        let t = 60.0 / c.decay_a;
        assert!(c.z_log_derivative(t).abs() < 1e-10);
    }

    #[test]
    fn z_path_is_monotone_toward_z_bar() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..50 {
            let z0 = rng.gen_range(0.02..0.5);
            let c = ctx(z0);
            let increasing = z0 < c.z_bar;
            let mut prev = c.z_path(0.0);
            for i in 1..400 {
                let z = c.z_path(i as f64 * 0.25);
                if increasing {
                    assert!(z >= prev - 1e-15);
                } else {
                    assert!(z <= prev + 1e-15);
                }
                prev = z;
            }
        }
    }

    #[test]
    fn f_integral_at_zero_is_zero() {
        let c = ctx(0.05);
        assert_eq!(c.f_integral(0.0, 1e-12).unwrap().value, 0.0);
        assert_eq!(c.g_integral(0.0, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn non_positive_z0_is_rejected() {
        assert!(matches!(
            KernelContext::new(&canonical(), 0.0),
            Err(ModelError::NonPositiveZ0)
        ));
        assert!(matches!(
            KernelContext::new(&canonical(), -0.3),
            Err(ModelError::NonPositiveZ0)
        ));
    }

    #[test]
    fn constant_integrand_reduces_to_elementary_integral() {
        let c = ctx(ctx(0.05).z_bar);
        let t = 12.5;
        let expected = c.z_bar.powf(c.p_exp) * (1.0 - (-c.xi_tilde * t).exp()) / c.xi_tilde;
        let got = c.f_integral(t, 1e-12).unwrap().value;
        assert!((got - expected).abs() < 1e-14);
        assert!((c.f_limit(1e-12).unwrap() - c.z_bar.powf(c.p_exp) / c.xi_tilde).abs() < 1e-15);

        let expected_g = c.z_bar.powf(c.p_exp) * (1.0 - (-c.g_decay * t).exp()) / c.g_decay;
        assert!((c.g_integral(t, 1e-12).unwrap().value - expected_g).abs() < 1e-14);
    }

    /// Composite-Simpson brute force used as an independent oracle.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        assert!(n.is_multiple_of(2));
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn f_integral_agrees_with_simpson_oracle() {
        let c = ctx(0.05);
        let brute = simpson(|s| c.f_integrand(s), 0.0, 30.0, 100_000);
        let got = c.f_integral(30.0, 1e-10).unwrap();
        assert!(
            ((got.value - brute) / brute).abs() < 1e-8,
            "adaptive {} vs simpson {}",
            got.value,
            brute
        );
        assert!(got.abs_error_estimate <= 1e-10);

        let brute_g = simpson(|s| c.g_integrand(s), 0.0, 30.0, 100_000);
        let got_g = c.g_integral(30.0, 1e-10).unwrap();
        assert!(((got_g.value - brute_g) / brute_g).abs() < 1e-8);
    }

    #[test]
    fn f_limit_is_stable_under_horizon_doubling() {
        let c = ctx(0.05);
        let lim = c.f_limit(1e-12).unwrap();
        // Integrate far beyond the automatic truncation horizon.
        let horizon = 2.0 * ((2.0 * c.z_bar.powf(c.p_exp) / (c.xi_tilde * 1e-12)).ln() / c.xi_tilde);
        let wide = c.f_integral(horizon, 1e-13).unwrap().value;
        assert!((lim - wide).abs() < 1e-10, "lim {} vs wide {}", lim, wide);
    }

    #[test]
    fn f_integral_is_nondecreasing_in_t() {
        let c = ctx(0.05);
        let mut prev = 0.0;
        for i in 0..=40 {
            let v = c.f_integral(i as f64 * 2.5, 1e-12).unwrap().value;
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn f_integral_is_additive_over_subintervals() {
        let c = ctx(0.05);
        let tol = 1e-12;
        let a = c.f_integral(7.0, tol).unwrap().value;
        let b = c.f_integral_between(7.0, 19.0, tol).unwrap().value;
        let whole = c.f_integral(19.0, tol).unwrap().value;
        assert!((a + b - whole).abs() < 5.0 * tol);
    }

    #[test]
    fn tail_bound_is_sound() {
        let c = ctx(0.05);
        let lim = c.f_limit(1e-13).unwrap();
        for t in [5.0, 20.0, 60.0] {
            let partial = c.f_integral(t, 1e-13).unwrap().value;
            let bound = c.zp_max() * (-c.xi_tilde * t).exp() / c.xi_tilde;
            assert!((lim - partial).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn detrended_tail_matches_direct_difference() {
        let c = ctx(0.05);
        let t = 14.0;
        let qf = c.f_tail_detrended(t, 1e-13).unwrap();
        let diff = c.f_limit(1e-13).unwrap() - c.f_integral(t, 1e-13).unwrap().value;
        let reconstructed = (-c.xi_tilde * t).exp() * qf;
        assert!(
            ((reconstructed - diff) / diff).abs() < 1e-9,
            "tail {} vs difference {}",
            reconstructed,
            diff
        );

        let qg = c.g_tail_detrended(t, 1e-13).unwrap();
        let diff_g = c.g_limit(1e-13).unwrap() - c.g_integral(t, 1e-13).unwrap().value;
        assert!((((-c.g_decay * t).exp() * qg - diff_g) / diff_g).abs() < 1e-9);
    }

    #[test]
    fn fd_property_over_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfd0);
        for _ in 0..200 {
            let z0 = rng.gen_range(0.01..0.6);
            let c = ctx(z0);
            let t = rng.gen_range(0.0..100.0);
            let h = 1e-4;
            let fd = (c.z_path(t + h).ln() - c.z_path(t - h).ln()) / (2.0 * h);
            assert!(
                (c.z_log_derivative(t) - fd).abs() < 1e-6,
                "z0 = {}, t = {}",
                z0,
                t
            );
            // The rate carries the sign of z_bar - z0 until it dies out.
            assert_eq!(
                c.z_log_derivative(t).signum(),
                (c.z_bar - z0).signum(),
                "z0 = {}",
                z0
            );
        }
    }
}

//! Adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! The integrands of this crate are smooth, positive, and exponentially
//! decaying, so a 21-point Kronrod rule with bisection of the worst panel is
//! ample. Improper integrals are handled by the callers via analytic
//! truncation bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::ModelError;

/// Result of an adaptive quadrature run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    /// Estimated value of the integral.
    pub value: f64,
    /// Estimated absolute error.
    pub abs_error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

// 10-point Gauss / 21-point Kronrod abscissae and weights on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// 21-point Gauss-Kronrod rule on [a, b]. Returns (value, error estimate).
fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0_f64; 10];
    let mut fv2 = [0.0_f64; 10];

    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let absc = half * XGK[jtw];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let absc = half * XGK[jtwm1];
        let f1 = f(center - absc);
        let f2 = f(center + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    let error = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, error)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const EVALS_PER_PANEL: usize = 21;

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol` by repeatedly
/// bisecting the panel with the largest error estimate.
pub(crate) fn adaptive_gk21<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_evals: usize,
) -> Result<QuadratureResult, ModelError> {
    debug_assert!(abs_tol > 0.0);
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }

    let span = (b - a).abs();
    // Warm start with a handful of panels so the exponential decay is
    // resolved before refinement begins.
    let n0 = ((span / 5.0).ceil() as usize).clamp(1, 64);
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut evaluations = 0usize;
    for i in 0..n0 {
        let pa = a + span.copysign(b - a) * i as f64 / n0 as f64;
        let pb = a + span.copysign(b - a) * (i + 1) as f64 / n0 as f64;
        let pb = if i + 1 == n0 { b } else { pb };
        let (value, error) = qk21(f, pa, pb);
        evaluations += EVALS_PER_PANEL;
        heap.push(Panel {
            a: pa,
            b: pb,
            value,
            error,
        });
    }

    loop {
        let total_error: f64 = heap.iter().map(|p| p.error).sum();
        if total_error <= abs_tol {
            let value: f64 = heap.iter().map(|p| p.value).sum();
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: total_error,
                evaluations,
            });
        }
        if evaluations + 2 * EVALS_PER_PANEL > max_evals {
            return Err(ModelError::NonConvergent);
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid == worst.a || mid == worst.b {
            // Panel collapsed to machine resolution without converging.
            return Err(ModelError::NonConvergent);
        }
        for (pa, pb) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = qk21(f, pa, pb);
            heap.push(Panel {
                a: pa,
                b: pb,
                value,
                error,
            });
        }
        evaluations += 2 * EVALS_PER_PANEL;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let f = |x: f64| 3.0 * x * x;
        let r = adaptive_gk21(&f, 0.0, 2.0, 1e-12, 10_000).unwrap();
        assert!((r.value - 8.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_decay_matches_closed_form() {
        let f = |x: f64| (-0.3 * x).exp();
        let r = adaptive_gk21(&f, 0.0, 120.0, 1e-13, 200_000).unwrap();
        let exact = (1.0 - (-0.3f64 * 120.0).exp()) / 0.3;
        assert!((r.value - exact).abs() < 1e-12, "value = {}", r.value);
        assert!(r.abs_error_estimate <= 1e-13);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let f = |x: f64| x.cos();
        let fwd = adaptive_gk21(&f, 0.0, 1.0, 1e-12, 10_000).unwrap();
        let bwd = adaptive_gk21(&f, 1.0, 0.0, 1e-12, 10_000).unwrap();
        assert!((fwd.value + bwd.value).abs() < 1e-13);
    }

    #[test]
    fn tiny_budget_reports_non_convergence() {
        // Needle-like integrand with an evaluation budget too small to resolve it.
        let f = |x: f64| (-(x - 37.1234).powi(2) * 1e6).exp();
        let err = adaptive_gk21(&f, 0.0, 120.0, 1e-14, 300);
        assert_eq!(err, Err(ModelError::NonConvergent));
    }
}

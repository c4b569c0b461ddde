//! Scalar root bracketing and bisection for the labor-share consistency
//! relations. Monotonicity of the residual is not assumed: the scan walks the
//! whole interval and takes the first sign change.

use crate::error::ModelError;

/// Finds a root of `f` in `[lo, hi]` by scanning `n_scan` uniformly spaced
/// points for a sign change and bisecting the first bracket to machine
/// resolution. Returns `NoRoot` when no sign change exists.
pub(crate) fn bracket_and_bisect<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    n_scan: usize,
) -> Result<f64, ModelError>
where
    F: FnMut(f64) -> Result<f64, ModelError>,
{
    debug_assert!(lo < hi && n_scan >= 2);
    let step = (hi - lo) / (n_scan - 1) as f64;
    let mut x_prev = lo;
    let mut f_prev = f(lo)?;
    if f_prev == 0.0 {
        return Ok(lo);
    }

    let mut bracket = None;
    for i in 1..n_scan {
        let x = if i + 1 == n_scan { hi } else { lo + step * i as f64 };
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if f_prev.signum() != fx.signum() {
            bracket = Some((x_prev, f_prev, x, fx));
            break;
        }
        x_prev = x;
        f_prev = fx;
    }
    let (mut a, mut fa, mut b, _fb) = bracket.ok_or(ModelError::NoRoot)?;

    // Bisect to machine-tight width; the consistency relations must hold to
    // near rounding precision or the parasitic (non-saddle) modes of the
    // closed forms pollute long-horizon evaluation.
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_root() {
        let root =
            bracket_and_bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 64).unwrap();
        assert!((root - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reports_no_root() {
        let err = bracket_and_bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 64);
        assert_eq!(err, Err(ModelError::NoRoot));
    }

    #[test]
    fn takes_first_sign_change() {
        // Two roots at 0.25 and 0.75; the scan must return the first.
        let root = bracket_and_bisect(
            |x| Ok((x - 0.25) * (x - 0.75)),
            0.0,
            1.0,
            64,
        )
        .unwrap();
        assert!((root - 0.25).abs() < 1e-13);
    }

    #[test]
    fn propagates_inner_errors() {
        let err = bracket_and_bisect(
            |_x| Err::<f64, _>(ModelError::NonConvergent),
            0.0,
            1.0,
            8,
        );
        assert_eq!(err, Err(ModelError::NonConvergent));
    }
}

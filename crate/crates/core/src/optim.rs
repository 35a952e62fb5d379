//! Scalar search routines shared by the width solver and the α-supremum.

/// Inverse golden ratio, (√5 − 1)/2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Shrinks the bracket until its width is at most `tol` and returns the best
/// point evaluated together with its value. Assumes nothing beyond continuity;
/// on a non-unimodal bracket it returns a local maximum.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Root of a monotone function on a sign-changing bracket.
///
/// `f` returns the value and derivative. Newton steps are taken while they
/// stay strictly inside the current bracket; otherwise the step falls back to
/// bisection. Stops when the bracket stops shrinking in floating point, when
/// `f` hits zero exactly, or after `max_iter` evaluations. Returns the final
/// iterate and whether the stopping rule (not the cap) fired.
pub fn safeguarded_newton<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    max_iter: usize,
) -> (f64, bool) {
    let (f_lo, _) = f(lo);
    let increasing = f_lo < 0.0;
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return (x, true);
        }
        if (fx < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return (x, true);
        }
        let newton = x - fx / dfx;
        if newton.is_finite() && (newton - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
            return (newton.clamp(lo, hi), true);
        }
        x = if dfx != 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            mid
        };
        if (x - lo).min(hi - x) <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return (x, true);
        }
    }
    (x, false)
}

//! Bracketed root finding for nondecreasing functions.
//!
//! Interpolate-truncate-project (ITP) iteration: never needs more
//! evaluations than bisection plus one, and converges superlinearly when
//! the function is smooth near the root. Kinks and flat stretches only
//! slow it down to the bisection pace.

/// Solves `g(x) = target` on `[lo, hi]` for nondecreasing `g` with
/// `g_lo = g(lo) ≤ target ≤ g_hi = g(hi)`.
///
/// Stops as soon as `|g(x) − target| ≤ tol_f`, or once the bracket is
/// narrower than `2·tol_x`, returning its midpoint.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_nondecreasing<G: FnMut(f64) -> f64>(
    mut g: G,
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
    g_hi: f64,
    target: f64,
    tol_f: f64,
    tol_x: f64,
) -> f64 {
    let mut f_lo = g_lo - target;
    let mut f_hi = g_hi - target;
    if f_lo.abs() <= tol_f {
        return lo;
    }
    if f_hi.abs() <= tol_f {
        return hi;
    }
    let eps = tol_x.max(f64::MIN_POSITIVE);
    let width0 = hi - lo;
    let k1 = 0.2 / width0;
    let n_half = ((width0 / (2.0 * eps)).log2().ceil()).max(0.0) as i32;
    let n_max = n_half + 1;
    let mut j = 0i32;
    while hi - lo > 2.0 * eps {
        let mid = 0.5 * (lo + hi);
        let r = (eps * 2f64.powi(n_max - j) - 0.5 * (hi - lo)).max(0.0);
        let delta = k1 * (hi - lo) * (hi - lo);
        let falsi = if f_hi > f_lo { (hi * f_lo - lo * f_hi) / (f_lo - f_hi) } else { mid };
        let sigma = (mid - falsi).signum();
        let truncated = if delta <= (mid - falsi).abs() { falsi + sigma * delta } else { mid };
        let x = if (truncated - mid).abs() <= r { truncated } else { mid - sigma * r };
        if !(x > lo && x < hi) {
            // Bracket exhausted at floating-point resolution.
            break;
        }
        let fx = g(x) - target;
        if fx.abs() <= tol_f {
            return x;
        }
        if fx > 0.0 {
            hi = x;
            f_hi = fx;
        } else {
            lo = x;
            f_lo = fx;
        }
        j += 1;
    }
    0.5 * (lo + hi)
}

//! Adaptive Simpson quadrature with mandatory break points.

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to an absolute tolerance `tol`.
///
/// Uses the Lyness form of adaptive Simpson (Richardson-corrected panels).
/// Returns 0 for empty or reversed intervals.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let tol = tol.max(f64::MIN_POSITIVE);
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || !delta.is_finite() || delta.abs() <= 15.0 * tol || !(lm > a && rm < b) {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over `[a, b]`, splitting at every break point strictly inside.
///
/// The tolerance is shared evenly between the pieces.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    cuts.push(a);
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = (cuts.len() - 1) as f64;
    cuts.windows(2).map(|w| adaptive_simpson(f, w[0], w[1], tol / pieces)).sum()
}

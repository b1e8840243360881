//! Scale factors `a_h(y)`: the spatial step of the random-bit chain.
//!
//! The EMCEL scale factor solves `G(y, a) = h` so that the expected time
//! the diffusion needs to move `±a` equals the time step. Near accessible
//! boundaries the step is clipped so the chain lands exactly on the
//! boundary.

mod condition_a;
pub(crate) mod root;
mod scheme;
mod thresholds;

pub use condition_a::{verify_condition_a, ConditionAReport, ConditionARow};
pub use scheme::{default_tolerance, ScaleFactorScheme, SchemeMetadata, StepRule};
pub use thresholds::{boundary_threshold_left, boundary_threshold_right, BoundaryThresholds};

use crate::error::{ensure_arg, Error, Result};
use crate::measure::SpeedMeasure;
use root::solve_nondecreasing;

/// EMCEL scale factor `â_h(y)` with residual `|G(y, â) − h| ≤ tol` on the
/// solved zone `(l_h, r_h)`; clipped to the boundary outside it.
pub fn emcel_scale_factor(m: &SpeedMeasure, h: f64, y: f64, tol: f64) -> Result<f64> {
    ensure_arg!(h > 0.0 && h.is_finite(), "time step must be positive, got {h}");
    ensure_arg!(tol > 0.0, "tolerance must be positive, got {tol}");
    if !m.space().in_interior(y) {
        return Err(Error::Domain(format!("y = {y} is not in the interior of the state space")));
    }
    let t = BoundaryThresholds::compute(m, h)?;
    emcel_with_thresholds(m, &t, h, y, tol)
}

pub(crate) fn emcel_with_thresholds(m: &SpeedMeasure, t: &BoundaryThresholds, h: f64, y: f64, tol: f64) -> Result<f64> {
    let (l, r) = (m.space().left(), m.space().right());
    if y <= t.left {
        return Ok(y - l);
    }
    if y >= t.right {
        return Ok(r - y);
    }
    let cap = (y - l).min(r - y);
    if let Some(a) = piecewise_quadratic_root(m, y, h) {
        if a <= cap {
            return Ok(a);
        }
        let g_cap = m.triangle_unchecked(y, cap, m.quad_tol());
        if h - g_cap <= tol {
            return Ok(cap);
        }
        return Err(Error::BoundaryInconsistency { y, h, cap, value: g_cap });
    }
    let qtol = m.quad_tol().min(tol / 16.0);
    let g = |a: f64| m.triangle_unchecked(y, a, qtol);

    let guess = match m.density().map(|d| d.eval(y)) {
        Some(c) if c > 0.0 && c.is_finite() => (2.0 * h / c).sqrt(),
        _ => h.sqrt(),
    };
    let mut lo = 0.0;
    let mut g_lo = 0.0;
    let mut hi = guess.min(cap);
    let mut g_hi = g(hi);
    while g_hi < h {
        if hi >= cap {
            if h - g_hi <= tol {
                return Ok(cap);
            }
            return Err(Error::BoundaryInconsistency { y, h, cap, value: g_hi });
        }
        lo = hi;
        g_lo = g_hi;
        hi = (2.0 * hi).min(cap);
        g_hi = g(hi);
    }
    let tol_x = 1e-15 * y.abs().max(1.0);
    Ok(solve_nondecreasing(g, lo, hi, g_lo, g_hi, h, tol, tol_x))
}

/// Exact root of `G(y, a) = h` when `m` is a constant density plus atoms.
///
/// Between consecutive atom distances `G(y, ·)` is the quadratic
/// `(c/2)a² + (W a − S)/2`, with `W` and `S` the summed weights and
/// weighted distances of the atoms already inside the window.
fn piecewise_quadratic_root(m: &SpeedMeasure, y: f64, h: f64) -> Option<f64> {
    if !m.singular_parts().is_empty() {
        return None;
    }
    let c = match m.density() {
        Some(d) => d.constant_value()?,
        None => 0.0,
    };
    let atoms = m.atoms();
    let (mut w, mut s) = (0.0, 0.0);
    let mut lo = 0.0;
    loop {
        for atom in atoms {
            let d = (atom.position - y).abs();
            if d == lo {
                w += atom.weight;
                s += atom.weight * d;
            }
        }
        let hi = atoms.iter().map(|atom| (atom.position - y).abs()).filter(|&d| d > lo).fold(f64::INFINITY, f64::min);
        // (c/2)a² + (w/2)a − q = 0 with q = s/2 + h, in cancellation-free form.
        let q = 0.5 * s + h;
        let root = if c > 0.0 {
            2.0 * q / (0.5 * w + (0.25 * w * w + 2.0 * c * q).sqrt())
        } else if w > 0.0 {
            2.0 * q / w
        } else {
            f64::INFINITY
        };
        if root <= hi {
            return Some(root);
        }
        if hi.is_infinite() {
            return None;
        }
        lo = hi;
    }
}

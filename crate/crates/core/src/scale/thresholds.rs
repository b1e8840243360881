use super::root::solve_nondecreasing;
use crate::error::{ensure_arg, Result};
use crate::measure::{BoundaryKind, SpeedMeasure};

/// Clipping thresholds near accessible boundaries for one time step `h`.
///
/// Between `left` and `right` the scale factor solves `G(y, a) = h`
/// exactly; on `(l, left]` and `[right, r)` it jumps straight to the
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryThresholds {
    pub left: f64,
    pub right: f64,
}

impl BoundaryThresholds {
    pub fn compute(m: &SpeedMeasure, h: f64) -> Result<Self> {
        Ok(Self { left: boundary_threshold_left(m, h)?, right: boundary_threshold_right(m, h)? })
    }

    /// `y ∈ (l_h, r_h)`, where the unclipped equation is solved.
    pub fn is_solved_zone(&self, y: f64) -> bool {
        y > self.left && y < self.right
    }
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// `l_h = l + inf{a ∈ (0, (r−l)/2] : G(l + a, a) ≥ h}`, with `inf ∅ = (r−l)/2`.
///
/// Inaccessible left endpoints (including `−∞`) give `l_h = l`.
pub fn boundary_threshold_left(m: &SpeedMeasure, h: f64) -> Result<f64> {
    threshold(m, h, Side::Left)
}

/// Mirror image of [`boundary_threshold_left`].
pub fn boundary_threshold_right(m: &SpeedMeasure, h: f64) -> Result<f64> {
    threshold(m, h, Side::Right)
}

fn threshold(m: &SpeedMeasure, h: f64, side: Side) -> Result<f64> {
    ensure_arg!(h > 0.0 && h.is_finite(), "time step must be positive, got {h}");
    let space = m.space();
    let (l, r) = (space.left(), space.right());
    let (end, kind) = match side {
        Side::Left => (l, space.left_kind()),
        Side::Right => (r, space.right_kind()),
    };
    if kind == BoundaryKind::Inaccessible {
        return Ok(end);
    }
    let place = |a: f64| match side {
        Side::Left => l + a,
        Side::Right => r - a,
    };
    let cap = 0.5 * (r - l);
    let qtol = (m.quad_tol()).min(1e-3 * h);
    let g = |a: f64| m.triangle_unchecked(place(a), a, qtol);

    let mut lo = 0.0;
    let mut g_lo = 0.0;
    let mut hi = h.sqrt().min(cap);
    let mut g_hi = g(hi);
    while g_hi < h {
        if hi >= cap {
            return Ok(place(cap));
        }
        lo = hi;
        g_lo = g_hi;
        hi = (2.0 * hi).min(cap);
        g_hi = g(hi);
    }
    let tol_x = 1e-15 * end.abs().max(1.0);
    let a = solve_nondecreasing(g, lo, hi, g_lo, g_hi, h, 1e-12 * h, tol_x);
    Ok(place(a))
}

use super::{SpeedMeasure, StateSpace};
use crate::error::{Error, Result};

pub const DEFAULT_AUDIT_POINTS: usize = 4096;

/// Outcome of a grid audit of `m(dx) ≥ 2/(k1(1 + k2 x²)) dx`.
///
/// The audit compares densities pointwise on a finite grid: a failure is a
/// genuine violation, a pass only means none was found on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCReport {
    pub k1: f64,
    pub k2: u8,
    pub passes: bool,
    pub first_violation: Option<f64>,
}

/// `n` audit points inside the interior: uniform on bounded intervals,
/// geometric (from 1e-6 to 1e6 away from the finite end, or from the
/// origin on the whole line) toward infinite endpoints.
pub fn audit_grid(space: &StateSpace, n: usize) -> Vec<f64> {
    spaced_grid(space, n, -6.0, 6.0)
}

/// Like [`audit_grid`], with the geometric part running over
/// `10^lo_exp ..= 10^hi_exp`.
pub(crate) fn spaced_grid(space: &StateSpace, n: usize, lo_exp: f64, hi_exp: f64) -> Vec<f64> {
    let n = n.max(2);
    let (l, r) = (space.left(), space.right());
    let geometric = |i: usize, count: usize| {
        let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.5 };
        10f64.powf(lo_exp + (hi_exp - lo_exp) * t)
    };
    match (l.is_finite(), r.is_finite()) {
        (true, true) => (0..n).map(|i| l + (i as f64 + 0.5) * (r - l) / n as f64).collect(),
        (true, false) => (0..n).map(|i| l + geometric(i, n)).collect(),
        (false, true) => (0..n).rev().map(|i| r - geometric(i, n)).collect(),
        (false, false) => {
            let half = (n - 1) / 2;
            let mut g: Vec<f64> = (0..half).rev().map(|i| -geometric(i, half)).collect();
            g.push(0.0);
            g.extend((0..n - 1 - half).map(|i| geometric(i, n - 1 - half)));
            g
        }
    }
}

/// Audits the Cauchy-type lower bound on the density part at every grid point.
///
/// Atoms and singular parts only add mass, so checking the density is
/// enough for a pass on the grid.
pub fn check_condition_c(m: &SpeedMeasure, k1: f64, k2: u8, grid: &[f64]) -> Result<ConditionCReport> {
    if grid.is_empty() {
        return Err(Error::Argument("audit grid is empty".into()));
    }
    if !(k1 > 0.0 && k1.is_finite()) || k2 > 1 {
        return Err(Error::Argument(format!("need k1 > 0 and k2 ∈ {{0, 1}}, got ({k1}, {k2})")));
    }
    if let Some(&x) = grid.iter().find(|&&x| !m.space().in_interior(x)) {
        return Err(Error::Domain(format!("audit point {x} is outside the interior")));
    }
    let bound = |x: f64| 2.0 / (k1 * (1.0 + f64::from(k2) * x * x));
    let first_violation = grid.iter().copied().find(|&x| {
        let d = m.density().map_or(0.0, |d| d.eval(x));
        d < bound(x)
    });
    Ok(ConditionCReport { k1, k2, passes: first_violation.is_none(), first_violation })
}

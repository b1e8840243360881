use super::bits::BitSource;
use super::cache::LocalCache;
use crate::error::{ensure_arg, Error, Result};
use crate::measure::StateSpace;
use crate::scale::{ScaleFactorScheme, StepRule};

/// One realisation of the chain on the grid `0, h, …, N·h`, `N = ⌈T/h⌉`,
/// extended to `[0, N·h]` by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPath {
    pub h: f64,
    pub y0: f64,
    pub horizon: f64,
    pub nodes: Vec<f64>,
}

impl ChainPath {
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Right end `N·h` of the interpolation range.
    pub fn span(&self) -> f64 {
        self.steps() as f64 * self.h
    }

    /// Value of the interpolated path at time `t ∈ [0, N·h]`.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let span = self.span();
        let slack = 1e-12 * span.max(self.h);
        if !(t >= 0.0 && t <= span + slack) {
            return Err(Error::Argument(format!("time {t} outside [0, {span}]")));
        }
        Ok(interpolate_nodes(&self.nodes, self.h, t))
    }

    /// Value at the horizon `T`.
    pub fn terminal(&self) -> f64 {
        interpolate_nodes(&self.nodes, self.h, self.horizon)
    }

    /// `max_k |X_{kh}|` over the grid; equals the sup norm of the
    /// interpolated path on `[0, N·h]`.
    pub fn sup_norm(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Linear interpolation of grid values `nodes` (spacing `h`) at time `t`.
pub fn interpolate_nodes(nodes: &[f64], h: f64, t: f64) -> f64 {
    let n = nodes.len() - 1;
    let s = t / h;
    let k = s.floor();
    if k >= n as f64 {
        return nodes[n];
    }
    let k = k.max(0.0) as usize;
    let frac = s - k as f64;
    if frac == 0.0 {
        return nodes[k];
    }
    nodes[k] + frac * (nodes[k + 1] - nodes[k])
}

/// `⌈T/h⌉`, treating ratios within 1e-9 of an integer as that integer.
pub fn step_count(horizon: f64, h: f64) -> usize {
    let r = horizon / h;
    let nearest = r.round();
    if (r - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        r.ceil() as usize
    }
}

/// One chain transition `x ↦ x + ξ·a_h(x)` with the boundary guard.
#[inline]
pub(crate) fn advance(
    rule: &StepRule<'_>,
    cache: &mut LocalCache,
    space: &StateSpace,
    x: f64,
    sign: f64,
) -> Result<f64> {
    let a = match cache.get(x) {
        Some(a) => a,
        None => {
            let a = rule.scale_factor(x)?;
            cache.insert(x, a);
            a
        }
    };
    if a == 0.0 {
        return Ok(x);
    }
    let (l, r) = (space.left(), space.right());
    // Clipped steps land on the boundary exactly.
    if sign < 0.0 && a == x - l {
        return Ok(l);
    }
    if sign > 0.0 && a == r - x {
        return Ok(r);
    }
    let next = x + sign * a;
    let slack = 1e-12 * x.abs().max(1.0);
    if next < l {
        return if l - next <= slack {
            Ok(l)
        } else {
            Err(Error::Consistency(format!("step from {x} overshoots the left boundary {l} to {next}")))
        };
    }
    if next > r {
        return if next - r <= slack {
            Ok(r)
        } else {
            Err(Error::Consistency(format!("step from {x} overshoots the right boundary {r} to {next}")))
        };
    }
    Ok(next)
}

pub(crate) fn check_start(space: &StateSpace, y0: f64, horizon: f64) -> Result<()> {
    ensure_arg!(horizon >= 0.0 && horizon.is_finite(), "horizon must be finite and nonnegative, got {horizon}");
    if !space.contains(y0) {
        return Err(Error::Domain(format!("starting point {y0} is not in the state space")));
    }
    Ok(())
}

/// Fills `nodes` with `steps + 1` chain positions.
pub(crate) fn run_nodes(
    rule: &StepRule<'_>,
    cache: &mut LocalCache,
    y0: f64,
    steps: usize,
    signs: impl Iterator<Item = f64>,
    nodes: &mut Vec<f64>,
) -> Result<()> {
    let space = *rule.measure().space();
    nodes.clear();
    nodes.reserve(steps + 1);
    nodes.push(y0);
    let mut x = y0;
    for sign in signs.take(steps) {
        x = advance(rule, cache, &space, x, sign)?;
        nodes.push(x);
    }
    Ok(())
}

/// Simulates one path of the chain started at `y0` up to horizon `T`.
pub fn simulate_chain<B: BitSource>(
    scheme: &ScaleFactorScheme,
    h: f64,
    y0: f64,
    horizon: f64,
    bits: &B,
    path_index: u64,
) -> Result<ChainPath> {
    check_start(scheme.measure().space(), y0, horizon)?;
    let rule = scheme.at(h)?;
    let steps = step_count(horizon, h);
    let mut nodes = Vec::new();
    let mut cache = LocalCache::small();
    run_nodes(&rule, &mut cache, y0, steps, bits.signs(path_index), &mut nodes)?;
    Ok(ChainPath { h, y0, horizon, nodes })
}

/// Folds a path at `l` with `f(y) = l + |y − l|`, node by node.
///
/// The interpolation of the folded nodes differs from the fold of the
/// interpolated path only on segments that cross `l`.
pub fn apply_reflection(path: &ChainPath, l: f64) -> ChainPath {
    ChainPath { nodes: path.nodes.iter().map(|&y| l + (y - l).abs()).collect(), ..path.clone() }
}

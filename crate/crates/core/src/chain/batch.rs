use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::bits::{BitSource, BitStream};
use super::cache::LocalCache;
use super::path::{advance, check_start, run_nodes, step_count, ChainPath};
use crate::error::{ensure_arg, Result};
use crate::scale::{ScaleFactorScheme, StepRule};

/// Paths handed to one rayon task.
const CHUNK: usize = 512;

pub type PathFunctional = Arc<dyn Fn(&ChainPath) -> f64 + Send + Sync>;

/// What to record from each simulated path.
#[derive(Clone)]
pub enum Evaluation {
    /// `X^h_T`.
    Terminal,
    /// `F(X^h)` for a functional of the interpolated path.
    Functional(PathFunctional),
}

impl Evaluation {
    pub fn functional<F>(f: F) -> Self
    where
        F: Fn(&ChainPath) -> f64 + Send + Sync + 'static,
    {
        Self::Functional(Arc::new(f))
    }
}

impl fmt::Debug for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Terminal => f.write_str("Terminal"),
            Self::Functional(_) => f.write_str("Functional(..)"),
        }
    }
}

/// Evaluates `n_paths` independent paths; entry `j` uses the bits of path `j`.
pub fn simulate_terminal_batch(
    scheme: &ScaleFactorScheme,
    h: f64,
    y0: f64,
    horizon: f64,
    n_paths: usize,
    master_seed: u64,
    evaluation: &Evaluation,
) -> Result<Vec<f64>> {
    simulate_batch_with(scheme, h, y0, horizon, n_paths, &BitStream::new(master_seed), evaluation)
}

/// As [`simulate_terminal_batch`] with an arbitrary bit source.
pub fn simulate_batch_with<B: BitSource>(
    scheme: &ScaleFactorScheme,
    h: f64,
    y0: f64,
    horizon: f64,
    n_paths: usize,
    bits: &B,
    evaluation: &Evaluation,
) -> Result<Vec<f64>> {
    ensure_arg!(n_paths >= 1, "n_paths must be at least 1");
    check_start(scheme.measure().space(), y0, horizon)?;
    let rule = scheme.at(h)?;
    let steps = step_count(horizon, h);
    let mut out = vec![0.0; n_paths];
    out.par_chunks_mut(CHUNK).enumerate().try_for_each_init(
        || (LocalCache::large(), Vec::new()),
        |(cache, nodes), (c, chunk)| -> Result<()> {
            for (i, slot) in chunk.iter_mut().enumerate() {
                let j = (c * CHUNK + i) as u64;
                *slot = match evaluation {
                    Evaluation::Terminal => terminal_value(&rule, cache, y0, horizon, steps, bits.signs(j))?,
                    Evaluation::Functional(f) => {
                        run_nodes(&rule, cache, y0, steps, bits.signs(j), nodes)?;
                        let path = ChainPath { h, y0, horizon, nodes: std::mem::take(nodes) };
                        let v = f(&path);
                        *nodes = path.nodes;
                        v
                    }
                };
            }
            Ok(())
        },
    )?;
    Ok(out)
}

/// Full paths `0..n_paths`, for dumps and diagnostics.
pub fn simulate_paths<B: BitSource>(
    scheme: &ScaleFactorScheme,
    h: f64,
    y0: f64,
    horizon: f64,
    n_paths: usize,
    bits: &B,
) -> Result<Vec<ChainPath>> {
    ensure_arg!(n_paths >= 1, "n_paths must be at least 1");
    check_start(scheme.measure().space(), y0, horizon)?;
    let rule = scheme.at(h)?;
    let steps = step_count(horizon, h);
    (0..n_paths as u64)
        .into_par_iter()
        .map_init(LocalCache::small, |cache, j| {
            let mut nodes = Vec::new();
            run_nodes(&rule, cache, y0, steps, bits.signs(j), &mut nodes)?;
            Ok(ChainPath { h, y0, horizon, nodes })
        })
        .collect()
}

/// `X^h_T` without storing the path: only the last two nodes are kept.
fn terminal_value(
    rule: &StepRule<'_>,
    cache: &mut LocalCache,
    y0: f64,
    horizon: f64,
    steps: usize,
    signs: impl Iterator<Item = f64>,
) -> Result<f64> {
    if steps == 0 {
        return Ok(y0);
    }
    let space = *rule.measure().space();
    let mut prev = y0;
    let mut x = y0;
    for sign in signs.take(steps) {
        prev = x;
        x = advance(rule, cache, &space, x, sign)?;
    }
    let h = rule.h();
    let frac = horizon / h - (steps - 1) as f64;
    if frac >= 1.0 {
        Ok(x)
    } else if frac <= 0.0 {
        Ok(prev)
    } else {
        Ok(prev + frac * (x - prev))
    }
}

use serde::Serialize;

use crate::chain::{simulate_terminal_batch, ChainPath, Evaluation};
use crate::error::{ensure_arg, Result};
use crate::scale::ScaleFactorScheme;
use crate::stats::{bootstrap_std_error, mean_and_std_error, BOOTSTRAP_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Monte Carlo mean of `F(X^h)` with a bootstrap standard error.
pub fn functional_expectation<F>(
    scheme: &ScaleFactorScheme,
    h: f64,
    y0: f64,
    horizon: f64,
    functional: F,
    n: usize,
    master_seed: u64,
) -> Result<FunctionalEstimate>
where
    F: Fn(&ChainPath) -> f64 + Send + Sync + 'static,
{
    ensure_arg!(n >= 1, "n must be at least 1");
    let values = simulate_terminal_batch(scheme, h, y0, horizon, n, master_seed, &Evaluation::functional(functional))?;
    Ok(summarize(&values))
}

/// Mean and bootstrap standard error of per-path values.
pub fn summarize(values: &[f64]) -> FunctionalEstimate {
    let mean_of = |xs: &[f64]| mean_and_std_error(xs).0;
    FunctionalEstimate {
        mean: mean_of(values),
        std_error: bootstrap_std_error(values, mean_of, BOOTSTRAP_SEED),
        n: values.len(),
    }
}

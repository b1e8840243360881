use std::sync::Arc;

use rand_distr::{Distribution, Normal};

use crate::chain::{simulate_terminal_batch, Evaluation};
use crate::error::{ensure_arg, Error, Result};
use crate::rng::{stream, DOMAIN_REFERENCE};
use crate::scale::ScaleFactorScheme;

/// Draws iid samples from (an approximation of) the law of `Y_T`.
pub trait ReferenceSampler: Sync {
    fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>>;

    fn describe(&self) -> String;
}

/// Exact law of Brownian motion at time `T`: `N(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianReference {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianReference {
    /// Law of `Y_T` for `m = c·dx` on ℝ started at `y0`: variance `2T/c`.
    pub fn for_lebesgue(c: f64, y0: f64, horizon: f64) -> Self {
        Self { mean: y0, variance: 2.0 * horizon / c }
    }
}

impl ReferenceSampler for GaussianReference {
    fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let normal = Normal::new(self.mean, self.variance.sqrt())
            .map_err(|e| Error::Argument(format!("invalid Gaussian reference: {e}")))?;
        let mut rng = stream(seed, DOMAIN_REFERENCE, 0);
        Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
    }

    fn describe(&self) -> String {
        format!("exact normal(mean = {}, variance = {})", self.mean, self.variance)
    }
}

/// The chain itself at a fine step `h_ref`, used as a stand-in for `Y_T`
/// when no exact sampler is available.
#[derive(Debug, Clone)]
pub struct ChainReference {
    pub scheme: Arc<ScaleFactorScheme>,
    pub h_ref: f64,
    pub y0: f64,
    pub horizon: f64,
}

impl ReferenceSampler for ChainReference {
    fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        simulate_terminal_batch(
            &self.scheme,
            self.h_ref,
            self.y0,
            self.horizon,
            n,
            seed ^ DOMAIN_REFERENCE,
            &Evaluation::Terminal,
        )
    }

    fn describe(&self) -> String {
        format!("fine-step chain self-reference (h_ref = {})", self.h_ref)
    }
}

/// A frozen sample returned verbatim for every request of its size.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedSample {
    pub values: Vec<f64>,
    pub label: String,
}

impl FixedSample {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Self {
        Self { values, label: label.into() }
    }

    /// Freezes `n` draws of another sampler.
    pub fn freeze(source: &dyn ReferenceSampler, n: usize, seed: u64) -> Result<Self> {
        Ok(Self { values: source.sample(n, seed)?, label: format!("frozen {}", source.describe()) })
    }
}

impl ReferenceSampler for FixedSample {
    fn sample(&self, n: usize, _seed: u64) -> Result<Vec<f64>> {
        ensure_arg!(n == self.values.len(), "frozen sample has {} values, {n} requested", self.values.len());
        Ok(self.values.clone())
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

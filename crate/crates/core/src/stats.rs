//! Sample summaries and bootstrap standard errors.

use rand::Rng;
use rayon::prelude::*;

use crate::rng::{stream, DOMAIN_BOOTSTRAP};

pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Resampling seed shared by every bootstrap in the crate.
pub const BOOTSTRAP_SEED: u64 = 0x0b00_7572_6170;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; 0 for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let shift = xs[0];
    let d = xs.iter().map(|x| x - shift).sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - shift - d).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Mean and its standard error `s/√n`, computed around the first value so
/// that a constant sample gives exactly that constant with error 0.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let shift = xs[0];
    let n = xs.len() as f64;
    let d: f64 = xs.iter().map(|x| x - shift).sum::<f64>() / n;
    let var = if xs.len() < 2 { 0.0 } else { xs.iter().map(|x| (x - shift - d).powi(2)).sum::<f64>() / (n - 1.0) };
    (shift + d, (var / n).sqrt())
}

/// Bootstrap standard error of `statistic` over `BOOTSTRAP_RESAMPLES`
/// resamples with replacement; resample `r` uses its own keyed stream.
pub fn bootstrap_std_error<S>(xs: &[f64], statistic: S, seed: u64) -> f64
where
    S: Fn(&[f64]) -> f64 + Sync,
{
    let n = xs.len();
    let values: Vec<f64> = (0..BOOTSTRAP_RESAMPLES as u64)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            let mut rng = stream(seed, DOMAIN_BOOTSTRAP, r);
            buf.clear();
            buf.extend((0..n).map(|_| xs[rng.gen_range(0..n)]));
            statistic(buf)
        })
        .collect();
    sample_variance(&values).sqrt()
}

/// Multiplicities of one multinomial resample of `n` items.
pub(crate) fn resample_counts(n: usize, seed: u64, r: u64, counts: &mut Vec<u32>) {
    let mut rng = stream(seed, DOMAIN_BOOTSTRAP, r);
    counts.clear();
    counts.resize(n, 0);
    for _ in 0..n {
        counts[rng.gen_range(0..n)] += 1;
    }
}

use rayon::prelude::*;

use crate::error::{ensure_arg, Result};
use crate::stats::{resample_counts, sample_variance, BOOTSTRAP_RESAMPLES};

/// Empirical `W_p` between two equal-size samples via the sorted coupling.
pub fn empirical_wasserstein_p(xs: &[f64], ys: &[f64], p: f64) -> Result<f64> {
    check_inputs(xs, ys, p)?;
    let xs = sorted(xs);
    let ys = sorted(ys);
    Ok(wasserstein_sorted(&xs, &ys, p))
}

fn check_inputs(xs: &[f64], ys: &[f64], p: f64) -> Result<()> {
    ensure_arg!(!xs.is_empty() && !ys.is_empty(), "samples must be nonempty");
    ensure_arg!(xs.len() == ys.len(), "sample sizes differ: {} vs {}", xs.len(), ys.len());
    ensure_arg!(p >= 1.0 && p.is_finite(), "p must be a finite number ≥ 1, got {p}");
    ensure_arg!(xs.iter().chain(ys).all(|v| v.is_finite()), "samples contain non-finite values");
    Ok(())
}

pub(crate) fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

#[inline]
fn power(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

pub(crate) fn wasserstein_sorted(xs: &[f64], ys: &[f64], p: f64) -> f64 {
    let s: f64 = xs.iter().zip(ys).map(|(x, y)| power((x - y).abs(), p)).sum();
    (s / xs.len() as f64).powf(1.0 / p)
}

/// `W_p` between multinomial resamples of two sorted samples, given the
/// multiplicities; the resamples stay sorted so no sort is needed.
fn wasserstein_counts(xs: &[f64], cx: &[u32], ys: &[f64], cy: &[u32], p: f64) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut rx, mut ry) = (0u32, 0u32);
    let mut total = 0.0;
    loop {
        while rx == 0 && i < xs.len() {
            rx = cx[i];
            i += 1;
        }
        while ry == 0 && j < ys.len() {
            ry = cy[j];
            j += 1;
        }
        if rx == 0 || ry == 0 {
            break;
        }
        let m = rx.min(ry);
        total += m as f64 * power((xs[i - 1] - ys[j - 1]).abs(), p);
        rx -= m;
        ry -= m;
    }
    (total / xs.len() as f64).powf(1.0 / p)
}

/// `W_p` and its bootstrap standard error, both samples resampled independently.
pub fn wasserstein_with_std_error(xs: &[f64], ys: &[f64], p: f64, seed: u64) -> Result<(f64, f64)> {
    check_inputs(xs, ys, p)?;
    let xs = sorted(xs);
    let ys = sorted(ys);
    let estimate = wasserstein_sorted(&xs, &ys, p);
    let n = xs.len();
    let reps: Vec<f64> = (0..BOOTSTRAP_RESAMPLES as u64)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(cx, cy), r| {
                resample_counts(n, seed, 2 * r, cx);
                resample_counts(n, seed, 2 * r + 1, cy);
                wasserstein_counts(&xs, cx, &ys, cy, p)
            },
        )
        .collect();
    Ok((estimate, sample_variance(&reps).sqrt()))
}

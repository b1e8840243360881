use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{interpolate_nodes, step_count};
use crate::error::{ensure_arg, Error, Result};
use crate::rng::{stream, DOMAIN_DIAGNOSTIC};
use crate::scale::ScaleFactorScheme;
use crate::stats::{bootstrap_std_error, BOOTSTRAP_SEED};

pub const PATH_DIAGNOSTIC_WARNING: &str = "biased diagnostic: Brownian paths are observed on a finite grid, \
so crossings of ±a_h are detected late and the embedded chain is only approximate";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathDiagnostic {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
    pub warning: &'static str,
}

/// Approximate `‖sup_t |X^h_t − Y_t|‖_{L^p}` for Brownian models, coupling a
/// grid-simulated Brownian path with the chain embedded in it by crossing
/// detection. Biased; see [`PATH_DIAGNOSTIC_WARNING`].
#[allow(clippy::too_many_arguments)]
pub fn path_distance_diagnostic(
    scheme: &ScaleFactorScheme,
    h: f64,
    y0: f64,
    horizon: f64,
    p: f64,
    n: usize,
    fine_factor: usize,
    master_seed: u64,
) -> Result<PathDiagnostic> {
    let c = scheme
        .measure()
        .brownian_constant()
        .ok_or_else(|| Error::UnsupportedModel("path diagnostic needs m = c·dx on the real line".into()))?;
    ensure_arg!(n >= 1, "n must be at least 1");
    ensure_arg!(fine_factor >= 64, "fine_factor must be at least 64, got {fine_factor}");
    ensure_arg!(p >= 1.0 && p.is_finite(), "p must be a finite number ≥ 1");
    ensure_arg!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive");
    let a = scheme.evaluate(h, y0)?;
    let steps = step_count(horizon, h);
    let dt = horizon / (fine_factor * ((horizon / h).floor() as usize).max(1)) as f64;
    let sigma = (2.0 / c).sqrt();
    let sups: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream(master_seed, DOMAIN_DIAGNOSTIC, j);
            let mut w = vec![y0];
            let mut nodes = vec![y0];
            let mut t = 0.0;
            while nodes.len() <= steps || t < horizon {
                let z: f64 = StandardNormal.sample(&mut rng);
                let next = w[w.len() - 1] + sigma * dt.sqrt() * z;
                w.push(next);
                t += dt;
                let anchor = nodes[nodes.len() - 1];
                if (next - anchor).abs() >= a {
                    nodes.push(anchor + a * (next - anchor).signum());
                }
            }
            let mut sup = 0.0f64;
            for (i, wi) in w.iter().enumerate() {
                let s = i as f64 * dt;
                if s > horizon + 1e-12 * horizon {
                    break;
                }
                let x = interpolate_nodes(&nodes[..=steps], h, s);
                sup = sup.max((x - wi).abs());
            }
            sup
        })
        .collect();
    let lp = move |xs: &[f64]| (xs.iter().map(|x| x.powf(p)).sum::<f64>() / xs.len() as f64).powf(1.0 / p);
    Ok(PathDiagnostic {
        estimate: lp(&sups),
        std_error: bootstrap_std_error(&sups, lp, BOOTSTRAP_SEED),
        n,
        warning: PATH_DIAGNOSTIC_WARNING,
    })
}

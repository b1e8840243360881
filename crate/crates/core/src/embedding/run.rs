use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::exit_time::ExitTimeSampler;
use crate::error::{ensure_arg, Error, Result};
use crate::rng::{open_uniform, stream, DOMAIN_EXIT};
use crate::stats::{bootstrap_std_error, mean, mean_and_std_error, sample_variance, BOOTSTRAP_SEED};

/// Stopping times `τ_0 = 0 < τ_1 < … < τ_N` of the Brownian embedding,
/// stored path after path.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRun {
    pub h: f64,
    pub steps: usize,
    pub paths: usize,
    pub tau: Vec<f64>,
}

impl EmbeddingRun {
    /// `τ_0, …, τ_N` of path `j`.
    pub fn path(&self, j: usize) -> &[f64] {
        let w = self.steps + 1;
        &self.tau[j * w..(j + 1) * w]
    }

    pub fn terminal_times(&self) -> Vec<f64> {
        (0..self.paths).map(|j| self.path(j)[self.steps]).collect()
    }

    /// `sup_k |τ_k − kh|` per path.
    pub fn sup_errors(&self) -> Vec<f64> {
        (0..self.paths)
            .map(|j| self.path(j).iter().enumerate().fold(0.0f64, |m, (k, t)| m.max((t - k as f64 * self.h).abs())))
            .collect()
    }

    /// Writes rows `path_index,k,tau_k`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "path_index,k,tau_k")?;
        for j in 0..self.paths {
            for (k, t) in self.path(j).iter().enumerate() {
                writeln!(out, "{j},{k},{t}")?;
            }
        }
        Ok(())
    }
}

/// `τ_{k+1} − τ_k = h·H_k` with `H_k` iid unit exit times; path `j` draws
/// its uniforms from its own keyed stream.
pub fn simulate_embedding_times(h: f64, steps: usize, n_paths: usize, master_seed: u64) -> Result<EmbeddingRun> {
    ensure_arg!(h > 0.0 && h.is_finite(), "h must be positive, got {h}");
    ensure_arg!(steps >= 1, "need at least one step");
    ensure_arg!(n_paths >= 1, "need at least one path");
    let sampler = ExitTimeSampler::default();
    let w = steps + 1;
    let mut tau = vec![0.0; n_paths * w];
    tau.par_chunks_mut(w).enumerate().try_for_each(|(j, row)| -> Result<()> {
        let mut rng = stream(master_seed, DOMAIN_EXIT, j as u64);
        for k in 1..w {
            row[k] = row[k - 1] + h * sampler.sample(open_uniform(&mut rng))?;
        }
        Ok(())
    })?;
    Ok(EmbeddingRun { h, steps, paths: n_paths, tau })
}

/// Monte Carlo summary of the temporal error of an embedding run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemporalErrorStats {
    pub h: f64,
    pub steps: usize,
    pub paths: usize,
    pub p: f64,
    /// `‖sup_k |τ_k − kh|‖_{L^p}`.
    pub sup_error_lp: f64,
    pub sup_error_lp_se: f64,
    pub mean_tau_n: f64,
    pub mean_tau_n_se: f64,
    pub var_tau_n: f64,
    pub var_tau_n_se: f64,
    /// `E[(τ_N − Nh)²]`.
    pub mean_sq_error_n: f64,
}

impl TemporalErrorStats {
    /// `(E[(τ_N − Nh)²]/4)^{1/4}`: the resulting lower estimate of
    /// `‖W_{τ_N} − W_T‖_{L⁴}` for any `T ∈ [Nh, (N+1)h)`.
    pub fn implied_l4_bound(&self) -> f64 {
        (self.mean_sq_error_n / 4.0).powf(0.25)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numeric struct")
    }
}

pub fn temporal_error_stats(run: &EmbeddingRun, p: f64) -> Result<TemporalErrorStats> {
    ensure_arg!(p >= 1.0 && p.is_finite(), "p must be a finite number ≥ 1, got {p}");
    if run.paths == 0 || run.tau.len() != run.paths * (run.steps + 1) {
        return Err(Error::Argument("embedding run is empty or malformed".into()));
    }
    let lp = move |xs: &[f64]| (xs.iter().map(|x| x.powf(p)).sum::<f64>() / xs.len() as f64).powf(1.0 / p);
    let sup = run.sup_errors();
    let terminal = run.terminal_times();
    let (mean_tau_n, mean_tau_n_se) = mean_and_std_error(&terminal);
    let target = run.steps as f64 * run.h;
    let sq: Vec<f64> = terminal.iter().map(|t| (t - target) * (t - target)).collect();
    Ok(TemporalErrorStats {
        h: run.h,
        steps: run.steps,
        paths: run.paths,
        p,
        sup_error_lp: lp(&sup),
        sup_error_lp_se: bootstrap_std_error(&sup, lp, BOOTSTRAP_SEED),
        mean_tau_n,
        mean_tau_n_se,
        var_tau_n: sample_variance(&terminal),
        var_tau_n_se: bootstrap_std_error(&terminal, sample_variance, BOOTSTRAP_SEED),
        mean_sq_error_n: mean(&sq),
    })
}

/// `((T − h)·Var(H)/4)^{1/4} h^{1/4}` with `Var(H) = 2/3`.
pub fn lower_bound_check(h: f64, horizon: f64) -> Result<f64> {
    ensure_arg!(horizon > 0.0 && horizon.is_finite(), "horizon must be positive, got {horizon}");
    ensure_arg!(h > 0.0 && h < horizon.min(1.0), "need 0 < h < min(1, T), got h = {h}, T = {horizon}");
    Ok(((horizon - h) * super::VAR_UNIT_EXIT_TIME / 4.0).powf(0.25) * h.powf(0.25))
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::json;

use super::config::{model_from, read_table, ExperimentConfig};
use super::{Cli, CliError, Command};
use crate::analysis::{fit_rate, marginal_rate_study, FixedSample, RateStudy};
use crate::chain::{simulate_paths, simulate_terminal_batch, write_paths_csv, write_values_csv, BitStream, Evaluation};
use crate::embedding::{lower_bound_check, simulate_embedding_times, temporal_error_stats, EmbeddingRun};
use crate::measure::{audit_grid, check_condition_c, DEFAULT_AUDIT_POINTS};
use crate::models::list_models;
use crate::rng::derive_seed;
use crate::scale::verify_condition_a;
use crate::stats::mean_and_std_error;

/// Files produced by one command, written together at the end.
struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn add_bytes(&mut self, name: &str, bytes: Vec<u8>) {
        self.add(name, String::from_utf8(bytes).expect("ascii output"));
    }

    fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents)
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn finite(values: &[f64], what: &str) -> Result<(), CliError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("non-finite value in {what}")))
    }
}

pub(super) fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::ListModels => {
            print!("{}", list_models());
            Ok(())
        }
        Command::Scale { model, h, y_grid } => scale(cli, model.as_deref(), *h, y_grid.as_deref()),
        command => {
            let path = cli.config.as_ref().ok_or_else(|| CliError::Validation("--config is required".into()))?;
            let mut config = ExperimentConfig::load(path)?;
            if let Some(seed) = cli.seed {
                config.run.seed = seed;
            }
            if let Some(out) = &cli.out {
                config.run.out = out.clone();
            }
            config.validate()?;
            let (name, artifacts) = match command {
                Command::Simulate => ("simulate", simulate(&config)?),
                Command::RateStudy => ("rate-study", rate_study(&config)?),
                Command::EmbedStudy => ("embed-study", embed_study(&config)?),
                Command::CheckConditions => ("check-conditions", check_conditions(&config)?),
                Command::ListModels | Command::Scale { .. } => unreachable!(),
            };
            finish(name, &config, artifacts)
        }
    }
}

fn finish(name: &str, config: &ExperimentConfig, mut artifacts: Artifacts) -> Result<(), CliError> {
    let effective = config.to_toml();
    let listed: Vec<&str> = artifacts.files.iter().map(|(n, _)| n.as_str()).collect();
    let manifest = json!({
        "tool": "gendiff",
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "seed": config.run.seed,
        "model": config.model.id(),
        "artifacts": listed,
        "config": effective,
    });
    artifacts.add("config.toml", effective);
    artifacts.add("manifest.json", serde_json::to_string_pretty(&manifest).expect("json value") + "\n");
    artifacts.write(&config.run.out)?;
    eprintln!("{name}: wrote {} files to {}", artifacts.files.len(), config.run.out.display());
    Ok(())
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("--y-grid expects start:end:count, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !(a.is_finite() && b.is_finite()) || (n > 1 && b <= a) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn scale(cli: &Cli, model: Option<&Path>, h: f64, y_grid: Option<&str>) -> Result<(), CliError> {
    let path = model
        .or(cli.config.as_deref())
        .ok_or_else(|| CliError::Validation("scale needs --model or --config".into()))?;
    let table = read_table(path)?;
    let (spec, model_table) = model_from(&table)?;
    let h_max = table.get("run").and_then(|r| r.get("h_max")).and_then(|v| v.as_float()).unwrap_or(0.5);
    let out = cli.out.clone().unwrap_or_else(|| {
        table
            .get("run")
            .and_then(|r| r.get("out"))
            .and_then(|v| v.as_str())
            .map_or_else(|| PathBuf::from("out"), PathBuf::from)
    });
    let scheme = spec.scheme(h_max)?;
    let m = scheme.measure();
    let grid = match y_grid {
        Some(s) => parse_grid(s)?,
        None => audit_grid(m.space(), 101),
    };
    if let Some(y) = grid.iter().find(|&&y| !m.space().in_interior(y)) {
        return Err(CliError::Validation(format!("grid point {y} is not in the interior of the state space")));
    }
    let rule = scheme.at(h)?;
    let mut csv = String::from("y,a_h,residual\n");
    for &y in &grid {
        let a = rule.scale_factor(y)?;
        let residual = m.triangle_integral(y, a)? - h;
        finite(&[a, residual], "scale factors")?;
        writeln!(csv, "{y},{a},{residual}").unwrap();
    }
    let mut artifacts = Artifacts::new();
    artifacts.add("scale.csv", csv);
    let manifest = json!({
        "tool": "gendiff",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "scale",
        "model": spec.id(),
        "h": h,
        "h_max": h_max,
        "points": grid.len(),
        "model_table": toml::to_string(&model_table).expect("serializable table"),
    });
    artifacts.add("manifest.json", serde_json::to_string_pretty(&manifest).expect("json value") + "\n");
    artifacts.write(&out)?;
    eprintln!("scale: wrote {} rows to {}", grid.len(), out.join("scale.csv").display());
    Ok(())
}

fn simulate(config: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let r = &config.run;
    let scheme = config.model.scheme(r.h_max)?;
    let mut artifacts = Artifacts::new();
    let mut summary = String::from("h,mean,std_error,n\n");
    for (i, &h) in r.h_list.iter().enumerate() {
        let seed = derive_seed(r.seed, i as u64);
        let values = simulate_terminal_batch(&scheme, h, r.y0, r.horizon, r.n_paths, seed, &Evaluation::Terminal)?;
        finite(&values, "terminal values")?;
        let (mean, se) = mean_and_std_error(&values);
        writeln!(summary, "{h},{mean},{se},{}", values.len()).unwrap();
        let mut buf = Vec::new();
        write_values_csv(&mut buf, &values)?;
        artifacts.add_bytes(&format!("terminal_{i}.csv"), buf);
        if i == 0 && r.dump_paths > 0 {
            let paths =
                simulate_paths(&scheme, h, r.y0, r.horizon, r.dump_paths.min(r.n_paths), &BitStream::new(seed))?;
            let mut buf = Vec::new();
            write_paths_csv(&mut buf, &paths)?;
            artifacts.add_bytes("paths.csv", buf);
        }
    }
    artifacts.add("simulate_summary.csv", summary);
    Ok(artifacts)
}

fn rate_study(config: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let r = &config.run;
    let scheme = Arc::new(config.model.scheme(r.h_max)?);
    let h_min = r.h_list.iter().copied().fold(f64::INFINITY, f64::min);
    let source = config.model.reference(scheme.clone(), r.y0, r.horizon, h_min / 16.0);
    let reference = FixedSample::freeze(source.as_ref(), r.n_paths, derive_seed(r.seed, u64::MAX))?;
    let study =
        RateStudy { y0: r.y0, horizon: r.horizon, h_list: r.h_list.clone(), p: r.p, n: r.n_paths, master_seed: r.seed };
    let table = marginal_rate_study(&scheme, &study, &reference)?;
    let estimates: Vec<f64> = table.rows.iter().flat_map(|row| [row.estimate, row.std_error]).collect();
    finite(&estimates, "rate table")?;
    let mut artifacts = Artifacts::new();
    artifacts.add("rate_table.csv", table.to_csv());
    let mut report = format!("reference = {}\n", reference.label);
    if table.rows.len() >= 3 && table.rows.iter().all(|row| row.estimate > 0.0) {
        report.push_str(&fit_rate(&table)?.report());
    } else {
        report.push_str("fit = skipped (needs at least 3 positive rows)\n");
    }
    artifacts.add("rate_fit.txt", report);
    Ok(artifacts)
}

fn embed_study(config: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let r = &config.run;
    let scheme = config.model.scheme(r.h_max)?;
    if scheme.measure().brownian_constant().is_none() {
        return Err(CliError::Validation(format!(
            "embed-study supports Brownian models only, not `{}`",
            config.model.id()
        )));
    }
    let mut artifacts = Artifacts::new();
    let mut csv = String::from(
        "h,steps,paths,sup_error_lp,sup_error_lp_se,var_tau_n,var_tau_n_se,var_identity,implied_l4_bound,lower_bound\n",
    );
    let mut reports = Vec::new();
    for (i, &h) in r.h_list.iter().enumerate() {
        let steps = ((r.horizon / h).floor() as usize).max(1);
        let run = simulate_embedding_times(h, steps, r.n_paths, derive_seed(r.seed, i as u64))?;
        let stats = temporal_error_stats(&run, r.p)?;
        let identity = h * h * steps as f64 * crate::embedding::VAR_UNIT_EXIT_TIME;
        let bound = if h < r.horizon.min(1.0) { lower_bound_check(h, r.horizon)? } else { f64::NAN };
        finite(
            &[stats.sup_error_lp, stats.var_tau_n, stats.sup_error_lp_se, stats.var_tau_n_se],
            "embedding statistics",
        )?;
        writeln!(
            csv,
            "{h},{steps},{},{},{},{},{},{identity},{},{bound}",
            stats.paths,
            stats.sup_error_lp,
            stats.sup_error_lp_se,
            stats.var_tau_n,
            stats.var_tau_n_se,
            stats.implied_l4_bound()
        )
        .unwrap();
        reports.push(json!({ "stats": stats, "var_identity": identity, "lower_bound": bound }));
        if i == 0 && r.dump_paths > 0 {
            let k = r.dump_paths.min(r.n_paths);
            let head = EmbeddingRun { tau: run.tau[..k * (steps + 1)].to_vec(), paths: k, ..run };
            let mut buf = Vec::new();
            head.write_csv(&mut buf)?;
            artifacts.add_bytes("embedding_tau.csv", buf);
        }
    }
    artifacts.add("embed_summary.csv", csv);
    artifacts.add("embed_summary.json", serde_json::to_string_pretty(&reports).expect("json value") + "\n");
    Ok(artifacts)
}

fn check_conditions(config: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let r = &config.run;
    let c = &config.conditions;
    let scheme = config.model.scheme(r.h_max)?;
    let m = scheme.measure();
    let c_report = check_condition_c(m, c.k1, c.k2, &audit_grid(m.space(), DEFAULT_AUDIT_POINTS))?;
    let a_report = verify_condition_a(&scheme, c.lambda, &r.h_list, &audit_grid(m.space(), c.grid_points))?;
    let mut text = String::new();
    writeln!(text, "condition_c.k1 = {}", c_report.k1).unwrap();
    writeln!(text, "condition_c.k2 = {}", c_report.k2).unwrap();
    writeln!(text, "condition_c.passes = {}", c_report.passes).unwrap();
    match c_report.first_violation {
        Some(x) => writeln!(text, "condition_c.first_violation = {x}").unwrap(),
        None => writeln!(text, "condition_c.first_violation = none").unwrap(),
    }
    writeln!(text, "condition_c.note = grid audit: a pass means no violation on {DEFAULT_AUDIT_POINTS} points")
        .unwrap();
    writeln!(text, "condition_a.lambda = {}", a_report.lambda).unwrap();
    writeln!(text, "condition_a.k_hat = {}", a_report.k_hat).unwrap();
    writeln!(text, "condition_a.gamma_hat = {}", a_report.gamma_hat).unwrap();
    writeln!(text, "condition_a.gamma_ok = {}", a_report.gamma_ok).unwrap();
    writeln!(text, "condition_a.note = grid maxima, so k_hat and gamma_hat are lower estimates").unwrap();
    let mut csv = String::from("h,residual,points\n");
    for row in &a_report.rows {
        writeln!(csv, "{},{},{}", row.h, row.residual, row.points).unwrap();
    }
    finite(&[a_report.k_hat, a_report.gamma_hat], "condition (A) report")?;
    let mut artifacts = Artifacts::new();
    artifacts.add("conditions.txt", text);
    artifacts.add("condition_a.csv", csv);
    Ok(artifacts)
}

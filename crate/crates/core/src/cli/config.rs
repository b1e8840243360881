use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::models::ModelSpec;

fn default_p() -> f64 {
    2.0
}

fn default_h_max() -> f64 {
    0.5
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_dump() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub y0: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub h_list: Vec<f64>,
    pub n_paths: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Number of full paths written by `simulate` and `embed-study`.
    #[serde(default = "default_dump")]
    pub dump_paths: usize,
}

fn default_k1() -> f64 {
    1.0
}

fn default_lambda() -> f64 {
    0.5
}

fn default_grid_points() -> usize {
    512
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsConfig {
    #[serde(default = "default_k1")]
    pub k1: f64,
    #[serde(default)]
    pub k2: u8,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl Default for ConditionsConfig {
    fn default() -> Self {
        Self { k1: default_k1(), k2: 0, lambda: default_lambda(), grid_points: default_grid_points() }
    }
}

/// A parsed experiment file: `[model]`, `[run]` and optional `[conditions]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub model_table: toml::Table,
    pub run: RunConfig,
    pub conditions: ConditionsConfig,
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub(crate) fn read_table(path: &Path) -> Result<toml::Table, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| validation(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| validation(format!("{}: {e}", path.display())))
}

pub(crate) fn model_from(table: &toml::Table) -> Result<(ModelSpec, toml::Table), CliError> {
    let model_table =
        table.get("model").and_then(|v| v.as_table()).ok_or_else(|| validation("missing [model] section"))?.clone();
    let model = ModelSpec::from_table(&model_table).map_err(|e| validation(e.to_string()))?;
    Ok((model, model_table))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_table(&read_table(path)?)
    }

    pub fn from_table(table: &toml::Table) -> Result<Self, CliError> {
        if let Some(k) = table.keys().find(|k| !["model", "run", "conditions"].contains(&k.as_str())) {
            return Err(validation(format!("unknown section `{k}`")));
        }
        let (model, model_table) = model_from(table)?;
        let run: RunConfig = table
            .get("run")
            .ok_or_else(|| validation("missing [run] section"))?
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| validation(format!("[run]: {}", e.message())))?;
        let conditions = match table.get("conditions") {
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| validation(format!("[conditions]: {}", e.message())))?,
            None => ConditionsConfig::default(),
        };
        Ok(Self { model, model_table, run, conditions })
    }

    /// Checks the run parameters against the model's state space.
    pub fn validate(&self) -> Result<(), CliError> {
        let r = &self.run;
        if !(r.h_max > 0.0 && r.h_max < 1.0) {
            return Err(validation(format!("h_max must lie in (0, 1), got {}", r.h_max)));
        }
        if r.h_list.is_empty() {
            return Err(validation("h_list is empty"));
        }
        if let Some(h) = r.h_list.iter().find(|&&h| !(h > 0.0 && h < r.h_max)) {
            return Err(validation(format!("h = {h} is outside (0, h_max = {})", r.h_max)));
        }
        if r.h_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(validation("h_list must be strictly decreasing"));
        }
        if r.n_paths == 0 {
            return Err(validation("n_paths must be at least 1"));
        }
        if !(r.horizon > 0.0 && r.horizon.is_finite()) {
            return Err(validation(format!("T must be positive and finite, got {}", r.horizon)));
        }
        if !(r.p >= 1.0 && r.p.is_finite()) {
            return Err(validation(format!("p must be at least 1, got {}", r.p)));
        }
        let m = self.model.build().map_err(|e| validation(e.to_string()))?;
        if !m.space().in_interior(r.y0) {
            return Err(validation(format!("y0 = {} is not in the interior of the state space", r.y0)));
        }
        Ok(())
    }

    /// The configuration as a TOML document, after command-line overrides.
    pub fn to_toml(&self) -> String {
        let mut doc = toml::Table::new();
        doc.insert("model".into(), toml::Value::Table(self.model_table.clone()));
        doc.insert("run".into(), toml::Value::try_from(&self.run).expect("serializable run table"));
        doc.insert("conditions".into(), toml::Value::try_from(&self.conditions).expect("serializable table"));
        toml::to_string(&doc).expect("serializable config")
    }
}

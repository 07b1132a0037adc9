//! TOML configuration: `[problem]`, `[tolerances]` and `[run]` tables.

use crate::CliError;
use halfspec::{ProblemSpec, Sign, Tolerances};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub p: f64,
    /// Shorthand for `a_plus = a_minus`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_plus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_minus: Option<String>,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "zero")]
    pub f: String,
    #[serde(default = "zero")]
    pub f_plus: String,
    #[serde(default = "zero")]
    pub f_minus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(rename = "K0", default = "hundred")]
    pub k0: f64,
    #[serde(rename = "K1", default = "hundred")]
    pub k1: f64,
}

fn zero() -> String {
    "0".into()
}

fn hundred() -> f64 {
    100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        self != Format::Json
    }
    pub fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FucikParameter {
    AlphaPlus,
    AlphaMinus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    pub k_max: usize,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// x-grid of the hypothesis audit.
    pub validate_grid: usize,
    /// Also write the shooting trajectories at their integrator nodes.
    pub trajectory: bool,
    pub fucik_k: usize,
    pub fucik_branch: Sign,
    pub fucik_parameter: FucikParameter,
    /// Explicit grid of the fixed coefficient; overrides the range below.
    pub fucik_grid: Option<Vec<f64>>,
    pub fucik_min: f64,
    pub fucik_max: f64,
    pub fucik_points: usize,
    /// Manual `tau` bracket for `solve`; skips the solvability check.
    pub bracket: Option<[f64; 2]>,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            k_max: 3,
            out: None,
            format: None,
            validate_grid: 65,
            trajectory: false,
            fucik_k: 1,
            fucik_branch: Sign::Plus,
            fucik_parameter: FucikParameter::AlphaPlus,
            fucik_grid: None,
            fucik_min: 1.0,
            fucik_max: 400.0,
            fucik_points: 40,
            bracket: None,
        }
    }
}

impl RunBlock {
    pub fn fucik_grid(&self) -> Vec<f64> {
        match &self.fucik_grid {
            Some(g) => g.clone(),
            None if self.fucik_points <= 1 => vec![self.fucik_min],
            None => (0..self.fucik_points)
                .map(|i| self.fucik_min + (self.fucik_max - self.fucik_min) * i as f64 / (self.fucik_points - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: ProblemBlock,
    #[serde(default)]
    tolerances: toml::Table,
    #[serde(default)]
    run: RunBlock,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub problem: ProblemBlock,
    pub tolerances: Tolerances,
    pub run: RunBlock,
}

pub fn load(path: &Path, overrides: &[String]) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text, overrides)
}

/// Parses a configuration and applies `key=value` tolerance overrides.
pub fn parse(text: &str, overrides: &[String]) -> Result<Config, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let mut table = raw.tolerances;
    for item in overrides.iter().flat_map(|o| o.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("tolerance override `{item}` is not key=value")))?;
        let one: toml::Table = format!("{} = {}", key.trim(), value.trim())
            .parse()
            .map_err(|e| CliError::Config(format!("tolerance override `{item}`: {e}")))?;
        table.extend(one);
    }
    let tolerances: Tolerances = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("[tolerances]: {e}")))?;
    tolerances.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Config {
        problem: raw.problem,
        tolerances,
        run: raw.run,
    })
}

impl ProblemBlock {
    pub fn spec(&self) -> Result<ProblemSpec, CliError> {
        let both = self.a.as_deref().unwrap_or("0");
        let mut b = ProblemSpec::builder(self.p)
            .a_plus(self.a_plus.as_deref().unwrap_or(both))
            .a_minus(self.a_minus.as_deref().unwrap_or(both))
            .lambda(self.lambda)
            .f(&self.f)
            .f_limits(&self.f_plus, &self.f_minus)
            .bounds(self.k0, self.k1);
        if let Some(rho) = self.rho {
            b = b.rho(rho);
        }
        b.build().map_err(CliError::from)
    }
}

//! Run configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use standing_pulse::analysis::linearize;
use standing_pulse::minimizer::MinimizeOptions;
use standing_pulse::{Grid, Params};

pub const OUTPUT_DIR_ENV: &str = "PULSE_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "pulse-output";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

/// Breakpoints of the piecewise-linear starting profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSpec {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 10.0, snapshot_every: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub beta_min: f64,
    pub beta_max: f64,
    pub steps: usize,
    pub workers: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { beta_min: 0.34, beta_max: 0.49, steps: 151, workers: 1 }
    }
}

/// Everything a run reads. Written back, fully resolved, as `config.json` in
/// the output directory, where it re-runs the same job.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<MinimizeOptions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<InitSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    fn require(value: Option<f64>, name: &str) -> anyhow::Result<f64> {
        value.with_context(|| format!("missing parameter `{name}` (flag --{name} or params.{name} in the config)"))
    }

    /// Fills `tau` and resolves the full parameter set.
    pub fn resolve_params(&mut self) -> anyhow::Result<Params> {
        let p = &mut self.params;
        p.tau.get_or_insert(1.0);
        let params = Params {
            d: Self::require(p.d, "d")?,
            tau: Self::require(p.tau, "tau")?,
            gamma: Self::require(p.gamma, "gamma")?,
            beta: Self::require(p.beta, "beta")?,
        };
        params.validate()?;
        Ok(params)
    }

    /// Fills the grid; the default length is `12 / sqrt(lambda1)` rounded up.
    pub fn resolve_grid(&mut self, params: &Params) -> anyhow::Result<Grid> {
        if self.grid.x_max.is_none() {
            let rate = linearize(params).slow_rate;
            if !(rate.is_finite() && rate > 0.0) {
                bail!("no default x_max: the linearization at these parameters has complex eigenvalues; pass --x-max");
            }
            self.grid.x_max = Some((12.0 / rate).ceil());
        }
        let n = *self.grid.n.get_or_insert(4096);
        Ok(Grid::new(self.grid.x_max.unwrap_or_default(), n)?)
    }

    pub fn output_dir(&mut self) -> PathBuf {
        self.output_dir
            .get_or_insert_with(|| {
                std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
            })
            .clone()
    }
}

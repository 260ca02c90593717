//! Experiment configuration, loaded from TOML and overridable from the CLI.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use alr_core::regressors::{RegConfig, RegKind};
use alr_core::selectors::IrdInit;
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Sample selection approaches compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "RS")]
    Rs,
    #[serde(rename = "P-ALICE")]
    Palice,
    #[serde(rename = "GSx")]
    Gsx,
    #[serde(rename = "RD")]
    Rd,
    #[serde(rename = "IRD")]
    Ird,
    #[serde(rename = "ID")]
    Id,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Rs, Method::Palice, Method::Gsx, Method::Rd, Method::Ird, Method::Id];

    pub fn label(self) -> &'static str {
        match self {
            Method::Rs => "RS",
            Method::Palice => "P-ALICE",
            Method::Gsx => "GSx",
            Method::Rd => "RD",
            Method::Ird => "IRD",
            Method::Id => "ID",
        }
    }

    /// Name of the generator stream. ID reuses IRD's so the two share their
    /// initialization and differ only in the scoring rule.
    pub fn seed_label(self) -> &'static str {
        match self {
            Method::Id => "IRD",
            other => other.label(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        Ok(match key.as_str() {
            "rs" | "random" => Method::Rs,
            "palice" => Method::Palice,
            "gsx" => Method::Gsx,
            "rd" => Method::Rd,
            "ird" => Method::Ird,
            "id" => Method::Id,
            _ => bail!("unknown method {s:?} (expected one of RS, P-ALICE, GSx, RD, IRD, ID)"),
        })
    }
}

pub fn parse_model(s: &str) -> Result<RegKind> {
    RegKind::parse(s.trim()).with_context(|| format!("unknown model {s:?} (expected Ridge, LASSO, LinearSVR or OLS)"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Dataset manifest; relative paths resolve against the working directory.
    pub registry: PathBuf,
    pub datasets: Vec<String>,
    pub methods: Vec<Method>,
    pub models: Vec<RegKind>,
    pub m_grid: Vec<usize>,
    pub runs: usize,
    pub master_seed: u64,
    pub c_max: usize,
    pub ird_init: IrdInit,
    /// Ridge and LASSO penalties; one model per value.
    pub lambda_grid: Vec<f64>,
    /// SVR box constraints; one model per value.
    pub svr_c_grid: Vec<f64>,
    pub epsilon_factor: f64,
    /// Share of each dataset used as the unlabeled pool.
    pub pool_fraction: f64,
    /// Train ridge with the P-ALICE importance weights.
    pub palice_weighted: bool,
    /// Fit z-score statistics on the pool only instead of the whole dataset.
    pub normalize_pool_only: bool,
    pub output_dir: PathBuf,
    /// Worker threads; all cores when absent.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            registry: PathBuf::from("data/registry.toml"),
            datasets: Vec::new(),
            methods: Method::ALL.to_vec(),
            models: vec![RegKind::Ridge, RegKind::Lasso, RegKind::LinearSvr],
            m_grid: (5..=15).collect(),
            runs: 100,
            master_seed: 0,
            c_max: 5,
            ird_init: IrdInit::Rd,
            lambda_grid: vec![0.5],
            svr_c_grid: vec![1.0],
            epsilon_factor: 0.1,
            pool_fraction: 0.5,
            palice_weighted: false,
            normalize_pool_only: false,
            output_dir: PathBuf::from("results"),
            threads: None,
        }
    }
}

/// A fully parameterized model: the kind plus its penalty or box constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: RegKind,
    /// Lambda for Ridge/LASSO, C for SVR, 0 for OLS.
    pub param: f64,
    pub config: RegConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid experiment config")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).context("serializing config")
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            bail!("no datasets configured");
        }
        self.validate_grid()
    }

    /// Everything except the dataset list, which callers with preloaded
    /// data do not need.
    pub(crate) fn validate_grid(&self) -> Result<()> {
        if self.methods.is_empty() {
            bail!("no methods configured");
        }
        if self.models.is_empty() {
            bail!("no models configured");
        }
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        if self.m_grid.is_empty() {
            bail!("the M grid is empty");
        }
        if self.m_grid.windows(2).any(|w| w[1] <= w[0]) {
            bail!("the M grid must be strictly increasing");
        }
        if self.m_grid[0] < 2 {
            bail!("every M must be at least 2");
        }
        if self.lambda_grid.is_empty() || self.lambda_grid.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
            bail!("lambda grid must be non-empty with finite values >= 0");
        }
        if self.svr_c_grid.is_empty() || self.svr_c_grid.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            bail!("SVR C grid must be non-empty with finite values > 0");
        }
        if !(self.epsilon_factor >= 0.0 && self.epsilon_factor.is_finite()) {
            bail!("epsilon factor must be >= 0");
        }
        if !(self.pool_fraction > 0.0 && self.pool_fraction < 1.0) {
            bail!("pool fraction must lie in (0, 1)");
        }
        if self.threads == Some(0) {
            bail!("threads must be at least 1");
        }
        Ok(())
    }

    /// Expands the model kinds over their parameter grids.
    pub fn model_specs(&self) -> Vec<ModelSpec> {
        let mut specs = Vec::new();
        for &kind in &self.models {
            match kind {
                RegKind::Ols => specs.push(ModelSpec {
                    kind,
                    param: 0.0,
                    config: RegConfig::ols(),
                }),
                RegKind::Ridge | RegKind::Lasso => {
                    for &lambda in &self.lambda_grid {
                        let config = if kind == RegKind::Ridge {
                            RegConfig::ridge(lambda)
                        } else {
                            RegConfig::lasso(lambda)
                        };
                        specs.push(ModelSpec {
                            kind,
                            param: lambda,
                            config,
                        });
                    }
                }
                RegKind::LinearSvr => {
                    for &c in &self.svr_c_grid {
                        let mut config = RegConfig::linear_svr(c);
                        config.epsilon_factor = self.epsilon_factor;
                        specs.push(ModelSpec { kind, param: c, config });
                    }
                }
            }
        }
        specs
    }
}

//! Run configuration. Every field has a default; a user file is merged over
//! the defaults and unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qergo::ensembles::BaseDistribution;
use qergo::experiments::ProtocolConfig;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every random stream of a run is derived from it.
    pub seed: u64,
    pub gen: GenConfig,
    pub identities: IdentitiesConfig,
    pub ergodicity: ErgodicityConfig,
    pub anderson: ErgodicityConfig,
    pub bs_check: BsCheckConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub n: usize,
    pub degree: usize,
    pub disorder: f64,
    pub base: BaseDistribution,
    /// Radius of the tree-likeness profile written to the manifest.
    pub profile_radius: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    pub instances: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    /// Potential values are uniform on `[-amplitude, amplitude]`.
    pub amplitude: f64,
    pub lambdas: Vec<f64>,
    pub etas: Vec<f64>,
    /// Imaginary parts used for the quasi-eigenvector equations.
    pub quasi_etas: Vec<f64>,
    /// Instances, from the front of the matrix, that run the operator suite.
    pub suite_instances: usize,
    pub suite_eta: f64,
    pub suite_eigenpairs: usize,
    pub suite_operands: usize,
    pub max_path_length: usize,
    pub paths_per_length: usize,
    pub zeta_tol: f64,
    /// Bound applied to every residual.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicityConfig {
    pub sizes: Vec<usize>,
    pub seeds_per_size: usize,
    pub degree: usize,
    pub disorder: f64,
    pub base: BaseDistribution,
    pub interval: (f64, f64),
    pub eta0: f64,
    pub zeta_tol: f64,
    pub chunk: usize,
    pub gap_threshold: f64,
    /// Largest allowed ratio of the last to the first median variance.
    pub max_ratio: f64,
    pub allowed_inversions: usize,
    /// Lower bound on every reported `<1_L>`.
    pub min_average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsCheckConfig {
    pub n: usize,
    pub degree: usize,
    pub disorder: f64,
    pub base: BaseDistribution,
    /// Centres of the Gaussian test functions.
    pub centers: Vec<f64>,
    pub width: f64,
    pub pool: usize,
    pub shards: usize,
    pub grid_step: f64,
    pub density_range: (f64, f64),
    pub ks_bound: f64,
    /// Absolute tolerance; the bound used is `max(tolerance, 3 stderr)`.
    pub tolerance: f64,
    pub phi_lengths: Vec<usize>,
    pub phi_lambda: f64,
    pub phi_eta: f64,
    pub bins: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            gen: GenConfig::default(),
            identities: IdentitiesConfig::default(),
            ergodicity: ErgodicityConfig::default(),
            anderson: ErgodicityConfig::anderson(),
            bs_check: BsCheckConfig::default(),
        }
    }
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 500,
            degree: 3,
            disorder: 0.0,
            base: BaseDistribution::Uniform,
            profile_radius: 4,
        }
    }
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        IdentitiesConfig {
            instances: 20,
            n_min: 40,
            n_max: 200,
            min_degree: 3,
            max_degree: 6,
            amplitude: 1.0,
            lambdas: vec![-4.0, -2.0, 0.0, 2.0, 4.0],
            etas: vec![1.0, 0.1, 0.01],
            quasi_etas: vec![0.05, 0.1, 0.5],
            suite_instances: 10,
            suite_eta: 0.1,
            suite_eigenpairs: 6,
            suite_operands: 2,
            max_path_length: 3,
            paths_per_length: 400,
            zeta_tol: 1e-12,
            tol: 1e-8,
        }
    }
}

impl Default for ErgodicityConfig {
    fn default() -> Self {
        let p = ProtocolConfig::default();
        ErgodicityConfig {
            sizes: p.sizes,
            seeds_per_size: 5,
            degree: p.degree,
            disorder: 0.0,
            base: BaseDistribution::Uniform,
            interval: p.interval,
            eta0: p.eta0,
            zeta_tol: p.zeta_tol,
            chunk: p.chunk,
            gap_threshold: p.gap_threshold,
            max_ratio: 0.6,
            allowed_inversions: 1,
            min_average: 0.0,
        }
    }
}

impl ErgodicityConfig {
    pub fn anderson() -> Self {
        ErgodicityConfig {
            disorder: 0.5,
            min_average: 0.2,
            ..ErgodicityConfig::default()
        }
    }

    pub fn protocol(&self, seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            sizes: self.sizes.clone(),
            seeds: (0..self.seeds_per_size as u64).map(|i| seed + i).collect(),
            degree: self.degree,
            disorder: self.disorder,
            base: self.base.clone(),
            interval: self.interval,
            eta0: self.eta0,
            zeta_tol: self.zeta_tol,
            chunk: self.chunk,
            gap_threshold: self.gap_threshold,
        }
    }
}

impl Default for BsCheckConfig {
    fn default() -> Self {
        BsCheckConfig {
            n: 2000,
            degree: 3,
            disorder: 0.0,
            base: BaseDistribution::Uniform,
            centers: vec![-1.0, 0.0, 1.0],
            width: 0.3,
            pool: 100_000,
            shards: 8,
            grid_step: 0.0125,
            density_range: (-4.6, 4.6),
            ks_bound: 0.05,
            tolerance: 0.02,
            phi_lengths: vec![0, 1, 2],
            phi_lambda: 0.0,
            phi_eta: 0.1,
            bins: 50,
        }
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

impl RunConfig {
    /// Parse a config file over the defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let user: toml::Table = toml::from_str(text)?;
        let mut table = toml::Table::try_from(RunConfig::default()).map_err(|e| CliError::Config(e.to_string()))?;
        merge(&mut table, user);
        let cfg: RunConfig = table.try_into()?;
        Ok(cfg)
    }

    /// Load a TOML config, or the config echoed in a run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value = serde_json::from_str(&text)?;
            let cfg = v
                .get("config")
                .ok_or_else(|| CliError::Config(format!("{} has no config block", path.display())))?;
            return Ok(serde_json::from_value(cfg.clone())?);
        }
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}

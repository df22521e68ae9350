//! Run configuration, read from TOML.
//!
//! ```toml
//! generations = 150
//! master_seed = 1
//! environments = ["cartpole"]
//! output_dir = "runs/cartpole-1"
//!
//! [variant]
//! kind = "standard"
//!
//! [arch]
//! sparsity = 0.5
//! ```
//!
//! Unknown keys are errors.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::evolution::LifetimeConfig;
use crate::genome::ArchConfig;
use crate::variants::{apply_variant, EffectiveConfig, VariantSpec};

fn default_environments() -> Vec<EnvKind> {
    EnvKind::ALL.to_vec()
}

fn default_population() -> usize {
    128
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs/default")
}

fn default_checkpoint_every() -> u64 {
    10
}

fn default_sigma0() -> f64 {
    0.1
}

fn default_repeats() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub generations: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_environments")]
    pub environments: Vec<EnvKind>,
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Write a mean-genome checkpoint every this many generations (0 disables periodic checkpoints).
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: u64,
    #[serde(default = "default_sigma0")]
    pub sigma0: f64,
    /// Evaluate every candidate of a generation on the same lifetime seeds.
    #[serde(default)]
    pub common_random_numbers: bool,
    /// Lifetimes averaged per environment for each candidate.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub variant: VariantSpec,
    #[serde(default)]
    pub lifetime: LifetimeConfig,
    #[serde(default)]
    pub arch: ArchConfig,
}

impl RunConfig {
    pub fn new(generations: u64) -> Self {
        Self {
            generations,
            master_seed: 0,
            environments: default_environments(),
            population: default_population(),
            output_dir: default_output_dir(),
            checkpoint_every: default_checkpoint_every(),
            sigma0: default_sigma0(),
            common_random_numbers: false,
            repeats: default_repeats(),
            variant: VariantSpec::default(),
            lifetime: LifetimeConfig::default(),
            arch: ArchConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::Config(format!(
                "population must be at least 4, got {}",
                self.population
            )));
        }
        if self.environments.is_empty() {
            return Err(Error::Config("environments must not be empty".into()));
        }
        let mut seen = self.environments.clone();
        seen.sort_by_key(|k| k.index());
        seen.dedup();
        if seen.len() != self.environments.len() {
            return Err(Error::Config("environments contains duplicates".into()));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::Config(format!(
                "sigma0 must be positive, got {}",
                self.sigma0
            )));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be positive".into()));
        }
        self.lifetime.validate()?;
        self.effective().map(|_| ())
    }

    pub fn effective(&self) -> Result<EffectiveConfig> {
        let eff = apply_variant(&self.variant, &self.arch)?;
        if let crate::model::ModelSpec::Symla(cfg) = &eff.model {
            cfg.validate()?;
        }
        Ok(eff)
    }
}

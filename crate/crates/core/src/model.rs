//! Model layouts, per-lifetime agents, and the genome file format.
//!
//! A genome file is JSON:
//!
//! ```json
//! { "layout_version": "sfnn-v1", "arch": { ... }, "params": [0.1, -0.25, ...] }
//! ```
//!
//! SymLA genomes use `"layout_version": "symla-v1"` with a `"symla"` object in
//! place of `"arch"`. Parameters are written in shortest round-trip decimal
//! form, so loading a saved file reproduces every value exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{count_parameters, ArchConfig, Genome};
use crate::network::{Adjacency, Network};
use crate::seed::{self, stream};
use crate::variants::{SymlaConfig, SymlaNet, SymlaParams};

pub const SFNN_LAYOUT: &str = "sfnn-v1";
pub const SYMLA_LAYOUT: &str = "symla-v1";

/// How a lifetime obtains its wiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Wiring {
    /// Fresh random mask from the lifetime seed.
    #[default]
    PerLifetime,
    /// One mask per I/O shape, sampled from this seed and reused by every lifetime.
    Fixed(u64),
}

/// Shape of the flat parameter vector the optimizer works on.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Sfnn(ArchConfig),
    Symla(SymlaConfig),
}

impl ModelSpec {
    pub fn n_params(&self) -> usize {
        match self {
            ModelSpec::Sfnn(arch) => count_parameters(arch),
            ModelSpec::Symla(cfg) => cfg.n_params(),
        }
    }

    pub fn decode(&self, values: &[f64]) -> Result<Model> {
        match self {
            ModelSpec::Sfnn(arch) => Ok(Model::Sfnn(Genome::unflatten(values, arch)?)),
            ModelSpec::Symla(cfg) => Ok(Model::Symla(SymlaParams::unflatten(values, cfg)?)),
        }
    }

    pub fn layout_version(&self) -> &'static str {
        match self {
            ModelSpec::Sfnn(_) => SFNN_LAYOUT,
            ModelSpec::Symla(_) => SYMLA_LAYOUT,
        }
    }
}

/// Decoded, immutable evolved parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Sfnn(Genome),
    Symla(SymlaParams),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenomeFile {
    layout_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arch: Option<ArchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symla: Option<SymlaConfig>,
    params: Vec<f64>,
}

impl Model {
    pub fn spec(&self) -> ModelSpec {
        match self {
            Model::Sfnn(g) => ModelSpec::Sfnn(g.arch.clone()),
            Model::Symla(p) => ModelSpec::Symla(p.config.clone()),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        match self {
            Model::Sfnn(g) => g.flatten(),
            Model::Symla(p) => p.flatten(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = match self {
            Model::Sfnn(g) => GenomeFile {
                layout_version: SFNN_LAYOUT.into(),
                arch: Some(g.arch.clone()),
                symla: None,
                params: g.flatten(),
            },
            Model::Symla(p) => GenomeFile {
                layout_version: SYMLA_LAYOUT.into(),
                arch: None,
                symla: Some(p.config.clone()),
                params: p.flatten(),
            },
        };
        serde_json::to_string_pretty(&file).expect("genome serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GenomeFile =
            serde_json::from_str(text).map_err(|e| Error::format("genome", e))?;
        let spec = match (file.layout_version.as_str(), file.arch, file.symla) {
            (SFNN_LAYOUT, Some(arch), None) => ModelSpec::Sfnn(arch),
            (SYMLA_LAYOUT, None, Some(cfg)) => ModelSpec::Symla(cfg),
            (version, _, _) => {
                return Err(Error::format(
                    "genome",
                    format!("unsupported layout '{version}' or missing architecture block"),
                ))
            }
        };
        spec.decode(&file.params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Format { message, .. } => Error::format(path, message),
            other => other,
        })
    }
}

/// Writes to a sibling temp file and renames, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Input/output relabelling: network input `i` reads observation `input[i]`,
/// network output `j` drives environment action `output[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoPermutation {
    pub input: Vec<usize>,
    pub output: Vec<usize>,
}

impl IoPermutation {
    pub fn identity(n_in: usize, n_out: usize) -> Self {
        Self {
            input: (0..n_in).collect(),
            output: (0..n_out).collect(),
        }
    }

    pub fn random(n_in: usize, n_out: usize, seed: u64) -> Self {
        use rand::seq::SliceRandom;
        let mut rng = seed::rng(seed);
        let mut p = Self::identity(n_in, n_out);
        p.input.shuffle(&mut rng);
        p.output.shuffle(&mut rng);
        p
    }

    pub fn apply_obs(&self, obs: &[f64]) -> Vec<f64> {
        self.input.iter().map(|&i| obs[i]).collect()
    }
}

/// One lifetime's mutable controller state.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Agent {
    Sfnn(Network),
    Symla(SymlaNet),
}

impl Agent {
    /// Builds a fresh agent for a lifetime. Wiring and initial synapse values
    /// come from separate streams of `lifetime_seed`, so a fixed wiring can be
    /// combined with per-lifetime synapse initialization.
    pub fn build(
        model: &Model,
        n_in: usize,
        n_out: usize,
        wiring: Wiring,
        lifetime_seed: u64,
    ) -> Result<Self> {
        let mut synapse_rng = seed::rng(seed::child(lifetime_seed, stream::SYNAPSES));
        match model {
            Model::Sfnn(genome) => {
                let arch = &genome.arch;
                let wiring_seed = match wiring {
                    Wiring::PerLifetime => seed::child(lifetime_seed, stream::ADJACENCY),
                    Wiring::Fixed(s) => seed::child(s, stream::ADJACENCY),
                };
                let adjacency = Adjacency::sample(arch, n_in, n_out, &mut seed::rng(wiring_seed))?;
                Ok(Agent::Sfnn(Network::with_adjacency(
                    arch,
                    adjacency,
                    &mut synapse_rng,
                )?))
            }
            Model::Symla(params) => Ok(Agent::Symla(SymlaNet::init(
                &params.config,
                n_in,
                n_out,
                &mut synapse_rng,
            )?)),
        }
    }

    pub fn begin_episode(&mut self) {
        match self {
            Agent::Sfnn(n) => n.begin_episode(),
            Agent::Symla(n) => n.begin_episode(),
        }
    }

    pub fn act(&mut self, model: &Model, obs: &[f64], prev_reward: f64) -> Result<usize> {
        match (self, model) {
            (Agent::Sfnn(net), Model::Sfnn(genome)) => net.env_step(genome, obs, prev_reward),
            (Agent::Symla(net), Model::Symla(params)) => net.step(params, obs, prev_reward),
            _ => Err(Error::Incompatible(
                "agent and model belong to different variants".into(),
            )),
        }
    }

    pub fn network(&self) -> Option<&Network> {
        match self {
            Agent::Sfnn(n) => Some(n),
            Agent::Symla(_) => None,
        }
    }

    /// Fingerprint of the live wiring (constant for SymLA, which is fully connected).
    pub fn wiring_fingerprint(&self) -> u64 {
        match self {
            Agent::Sfnn(n) => n.adjacency().fingerprint(),
            Agent::Symla(n) => n.n_synapses() as u64,
        }
    }
}

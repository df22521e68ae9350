//! Post-training evaluation under different wiring protocols.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::evolution::{lifetime_episodes, LifetimeConfig, LifetimePlan};
use crate::model::{IoPermutation, Model, Wiring};
use crate::par::Execution;
use crate::seed::{self, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Fresh wiring every lifetime.
    Random,
    /// One wiring, sampled from a given seed, for every lifetime.
    Fixed,
    /// Fresh wiring plus a fresh input and output permutation every lifetime.
    Permuted,
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" | "random_adjacency" => Ok(ProtocolKind::Random),
            "fixed" | "fixed_adjacency" => Ok(ProtocolKind::Fixed),
            "permuted" | "permuted_io" => Ok(ProtocolKind::Permuted),
            other => Err(Error::Config(format!(
                "unknown protocol '{other}' (expected random, fixed or permuted)"
            ))),
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Random => "random",
            ProtocolKind::Fixed => "fixed",
            ProtocolKind::Permuted => "permuted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalProtocol {
    pub kind: ProtocolKind,
    pub n_lifetimes: usize,
    pub fixed_adjacency_seed: Option<u64>,
}

impl EvalProtocol {
    pub const DEFAULT_LIFETIMES: usize = 100;

    pub fn random() -> Self {
        Self {
            kind: ProtocolKind::Random,
            n_lifetimes: Self::DEFAULT_LIFETIMES,
            fixed_adjacency_seed: None,
        }
    }

    pub fn fixed(seed: u64) -> Self {
        Self {
            kind: ProtocolKind::Fixed,
            fixed_adjacency_seed: Some(seed),
            ..Self::random()
        }
    }

    pub fn permuted() -> Self {
        Self {
            kind: ProtocolKind::Permuted,
            ..Self::random()
        }
    }

    pub fn with_lifetimes(mut self, n: usize) -> Self {
        self.n_lifetimes = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_lifetimes == 0 {
            return Err(Error::Config("n_lifetimes must be positive".into()));
        }
        match (self.kind, self.fixed_adjacency_seed) {
            (ProtocolKind::Fixed, None) => Err(Error::Config(
                "the fixed protocol requires an adjacency seed".into(),
            )),
            (ProtocolKind::Fixed, Some(_)) | (_, None) => Ok(()),
            (_, Some(_)) => Err(Error::Config(
                "an adjacency seed is only valid for the fixed protocol".into(),
            )),
        }
    }

    /// Lifetime `l` of an evaluation seeded with `seed`.
    pub fn plan(&self, kind: EnvKind, seed: u64, lifetime: usize) -> LifetimePlan {
        let lifetime_seed = seed::child(seed, lifetime as u64);
        let plan = LifetimePlan::new(lifetime_seed);
        match self.kind {
            ProtocolKind::Random => plan,
            ProtocolKind::Fixed => {
                plan.with_wiring(Wiring::Fixed(self.fixed_adjacency_seed.expect("validated")))
            }
            ProtocolKind::Permuted => {
                let spec = kind.spec();
                plan.with_permutation(IoPermutation::random(
                    spec.obs_dim,
                    spec.n_actions,
                    seed::child(lifetime_seed, stream::PERMUTATION),
                ))
            }
        }
    }
}

/// Episode scores, one row per lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTable {
    pub scores: Vec<Vec<f64>>,
}

impl EvalTable {
    pub fn episode_means(&self) -> Vec<f64> {
        let n = self.scores.len() as f64;
        let width = self.scores.first().map_or(0, Vec::len);
        (0..width)
            .map(|e| self.scores.iter().map(|row| row[e]).sum::<f64>() / n)
            .collect()
    }

    /// Mean over all episodes of all lifetimes.
    pub fn overall_mean(&self) -> f64 {
        let means = self.episode_means();
        means.iter().sum::<f64>() / means.len() as f64
    }

    /// Mean of episodes `range` (1-based, inclusive) across lifetimes.
    pub fn mean_of_episodes(&self, first: usize, last: usize) -> f64 {
        let means = self.episode_means();
        let slice = &means[first - 1..last];
        slice.iter().sum::<f64>() / slice.len() as f64
    }

    /// `lifetime_id,episode_index,episode_score` rows followed by one
    /// `mean,<episode>,<mean score>` row per episode.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::format("evaluation table", e);
        w.write_record(["lifetime_id", "episode_index", "episode_score"])
            .map_err(err)?;
        for (l, row) in self.scores.iter().enumerate() {
            for (e, s) in row.iter().enumerate() {
                w.write_record([l.to_string(), (e + 1).to_string(), s.to_string()])
                    .map_err(err)?;
            }
        }
        for (e, m) in self.episode_means().iter().enumerate() {
            w.write_record(["mean".to_string(), (e + 1).to_string(), m.to_string()])
                .map_err(err)?;
        }
        w.flush().map_err(|e| Error::io("evaluation table", e))
    }
}

/// Runs `protocol.n_lifetimes` lifetimes of `model` in `kind`.
pub fn evaluate(
    model: &Model,
    kind: EnvKind,
    protocol: &EvalProtocol,
    lifetime: &LifetimeConfig,
    seed: u64,
    exec: Execution,
) -> Result<EvalTable> {
    protocol.validate()?;
    lifetime.validate()?;
    let scores = exec
        .map(protocol.n_lifetimes, |l| {
            lifetime_episodes(model, kind, lifetime, protocol.plan(kind, seed, l))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalTable { scores })
}

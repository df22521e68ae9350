//! Lifetime scoring and multi-environment fitness.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::envs::{Env, EnvKind, EnvSpec};
use crate::error::{Error, Result};
use crate::model::{Agent, IoPermutation, Model, Wiring};
use crate::seed::{self, stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LifetimeConfig {
    pub n_episodes: usize,
}

impl Default for LifetimeConfig {
    fn default() -> Self {
        Self { n_episodes: 8 }
    }
}

impl LifetimeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_episodes == 0 {
            return Err(Error::Config("n_episodes must be positive".into()));
        }
        Ok(())
    }

    /// Episode `i` (1-based) weighs `i / (1 + 2 + ... + n)`.
    pub fn episode_weights(&self) -> Vec<f64> {
        let n = self.n_episodes;
        let total = (n * (n + 1) / 2) as f64;
        (1..=n).map(|i| i as f64 / total).collect()
    }

    pub fn weighted_score(&self, episode_scores: &[f64]) -> f64 {
        self.episode_weights()
            .iter()
            .zip(episode_scores)
            .map(|(w, s)| w * s)
            .sum()
    }
}

/// Maps a score onto [0, 1] using the environment's score range; out-of-range scores are clamped.
pub fn normalize_score(score: f64, spec: &EnvSpec) -> f64 {
    let clamped = score.clamp(spec.min_score, spec.max_score);
    if clamped != score {
        warn!(
            "{} score {score} outside [{}, {}], clamped",
            spec.name, spec.min_score, spec.max_score
        );
    }
    (clamped - spec.min_score) / (spec.max_score - spec.min_score)
}

/// Product of per-environment normalized scores.
pub fn aggregate_fitness(normalized: &[f64]) -> f64 {
    normalized.iter().product()
}

/// Everything that determines one lifetime besides the model and environment.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimePlan {
    pub seed: u64,
    pub wiring: Wiring,
    pub permutation: Option<IoPermutation>,
}

impl LifetimePlan {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            wiring: Wiring::PerLifetime,
            permutation: None,
        }
    }

    pub fn with_wiring(mut self, wiring: Wiring) -> Self {
        self.wiring = wiring;
        self
    }

    pub fn with_permutation(mut self, permutation: IoPermutation) -> Self {
        self.permutation = Some(permutation);
        self
    }
}

/// Runs one episode from `env_seed`, mutating the agent, and returns the summed reward.
pub fn episode_rollout(
    model: &Model,
    agent: &mut Agent,
    kind: EnvKind,
    env_seed: u64,
    permutation: Option<&IoPermutation>,
) -> Result<f64> {
    let (mut env, mut obs) = Env::reset(kind, env_seed);
    agent.begin_episode();
    let mut reward = 0.0;
    let mut score = 0.0;
    loop {
        let action = match permutation {
            Some(p) => p.output[agent.act(model, &p.apply_obs(&obs), reward)?],
            None => agent.act(model, &obs, reward)?,
        };
        let tr = env.step(action)?;
        score += tr.reward;
        reward = tr.reward;
        obs = tr.obs;
        if tr.done {
            return Ok(score);
        }
    }
}

/// A lifetime in progress: one agent carried across consecutive episodes.
#[derive(Debug)]
pub struct Lifetime<'a> {
    model: &'a Model,
    kind: EnvKind,
    plan: LifetimePlan,
    agent: Agent,
    episodes_done: usize,
}

impl<'a> Lifetime<'a> {
    pub fn new(model: &'a Model, kind: EnvKind, plan: LifetimePlan) -> Result<Self> {
        let spec = kind.spec();
        if let Some(p) = &plan.permutation {
            if p.input.len() != spec.obs_dim || p.output.len() != spec.n_actions {
                return Err(Error::Config(format!(
                    "permutation shape does not match {}",
                    spec.name
                )));
            }
        }
        let agent = Agent::build(model, spec.obs_dim, spec.n_actions, plan.wiring, plan.seed)?;
        Ok(Self {
            model,
            kind,
            plan,
            agent,
            episodes_done: 0,
        })
    }

    pub fn agent(&self) -> &Agent {
        &self.agent
    }

    pub fn episodes_done(&self) -> usize {
        self.episodes_done
    }

    pub fn run_episode(&mut self) -> Result<f64> {
        let env_seed = seed::derive(self.plan.seed, stream::EPISODES, self.episodes_done as u64);
        let score = episode_rollout(
            self.model,
            &mut self.agent,
            self.kind,
            env_seed,
            self.plan.permutation.as_ref(),
        )?;
        self.episodes_done += 1;
        Ok(score)
    }

    /// Runs `n` further episodes and returns their scores.
    pub fn run(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.run_episode()).collect()
    }
}

/// Episode scores of one full lifetime.
pub fn lifetime_episodes(
    model: &Model,
    kind: EnvKind,
    cfg: &LifetimeConfig,
    plan: LifetimePlan,
) -> Result<Vec<f64>> {
    Lifetime::new(model, kind, plan)?.run(cfg.n_episodes)
}

/// Weighted lifetime score with a fresh network.
pub fn lifetime_score(
    model: &Model,
    kind: EnvKind,
    cfg: &LifetimeConfig,
    plan: LifetimePlan,
) -> Result<f64> {
    Ok(cfg.weighted_score(&lifetime_episodes(model, kind, cfg, plan)?))
}

/// Per-environment breakdown of one individual's evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessReport {
    pub fitness: f64,
    pub envs: Vec<EnvKind>,
    pub lifetime_scores: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl FitnessReport {
    pub fn normalized_for(&self, kind: EnvKind) -> Option<f64> {
        self.envs
            .iter()
            .position(|&k| k == kind)
            .map(|i| self.normalized[i])
    }
}

/// Seed of `kind`'s lifetime (repeat `r`) for an individual evaluated with `individual_seed`.
pub fn lifetime_seed(individual_seed: u64, kind: EnvKind, repeat: usize) -> u64 {
    let base = seed::derive(individual_seed, stream::ENVIRONMENT, kind.index());
    if repeat == 0 {
        base
    } else {
        seed::derive(base, stream::REPEAT, repeat as u64)
    }
}

/// One lifetime per environment (averaged over `repeats` lifetimes), normalized, multiplied.
pub fn evaluate_individual(
    model: &Model,
    envs: &[EnvKind],
    cfg: &LifetimeConfig,
    wiring: Wiring,
    individual_seed: u64,
    repeats: usize,
) -> Result<FitnessReport> {
    let repeats = repeats.max(1);
    let mut lifetime_scores = Vec::with_capacity(envs.len());
    let mut normalized = Vec::with_capacity(envs.len());
    for &kind in envs {
        let mut total = 0.0;
        for r in 0..repeats {
            let plan =
                LifetimePlan::new(lifetime_seed(individual_seed, kind, r)).with_wiring(wiring);
            total += lifetime_score(model, kind, cfg, plan)?;
        }
        let score = total / repeats as f64;
        lifetime_scores.push(score);
        normalized.push(normalize_score(score, &kind.spec()));
    }
    Ok(FitnessReport {
        fitness: aggregate_fitness(&normalized),
        envs: envs.to_vec(),
        lifetime_scores,
        normalized,
    })
}

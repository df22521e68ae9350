//! Classic-control environments: CartPole-v1, Acrobot-v1 and MountainCar-v0.
//!
//! Dynamics, constants and termination rules follow the standard
//! classic-control definitions, with float64 state throughout. Each
//! environment owns a seeded RNG stream used only for resets.

mod acrobot;
mod cartpole;
mod mountain_car;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Rng};

pub use acrobot::Acrobot;
pub use cartpole::CartPole;
pub use mountain_car::MountainCar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    #[serde(alias = "cartpole-v1")]
    CartPole,
    #[serde(alias = "acrobot-v1")]
    Acrobot,
    #[serde(alias = "mountaincar-v0", alias = "mountain_car")]
    MountainCar,
}

impl EnvKind {
    pub const ALL: [EnvKind; 3] = [EnvKind::CartPole, EnvKind::Acrobot, EnvKind::MountainCar];

    pub fn spec(self) -> EnvSpec {
        match self {
            EnvKind::CartPole => EnvSpec {
                kind: self,
                name: "CartPole-v1",
                obs_dim: 4,
                n_actions: 2,
                max_steps: 500,
                min_score: 0.0,
                max_score: 500.0,
            },
            EnvKind::Acrobot => EnvSpec {
                kind: self,
                name: "Acrobot-v1",
                obs_dim: 6,
                n_actions: 3,
                max_steps: 500,
                min_score: -500.0,
                max_score: 0.0,
            },
            EnvKind::MountainCar => EnvSpec {
                kind: self,
                name: "MountainCar-v0",
                obs_dim: 2,
                n_actions: 3,
                max_steps: 200,
                min_score: -200.0,
                max_score: 0.0,
            },
        }
    }

    /// Short lowercase name used in configs, CLI flags and CSV headers.
    pub fn key(self) -> &'static str {
        match self {
            EnvKind::CartPole => "cartpole",
            EnvKind::Acrobot => "acrobot",
            EnvKind::MountainCar => "mountaincar",
        }
    }

    pub fn index(self) -> u64 {
        match self {
            EnvKind::CartPole => 0,
            EnvKind::Acrobot => 1,
            EnvKind::MountainCar => 2,
        }
    }

    /// Number of physical state variables.
    pub fn state_dim(self) -> usize {
        match self {
            EnvKind::CartPole | EnvKind::Acrobot => 4,
            EnvKind::MountainCar => 2,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cartpole" | "cartpole-v1" => Ok(EnvKind::CartPole),
            "acrobot" | "acrobot-v1" => Ok(EnvKind::Acrobot),
            "mountaincar" | "mountain_car" | "mountaincar-v0" => Ok(EnvKind::MountainCar),
            other => Err(Error::Config(format!("unknown environment '{other}'"))),
        }
    }
}

/// Static description of an environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvSpec {
    pub kind: EnvKind,
    pub name: &'static str,
    pub obs_dim: usize,
    pub n_actions: usize,
    pub max_steps: usize,
    pub min_score: f64,
    pub max_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Physics {
    CartPole(CartPole),
    Acrobot(Acrobot),
    MountainCar(MountainCar),
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

/// A running environment instance.
#[derive(Debug, Clone)]
pub struct Env {
    spec: EnvSpec,
    physics: Physics,
    step_count: usize,
    done: bool,
    rng: Rng,
}

impl Env {
    /// Creates the environment and samples the first initial state from `seed`.
    pub fn reset(kind: EnvKind, seed: u64) -> (Self, Vec<f64>) {
        let mut rng = seed::rng(seed);
        let physics = Self::sample_initial(kind, &mut rng);
        let mut env = Self {
            spec: kind.spec(),
            physics,
            step_count: 0,
            done: false,
            rng,
        };
        let obs = env.observation();
        env.done = false;
        (env, obs)
    }

    /// Resets in place, drawing the next initial state from this environment's stream.
    pub fn reset_next(&mut self) -> Vec<f64> {
        self.physics = Self::sample_initial(self.spec.kind, &mut self.rng);
        self.step_count = 0;
        self.done = false;
        self.observation()
    }

    fn sample_initial(kind: EnvKind, rng: &mut Rng) -> Physics {
        match kind {
            EnvKind::CartPole => {
                let mut s = [0.0; 4];
                for v in &mut s {
                    *v = rng.gen_range(-0.05..0.05);
                }
                Physics::CartPole(CartPole::from_state(s))
            }
            EnvKind::Acrobot => {
                let mut s = [0.0; 4];
                for v in &mut s {
                    *v = rng.gen_range(-0.1..0.1);
                }
                Physics::Acrobot(Acrobot::from_state(s))
            }
            EnvKind::MountainCar => {
                Physics::MountainCar(MountainCar::from_state([rng.gen_range(-0.6..-0.4), 0.0]))
            }
        }
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Physical state vector (not the observation).
    pub fn state(&self) -> Vec<f64> {
        match &self.physics {
            Physics::CartPole(p) => p.state().to_vec(),
            Physics::Acrobot(p) => p.state().to_vec(),
            Physics::MountainCar(p) => p.state().to_vec(),
        }
    }

    /// Overwrites the physical state and restarts the step counter.
    pub fn set_state(&mut self, state: &[f64]) -> Result<()> {
        let dim = self.spec.kind.state_dim();
        if state.len() != dim {
            return Err(Error::Length {
                what: "environment state",
                expected: dim,
                actual: state.len(),
            });
        }
        self.physics = match self.spec.kind {
            EnvKind::CartPole => Physics::CartPole(CartPole::from_state([
                state[0], state[1], state[2], state[3],
            ])),
            EnvKind::Acrobot => Physics::Acrobot(Acrobot::from_state([
                state[0], state[1], state[2], state[3],
            ])),
            EnvKind::MountainCar => {
                Physics::MountainCar(MountainCar::from_state([state[0], state[1]]))
            }
        };
        self.step_count = 0;
        self.done = false;
        Ok(())
    }

    pub fn observation(&self) -> Vec<f64> {
        match &self.physics {
            Physics::CartPole(p) => p.state().to_vec(),
            Physics::Acrobot(p) => p.observation().to_vec(),
            Physics::MountainCar(p) => p.state().to_vec(),
        }
    }

    pub fn step(&mut self, action: usize) -> Result<Transition> {
        if self.done {
            return Err(Error::EpisodeDone);
        }
        if action >= self.spec.n_actions {
            return Err(Error::InvalidAction {
                action,
                n_actions: self.spec.n_actions,
            });
        }
        let (reward, terminated) = match &mut self.physics {
            Physics::CartPole(p) => p.step(action),
            Physics::Acrobot(p) => p.step(action),
            Physics::MountainCar(p) => p.step(action),
        };
        self.step_count += 1;
        self.done = terminated || self.step_count >= self.spec.max_steps;
        Ok(Transition {
            obs: self.observation(),
            reward,
            done: self.done,
        })
    }
}

/// Runs `actions` from a reset and writes `step,state...,action,reward` rows.
pub fn export_trajectory<W: Write>(
    kind: EnvKind,
    seed: u64,
    actions: &[usize],
    out: W,
) -> Result<()> {
    let (mut env, _) = Env::reset(kind, seed);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["step".to_string()];
    header.extend((0..kind.state_dim()).map(|i| format!("s{i}")));
    header.push("action".into());
    header.push("reward".into());
    w.write_record(&header).map_err(csv_err)?;
    for (t, &a) in actions.iter().enumerate() {
        let state = env.state();
        let tr = env.step(a)?;
        let mut row = vec![t.to_string()];
        row.extend(state.iter().map(|v| v.to_string()));
        row.push(a.to_string());
        row.push(tr.reward.to_string());
        w.write_record(&row).map_err(csv_err)?;
        if tr.done {
            break;
        }
    }
    w.flush().map_err(|e| Error::io("trajectory", e))?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::format("trajectory", e)
}

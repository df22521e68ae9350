//! Structurally flexible neural networks.
//!
//! Typed, parameter-shared building blocks (linear-layer neurons and GRU
//! plasticity rules) are instantiated into randomly wired networks of any
//! input/output size, evaluated over multi-episode lifetimes on classic
//! control tasks, and optimized with CMA-ES.

pub mod config;
pub mod envs;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod gru;
pub mod harness;
pub mod model;
pub mod network;
pub mod par;
pub mod seed;
pub mod variants;

pub use config::RunConfig;
pub use envs::{Env, EnvKind, EnvSpec};
pub use error::{Error, Result};
pub use evolution::{CmaState, LifetimeConfig};
pub use genome::{count_parameters, ArchConfig, Genome, NeuronRole};
pub use model::{Agent, IoPermutation, Model, ModelSpec, Wiring};
pub use network::{Adjacency, Network};
pub use par::Execution;
pub use variants::{VariantKind, VariantSpec};

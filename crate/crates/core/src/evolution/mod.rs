//! Lifetime fitness, CMA-ES, and the evolution loop.

pub mod cmaes;
pub mod fitness;
pub mod runner;

pub use cmaes::{CmaParams, CmaState, Sample};
pub use fitness::{
    aggregate_fitness, episode_rollout, evaluate_individual, lifetime_episodes, lifetime_score,
    normalize_score, FitnessReport, Lifetime, LifetimeConfig, LifetimePlan,
};
pub use runner::{evaluate_population, run_evolution, EvolutionOutcome, GenerationRecord};

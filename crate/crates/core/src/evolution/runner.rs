//! The ask / evaluate / tell loop.

use std::time::Instant;

use log::info;

use crate::config::RunConfig;
use crate::envs::EnvKind;
use crate::error::Result;
use crate::evolution::cmaes::CmaState;
use crate::evolution::fitness::{evaluate_individual, FitnessReport};
use crate::model::Model;
use crate::par::Execution;
use crate::seed::{self, stream};

/// Per-generation statistics. `mean_norm` is indexed by [`EnvKind::index`];
/// environments that are not trained are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: u64,
    pub pop_mean_fitness: f64,
    pub pop_best_fitness: f64,
    pub mean_norm: [Option<f64>; 3],
    pub sigma: f64,
    pub wall_time_s: f64,
}

impl GenerationRecord {
    pub const CSV_HEADER: &'static str = "generation,pop_mean_fitness,pop_best_fitness,\
mean_norm_cartpole,mean_norm_acrobot,mean_norm_mountaincar,sigma";

    /// One CSV row without the timing column, so reruns are byte-identical.
    pub fn csv_row(&self) -> String {
        let norm: Vec<String> = self
            .mean_norm
            .iter()
            .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
            .collect();
        format!(
            "{},{},{},{},{}",
            self.generation,
            self.pop_mean_fitness,
            self.pop_best_fitness,
            norm.join(","),
            self.sigma
        )
    }

    pub fn norm(&self, kind: EnvKind) -> Option<f64> {
        self.mean_norm[kind.index() as usize]
    }
}

/// What a finished run hands back.
#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    /// Distribution mean after the last generation.
    pub mean: Model,
    /// Highest-fitness candidate evaluated during the run (the initial mean if none was).
    pub best: Model,
    pub best_fitness: f64,
    pub log: Vec<GenerationRecord>,
    pub state: CmaState,
}

/// Seeds of generation `g`: `(sampling seed, evaluation seed)`.
pub fn generation_seeds(master: u64, generation: u64) -> (u64, u64) {
    let gen_seed = seed::child(master, generation);
    (
        seed::child(gen_seed, stream::SAMPLING),
        seed::child(gen_seed, stream::ENVIRONMENT),
    )
}

/// Seed candidate `i` of a generation is evaluated with.
pub fn candidate_seed(eval_seed: u64, candidate: usize, common_random_numbers: bool) -> u64 {
    if common_random_numbers {
        eval_seed
    } else {
        seed::child(eval_seed, candidate as u64)
    }
}

/// Evaluates a population in candidate order.
pub fn evaluate_population(
    cfg: &RunConfig,
    candidates: &[Model],
    eval_seed: u64,
    exec: Execution,
) -> Result<Vec<FitnessReport>> {
    let eff = cfg.effective()?;
    exec.map(candidates.len(), |i| {
        evaluate_individual(
            &candidates[i],
            &cfg.environments,
            &cfg.lifetime,
            eff.wiring,
            candidate_seed(eval_seed, i, cfg.common_random_numbers),
            cfg.repeats,
        )
    })
    .into_iter()
    .collect()
}

/// Runs CMA-ES for `cfg.generations`. `on_generation` sees every record with
/// the updated optimizer state and may abort the run by returning an error.
pub fn run_evolution<F>(
    cfg: &RunConfig,
    exec: Execution,
    mut on_generation: F,
) -> Result<EvolutionOutcome>
where
    F: FnMut(&GenerationRecord, &CmaState) -> Result<()>,
{
    cfg.validate()?;
    let spec = cfg.effective()?.model;
    let mut state = CmaState::new(vec![0.0; spec.n_params()], cfg.sigma0, cfg.population)?;
    let mut best = spec.decode(&state.mean)?;
    let mut best_fitness = f64::NEG_INFINITY;
    let mut log = Vec::with_capacity(cfg.generations as usize);

    for generation in 0..cfg.generations {
        let started = Instant::now();
        let (sample_seed, eval_seed) = generation_seeds(cfg.master_seed, generation);
        let sample = state.ask(&mut seed::rng(sample_seed));
        let candidates = sample
            .x
            .iter()
            .map(|x| spec.decode(x))
            .collect::<Result<Vec<_>>>()?;
        let reports = evaluate_population(cfg, &candidates, eval_seed, exec)?;
        let fitness: Vec<f64> = reports.iter().map(|r| r.fitness).collect();

        let n = fitness.len() as f64;
        let pop_mean_fitness = fitness.iter().sum::<f64>() / n;
        let (best_idx, pop_best_fitness) =
            fitness
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, f)| if f > acc.1 { (i, f) } else { acc },
                );
        if pop_best_fitness > best_fitness {
            best_fitness = pop_best_fitness;
            best = candidates[best_idx].clone();
        }
        let mut mean_norm = [None; 3];
        for kind in &cfg.environments {
            let total: f64 = reports
                .iter()
                .map(|r| r.normalized_for(*kind).expect("evaluated environment"))
                .sum();
            mean_norm[kind.index() as usize] = Some(total / n);
        }

        state.tell(&sample, &fitness)?;
        let record = GenerationRecord {
            generation,
            pop_mean_fitness,
            pop_best_fitness,
            mean_norm,
            sigma: state.sigma,
            wall_time_s: started.elapsed().as_secs_f64(),
        };
        info!(
            "generation {generation}: mean {pop_mean_fitness:.4} best {pop_best_fitness:.4} sigma {:.4} ({:.1}s)",
            state.sigma, record.wall_time_s
        );
        on_generation(&record, &state)?;
        log.push(record);
    }

    Ok(EvolutionOutcome {
        mean: spec.decode(&state.mean)?,
        best,
        best_fitness,
        log,
        state,
    })
}

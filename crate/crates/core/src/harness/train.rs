//! Training runs: run directory layout, generation log, checkpoints.
//!
//! ```text
//! <output_dir>/
//!   config.toml          resolved configuration
//!   run_log.txt          parameter accounting and run summary
//!   generations.csv      one row per generation (deterministic)
//!   timing.csv           wall-clock seconds per generation
//!   checkpoints/mean_gen<N>.json, cma_gen<N>.json
//!   mean_genome.json, best_genome.json, cma_state.json
//! ```
//!
//! `<N>` counts completed generations, zero-padded to six digits.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evolution::{run_evolution, CmaState, GenerationRecord};
use crate::genome::parameter_accounting;
use crate::model::{write_atomic, ModelSpec};
use crate::par::Execution;

pub const GENERATIONS_CSV: &str = "generations.csv";
pub const TIMING_CSV: &str = "timing.csv";
pub const CHECKPOINT_DIR: &str = "checkpoints";
pub const MEAN_GENOME: &str = "mean_genome.json";
pub const BEST_GENOME: &str = "best_genome.json";

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub output_dir: PathBuf,
    pub generations: u64,
    pub best_fitness: f64,
    pub final_mean_fitness: Option<f64>,
}

pub fn checkpoint_paths(dir: &Path, completed: u64) -> (PathBuf, PathBuf) {
    let ck = dir.join(CHECKPOINT_DIR);
    (
        ck.join(format!("mean_gen{completed:06}.json")),
        ck.join(format!("cma_gen{completed:06}.json")),
    )
}

fn write_checkpoint(dir: &Path, spec: &ModelSpec, state: &CmaState) -> Result<()> {
    let (mean_path, cma_path) = checkpoint_paths(dir, state.generation);
    spec.decode(&state.mean)?.save(&mean_path)?;
    write_atomic(&cma_path, state.to_json().as_bytes())
}

fn run_log(cfg: &RunConfig, spec: &ModelSpec) -> String {
    let mut text = String::new();
    text.push_str(&format!("variant: {:?}\n", cfg.variant.kind));
    text.push_str(&format!("layout: {}\n", spec.layout_version()));
    match spec {
        ModelSpec::Sfnn(arch) => text.push_str(&parameter_accounting(arch)),
        ModelSpec::Symla(s) => text.push_str(&format!(
            "evolved parameters: {} (shared LSTM, hidden size {})",
            s.n_params(),
            s.lstm_hidden
        )),
    }
    text.push('\n');
    text.push_str(&format!(
        "environments: {}\npopulation: {}\ngenerations: {}\nmaster_seed: {}\n",
        cfg.environments
            .iter()
            .map(|k| k.key())
            .collect::<Vec<_>>()
            .join(","),
        cfg.population,
        cfg.generations,
        cfg.master_seed
    ));
    text
}

/// Runs `cfg` and writes the run directory. Output files other than the
/// timing log depend only on the configuration.
pub fn train(cfg: &RunConfig, exec: Execution) -> Result<TrainSummary> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    let ck_dir = dir.join(CHECKPOINT_DIR);
    fs::create_dir_all(&ck_dir).map_err(|e| Error::io(&ck_dir, e))?;
    let spec = cfg.effective()?.model;

    write_atomic(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;
    let log_path = dir.join("run_log.txt");
    let mut log_text = run_log(cfg, &spec);
    write_atomic(&log_path, log_text.as_bytes())?;

    let initial = CmaState::new(vec![0.0; spec.n_params()], cfg.sigma0, cfg.population)?;
    write_checkpoint(&dir, &spec, &initial)?;

    let gen_path = dir.join(GENERATIONS_CSV);
    let time_path = dir.join(TIMING_CSV);
    let mut gen_csv = BufWriter::new(File::create(&gen_path).map_err(|e| Error::io(&gen_path, e))?);
    let mut time_csv =
        BufWriter::new(File::create(&time_path).map_err(|e| Error::io(&time_path, e))?);
    writeln!(gen_csv, "{}", GenerationRecord::CSV_HEADER).map_err(|e| Error::io(&gen_path, e))?;
    writeln!(time_csv, "generation,wall_time_s").map_err(|e| Error::io(&time_path, e))?;

    let outcome = run_evolution(cfg, exec, |record, state| {
        writeln!(gen_csv, "{}", record.csv_row()).map_err(|e| Error::io(&gen_path, e))?;
        gen_csv.flush().map_err(|e| Error::io(&gen_path, e))?;
        writeln!(time_csv, "{},{}", record.generation, record.wall_time_s)
            .map_err(|e| Error::io(&time_path, e))?;
        time_csv.flush().map_err(|e| Error::io(&time_path, e))?;
        if cfg.checkpoint_every > 0 && state.generation % cfg.checkpoint_every == 0 {
            write_checkpoint(&dir, &spec, state)?;
        }
        Ok(())
    })?;

    outcome.mean.save(&dir.join(MEAN_GENOME))?;
    outcome.best.save(&dir.join(BEST_GENOME))?;
    write_atomic(
        &dir.join("cma_state.json"),
        outcome.state.to_json().as_bytes(),
    )?;

    let final_mean_fitness = outcome.log.last().map(|r| r.pop_mean_fitness);
    log_text.push_str(&format!(
        "completed generations: {}\nbest candidate fitness: {}\nfinal population mean fitness: {}\n",
        outcome.log.len(),
        outcome.best_fitness,
        final_mean_fitness.map_or("n/a".to_string(), |f| f.to_string())
    ));
    write_atomic(&log_path, log_text.as_bytes())?;

    Ok(TrainSummary {
        output_dir: dir,
        generations: outcome.log.len() as u64,
        best_fitness: outcome.best_fitness,
        final_mean_fitness,
    })
}

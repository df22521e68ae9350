//! `sfnn`: train, evaluate and inspect structurally flexible neural networks.
//!
//! Exit codes: 0 on success, 2 for invalid input (configuration, genome,
//! arguments), 3 for file-system errors.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};

use sfnn_core::evolution::LifetimeConfig;
use sfnn_core::genome::parameter_accounting;
use sfnn_core::harness::{self, EvalProtocol, ProtocolKind};
use sfnn_core::{par, EnvKind, Error, Execution, Model, ModelSpec, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "sfnn",
    version,
    about = "Structurally flexible neural networks"
)]
struct Cli {
    /// Worker threads for population and lifetime evaluation (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve a genome as described by a TOML run configuration.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Override the configuration's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a genome over many lifetimes and write a per-episode table.
    Eval {
        #[arg(long)]
        genome: PathBuf,
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[arg(long, value_enum)]
        env: Env,
        #[arg(long, default_value_t = EvalProtocol::DEFAULT_LIFETIMES)]
        lifetimes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Wiring seed for the fixed protocol.
        #[arg(long)]
        adjacency_seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        episodes: usize,
        /// Output CSV file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate generation logs of several runs into mean and std curves.
    ExportCurves {
        #[arg(required = true)]
        run_dirs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the synapse matrix after a number of episodes.
    WeightsSnapshot {
        #[arg(long)]
        genome: PathBuf,
        #[arg(long, value_enum)]
        env: Env,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        at_episode: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the evolved-parameter count of a configuration (defaults if none is given).
    CountParams {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Protocol {
    Random,
    Fixed,
    Permuted,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Env {
    Cartpole,
    Acrobot,
    Mountaincar,
}

impl From<Env> for EnvKind {
    fn from(e: Env) -> Self {
        match e {
            Env::Cartpole => EnvKind::CartPole,
            Env::Acrobot => EnvKind::Acrobot,
            Env::Mountaincar => EnvKind::MountainCar,
        }
    }
}

impl From<Protocol> for ProtocolKind {
    fn from(p: Protocol) -> Self {
        match p {
            Protocol::Random => ProtocolKind::Random,
            Protocol::Fixed => ProtocolKind::Fixed,
            Protocol::Permuted => ProtocolKind::Permuted,
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
            }
            let f = File::create(p).map_err(|e| io_error(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let exec = match cli.workers {
        Some(1) => Execution::Sequential,
        Some(n) => {
            if !par::set_workers(n) {
                warn!("could not resize the worker pool to {n}");
            }
            Execution::Parallel
        }
        None => Execution::Parallel,
    };

    match cli.command {
        Command::Train { config, out } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            let summary = harness::train(&cfg, exec)?;
            info!(
                "finished {} generations in {}",
                summary.generations,
                summary.output_dir.display()
            );
            println!("{}", summary.output_dir.display());
        }
        Command::Eval {
            genome,
            protocol,
            env,
            lifetimes,
            seed,
            adjacency_seed,
            episodes,
            out,
        } => {
            let model = Model::load(&genome)?;
            let protocol = EvalProtocol {
                kind: protocol.into(),
                n_lifetimes: lifetimes,
                fixed_adjacency_seed: adjacency_seed,
            };
            let lifetime = LifetimeConfig {
                n_episodes: episodes,
            };
            let table = harness::evaluate(&model, env.into(), &protocol, &lifetime, seed, exec)?;
            info!(
                "{} lifetimes, mean episode score {:.3}",
                table.scores.len(),
                table.overall_mean()
            );
            let mut w = output(out.as_deref())?;
            table.write_csv(&mut w)?;
            w.flush().map_err(|e| io_error(Path::new("output"), e))?;
        }
        Command::ExportCurves { run_dirs, out } => {
            let mut w = output(out.as_deref())?;
            harness::export_curves(&run_dirs, &mut w)?;
            w.flush().map_err(|e| io_error(Path::new("output"), e))?;
        }
        Command::WeightsSnapshot {
            genome,
            env,
            seed,
            at_episode,
            out,
        } => {
            let model = Model::load(&genome)?;
            let snap = harness::weights_snapshot(&model, env.into(), seed, at_episode)?;
            let mut w = output(out.as_deref())?;
            snap.write_csv(&mut w)?;
            w.flush().map_err(|e| io_error(Path::new("output"), e))?;
        }
        Command::CountParams { config } => {
            let cfg = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig::new(0),
            };
            match cfg.effective()?.model {
                ModelSpec::Sfnn(arch) => println!("{}", parameter_accounting(&arch)),
                spec @ ModelSpec::Symla(_) => {
                    println!("evolved parameters: {} (SymLA)", spec.n_params())
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

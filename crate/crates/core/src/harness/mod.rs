//! Training, evaluation and export entry points behind the command-line tool.

pub mod curves;
pub mod eval;
pub mod snapshot;
pub mod train;

pub use curves::{aggregate, export_curves, read_run, CurveSummary, RunCurves};
pub use eval::{evaluate, EvalProtocol, EvalTable, ProtocolKind};
pub use snapshot::{weights_snapshot, WeightSnapshot, SNAPSHOT_CLIP};
pub use train::{
    checkpoint_paths, train, TrainSummary, BEST_GENOME, GENERATIONS_CSV, MEAN_GENOME, TIMING_CSV,
};

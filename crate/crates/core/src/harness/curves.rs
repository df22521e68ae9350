//! Aggregation of generation logs across runs.

use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;

use crate::error::{Error, Result};
use crate::harness::train::GENERATIONS_CSV;

/// Columns aggregated from each generation log.
pub const CURVE_COLUMNS: [&str; 4] = [
    "pop_mean_fitness",
    "mean_norm_cartpole",
    "mean_norm_acrobot",
    "mean_norm_mountaincar",
];

const CURVE_NAMES: [&str; 4] = ["fitness", "cartpole", "acrobot", "mountaincar"];

/// One run's curves: `values[column][generation]`, `None` for untrained environments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCurves {
    pub path: PathBuf,
    pub values: Vec<Vec<Option<f64>>>,
}

impl RunCurves {
    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn read_run(dir: &Path) -> Result<RunCurves> {
    let path = dir.join(GENERATIONS_CSV);
    let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::format(&path, e))?
        .clone();
    let idx: Vec<usize> = CURVE_COLUMNS
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| Error::format(&path, format!("missing column {c}")))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![Vec::new(); CURVE_COLUMNS.len()];
    for record in reader.records() {
        let record = record.map_err(|e| Error::format(&path, e))?;
        for (c, &i) in idx.iter().enumerate() {
            let field = record.get(i).unwrap_or("");
            let v = if field.is_empty() {
                None
            } else {
                Some(
                    field
                        .parse::<f64>()
                        .map_err(|e| Error::format(&path, format!("{field:?}: {e}")))?,
                )
            };
            values[c].push(v);
        }
    }
    Ok(RunCurves {
        path: dir.to_path_buf(),
        values,
    })
}

/// Per-generation mean and population standard deviation across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSummary {
    pub generations: usize,
    /// `[column][generation] -> (mean, std)`, `None` if any run lacks the value.
    pub stats: Vec<Vec<Option<(f64, f64)>>>,
}

pub fn aggregate(runs: &[RunCurves]) -> Result<CurveSummary> {
    if runs.is_empty() {
        return Err(Error::Config("no run directories given".into()));
    }
    let generations = runs.iter().map(RunCurves::len).min().unwrap_or(0);
    if runs.iter().any(|r| r.len() != generations) {
        warn!("runs have different lengths; truncating to {generations} generations");
    }
    let n = runs.len() as f64;
    let stats = (0..CURVE_COLUMNS.len())
        .map(|c| {
            (0..generations)
                .map(|g| {
                    let vals: Option<Vec<f64>> = runs.iter().map(|r| r.values[c][g]).collect();
                    vals.map(|v| {
                        let mean = v.iter().sum::<f64>() / n;
                        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                        (mean, var.sqrt())
                    })
                })
                .collect()
        })
        .collect();
    Ok(CurveSummary { generations, stats })
}

impl CurveSummary {
    /// `generation,fitness_mean,fitness_std,cartpole_mean,...` with empty cells
    /// for environments that were not trained.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::format("curves", e);
        let mut header = vec!["generation".to_string()];
        for name in CURVE_NAMES {
            header.push(format!("{name}_mean"));
            header.push(format!("{name}_std"));
        }
        w.write_record(&header).map_err(err)?;
        for g in 0..self.generations {
            let mut row = vec![g.to_string()];
            for col in &self.stats {
                match col[g] {
                    Some((m, s)) => {
                        row.push(m.to_string());
                        row.push(s.to_string());
                    }
                    None => {
                        row.push(String::new());
                        row.push(String::new());
                    }
                }
            }
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| Error::io("curves", e))
    }
}

pub fn export_curves<W: Write>(run_dirs: &[PathBuf], out: W) -> Result<CurveSummary> {
    let runs = run_dirs
        .iter()
        .map(|d| read_run(d))
        .collect::<Result<Vec<_>>>()?;
    let summary = aggregate(&runs)?;
    summary.write_csv(out)?;
    Ok(summary)
}

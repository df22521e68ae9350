//! Dense dumps of synapse states partway through a lifetime.

use std::io::Write;

use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::evolution::{Lifetime, LifetimePlan};
use crate::model::Model;

/// Magnitude limit applied to exported entries.
pub const SNAPSHOT_CLIP: f64 = 10.0;

/// `n x n` matrix (row = pre, column = post) of per-synapse element sums.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSnapshot {
    pub n: usize,
    pub values: Vec<f64>,
}

impl WeightSnapshot {
    pub fn get(&self, pre: usize, post: usize) -> f64 {
        self.values[pre * self.n + post]
    }

    /// Headerless CSV, one row per pre-synaptic neuron.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.values.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(",")).map_err(|e| Error::io("snapshot", e))?;
        }
        Ok(())
    }
}

/// Runs `at_episode` episodes of a lifetime seeded with `seed`, then dumps
/// the synapse matrix clipped to [`SNAPSHOT_CLIP`]. Absent synapses are 0.
pub fn weights_snapshot(
    model: &Model,
    kind: EnvKind,
    seed: u64,
    at_episode: usize,
) -> Result<WeightSnapshot> {
    if !matches!(model, Model::Sfnn(_)) {
        return Err(Error::Incompatible(
            "weight snapshots need an SFNN genome".into(),
        ));
    }
    let mut lifetime = Lifetime::new(model, kind, LifetimePlan::new(seed))?;
    lifetime.run(at_episode)?;
    let net = lifetime.agent().network().expect("SFNN agent");
    let values = net
        .weight_sum_matrix()
        .into_iter()
        .map(|v| v.clamp(-SNAPSHOT_CLIP, SNAPSHOT_CLIP))
        .collect();
    Ok(WeightSnapshot {
        n: net.n_neurons(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{ArchConfig, Genome};

    #[test]
    fn initial_snapshot_is_small_and_sparse() {
        let model = Model::Sfnn(Genome::zeros(&ArchConfig::default()));
        let snap = weights_snapshot(&model, EnvKind::CartPole, 3, 0).unwrap();
        assert_eq!(snap.n, 32);
        assert!(snap.values.iter().all(|v| v.abs() < 0.4));
        // inputs never receive synapses
        for pre in 0..32 {
            for post in 0..4 {
                assert_eq!(snap.get(pre, post), 0.0);
            }
        }
        let mut buf = Vec::new();
        snap.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 32);
    }
}

//! Shared helpers for integration tests.

use std::path::{Path, PathBuf};

use sfnn_core::envs::{Env, EnvKind};

struct Row {
    kind: String,
    action: Option<usize>,
    reward: Option<f64>,
    done: Option<bool>,
    state: Vec<f64>,
}

/// Fixture directory, also found when this module is included from a sibling crate.
fn fixture_dir() -> PathBuf {
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    [here.join("tests/fixtures"), here.join("../core/tests/fixtures")]
        .into_iter()
        .find(|p| p.is_dir())
        .expect("fixture directory present")
}

fn load(name: &str) -> Vec<Row> {
    let path = fixture_dir().join(format!("{name}.csv"));
    let mut reader = csv::Reader::from_path(&path).expect("fixture present");
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            let opt = |i: usize| {
                let s = &r[i];
                (!s.is_empty()).then(|| s.to_string())
            };
            Row {
                kind: r[0].to_string(),
                action: opt(2).map(|s| s.parse().unwrap()),
                reward: opt(3).map(|s| s.parse().unwrap()),
                done: opt(4).map(|s| s == "1"),
                state: (5..r.len()).map(|i| r[i].parse().unwrap()).collect(),
            }
        })
        .collect()
}

/// Replays a fixture file; returns the largest state deviation seen and the number of steps replayed.
pub fn replay(kind: EnvKind, name: &str) -> (f64, usize) {
    let rows = load(name);
    let (mut env, _) = Env::reset(kind, 0);
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for row in rows {
        match row.kind.as_str() {
            "reset" => env.set_state(&row.state).unwrap(),
            "step" => {
                let tr = env.step(row.action.unwrap()).unwrap();
                assert_eq!(
                    tr.reward,
                    row.reward.unwrap(),
                    "{name} reward at step {steps}"
                );
                assert_eq!(tr.done, row.done.unwrap(), "{name} done at step {steps}");
                for (a, b) in env.state().iter().zip(&row.state) {
                    worst = worst.max((a - b).abs());
                }
                steps += 1;
            }
            other => panic!("unexpected row kind {other}"),
        }
    }
    (worst, steps)
}

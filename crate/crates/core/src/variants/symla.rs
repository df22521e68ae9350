//! Symmetric learning agent baseline: a shallow, fully connected network in
//! which every synapse is an LSTM cell and all cells share one parameter set.
//!
//! Each synapse `i -> j` receives `[pre activation, feedback to j, reward]`
//! and emits the first element of its hidden state. A neuron sums its incoming
//! messages (hidden layers apply tanh). Output feedback is the one-hot of the
//! previous action; hidden feedback is the neuron's previous activation. The
//! action is the deterministic argmax over output sums.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gru::{sigmoid, tanh};
use crate::network::argmax;

/// Inputs to every synapse LSTM: pre activation, post feedback, reward.
const MESSAGE_INPUTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymlaConfig {
    /// Hidden (and cell) size of every synapse LSTM.
    pub lstm_hidden: usize,
    /// Neurons in the optional hidden layer; 0 connects inputs straight to outputs.
    pub hidden_neurons: usize,
}

impl Default for SymlaConfig {
    fn default() -> Self {
        Self {
            lstm_hidden: 16,
            hidden_neurons: 0,
        }
    }
}

impl SymlaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lstm_hidden == 0 {
            return Err(Error::Config("lstm_hidden must be positive".into()));
        }
        Ok(())
    }

    fn gate_len(&self) -> usize {
        let h = self.lstm_hidden;
        h * MESSAGE_INPUTS + h * h + h
    }

    /// Evolved parameters: four LSTM gates.
    pub fn n_params(&self) -> usize {
        4 * self.gate_len()
    }

    fn layer_sizes(&self, n_in: usize, n_out: usize) -> Vec<usize> {
        if self.hidden_neurons > 0 {
            vec![n_in, self.hidden_neurons, n_out]
        } else {
            vec![n_in, n_out]
        }
    }

    pub fn n_synapses(&self, n_in: usize, n_out: usize) -> usize {
        self.layer_sizes(n_in, n_out)
            .windows(2)
            .map(|w| w[0] * w[1])
            .sum()
    }

    /// Plastic parameters: hidden and cell state of every synapse.
    pub fn n_plastic(&self, n_in: usize, n_out: usize) -> usize {
        self.n_synapses(n_in, n_out) * 2 * self.lstm_hidden
    }
}

/// Shared LSTM gate parameters, in order input, forget, cell, output.
/// Each gate is `W (H x 3) | U (H x H) | b (H)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymlaParams {
    pub config: SymlaConfig,
    gates: Vec<f64>,
}

impl SymlaParams {
    pub fn unflatten(values: &[f64], config: &SymlaConfig) -> Result<Self> {
        config.validate()?;
        if values.len() != config.n_params() {
            return Err(Error::Layout {
                expected: config.n_params(),
                actual: values.len(),
            });
        }
        Ok(Self {
            config: config.clone(),
            gates: values.to_vec(),
        })
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.gates.clone()
    }

    fn gate(&self, g: usize) -> (&[f64], &[f64], &[f64]) {
        let h = self.config.lstm_hidden;
        let block = &self.gates[g * self.config.gate_len()..(g + 1) * self.config.gate_len()];
        let (w, rest) = block.split_at(h * MESSAGE_INPUTS);
        let (u, b) = rest.split_at(h * h);
        (w, u, b)
    }

    /// One LSTM step, updating `h` and `c` in place.
    fn lstm_step(&self, x: &[f64; MESSAGE_INPUTS], h: &mut [f64], c: &mut [f64], buf: &mut [f64]) {
        let n = self.config.lstm_hidden;
        for g in 0..4 {
            let (w, u, b) = self.gate(g);
            for i in 0..n {
                let mut acc = b[i];
                for (wk, xk) in w[i * MESSAGE_INPUTS..(i + 1) * MESSAGE_INPUTS]
                    .iter()
                    .zip(x)
                {
                    acc += wk * xk;
                }
                for (uk, hk) in u[i * n..(i + 1) * n].iter().zip(h.iter()) {
                    acc += uk * hk;
                }
                buf[g * n + i] = if g == 2 { tanh(acc) } else { sigmoid(acc) };
            }
        }
        for i in 0..n {
            let (ig, fg, gg, og) = (buf[i], buf[n + i], buf[2 * n + i], buf[3 * n + i]);
            c[i] = fg * c[i] + ig * gg;
            h[i] = og * tanh(c[i]);
        }
    }
}

/// Per-lifetime SymLA state.
#[derive(Debug, Clone, PartialEq)]
pub struct SymlaNet {
    layers: Vec<usize>,
    /// Per layer pair: row-major `[pre][post]` synapses, each `lstm_hidden` wide.
    hidden: Vec<Vec<f64>>,
    cell: Vec<Vec<f64>>,
    activations: Vec<Vec<f64>>,
    prev_activations: Vec<Vec<f64>>,
    last_action: Option<usize>,
    lstm_hidden: usize,
}

impl SymlaNet {
    pub fn init<R: Rng + ?Sized>(
        config: &SymlaConfig,
        n_in: usize,
        n_out: usize,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        if n_in == 0 || n_out == 0 {
            return Err(Error::Config(
                "SymLA needs at least one input and output".into(),
            ));
        }
        let layers = config.layer_sizes(n_in, n_out);
        let h = config.lstm_hidden;
        let mut hidden = Vec::new();
        let mut cell = Vec::new();
        for w in layers.windows(2) {
            let len = w[0] * w[1] * h;
            hidden.push((0..len).map(|_| rng.gen_range(-0.1..0.1)).collect());
            cell.push((0..len).map(|_| rng.gen_range(-0.1..0.1)).collect());
        }
        let activations: Vec<Vec<f64>> = layers.iter().map(|&n| vec![0.0; n]).collect();
        Ok(Self {
            prev_activations: activations.clone(),
            activations,
            layers,
            hidden,
            cell,
            last_action: None,
            lstm_hidden: h,
        })
    }

    pub fn n_synapses(&self) -> usize {
        self.layers.windows(2).map(|w| w[0] * w[1]).sum()
    }

    pub fn begin_episode(&mut self) {
        for a in self
            .activations
            .iter_mut()
            .chain(self.prev_activations.iter_mut())
        {
            a.fill(0.0);
        }
        self.last_action = None;
    }

    pub fn step(&mut self, params: &SymlaParams, obs: &[f64], reward: f64) -> Result<usize> {
        let n_in = self.layers[0];
        if obs.len() != n_in {
            return Err(Error::Length {
                what: "observation",
                expected: n_in,
                actual: obs.len(),
            });
        }
        let hs = self.lstm_hidden;
        let last_layer = self.layers.len() - 1;
        self.activations[0].copy_from_slice(obs);
        let mut buf = vec![0.0; 4 * hs];
        let mut messages = Vec::new();
        for l in 0..last_layer {
            let (n_pre, n_post) = (self.layers[l], self.layers[l + 1]);
            for j in 0..n_post {
                let feedback = if l + 1 == last_layer {
                    if self.last_action == Some(j) {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    self.prev_activations[l + 1][j]
                };
                messages.clear();
                for i in 0..n_pre {
                    let s = (i * n_post + j) * hs;
                    let x = [self.activations[l][i], feedback, reward];
                    params.lstm_step(
                        &x,
                        &mut self.hidden[l][s..s + hs],
                        &mut self.cell[l][s..s + hs],
                        &mut buf,
                    );
                    messages.push(self.hidden[l][s]);
                }
                messages.sort_unstable_by(f64::total_cmp);
                let sum = messages.iter().fold(0.0, |acc, m| acc + m);
                self.activations[l + 1][j] = if l + 1 == last_layer { sum } else { tanh(sum) };
            }
        }
        let action = argmax(&self.activations[last_layer]);
        self.last_action = Some(action);
        self.prev_activations.clone_from(&self.activations);
        Ok(action)
    }

    /// Relabels inputs (input `i` becomes `perm[i]`) together with their synapse rows.
    pub fn permute_inputs(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        let n_post = self.layers[1];
        let row = n_post * self.lstm_hidden;
        for (i, &pi) in perm.iter().enumerate() {
            out.hidden[0][pi * row..(pi + 1) * row]
                .copy_from_slice(&self.hidden[0][i * row..(i + 1) * row]);
            out.cell[0][pi * row..(pi + 1) * row]
                .copy_from_slice(&self.cell[0][i * row..(i + 1) * row]);
            out.activations[0][pi] = self.activations[0][i];
            out.prev_activations[0][pi] = self.prev_activations[0][i];
        }
        out
    }

    /// Synapse hidden-state element sums, `[layer][pre][post]` flattened per layer pair.
    pub fn hidden_sums(&self) -> Vec<Vec<f64>> {
        self.hidden
            .iter()
            .map(|layer| {
                layer
                    .chunks(self.lstm_hidden)
                    .map(|c| c.iter().sum())
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn random_params(cfg: &SymlaConfig, s: u64) -> SymlaParams {
        let mut rng = seed::rng(s);
        let v: Vec<f64> = (0..cfg.n_params())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        SymlaParams::unflatten(&v, cfg).unwrap()
    }

    #[test]
    fn parameter_counts() {
        let cfg = SymlaConfig::default();
        assert_eq!(cfg.n_params(), 4 * 16 * (3 + 16 + 1));
        assert_eq!(cfg.n_synapses(4, 2), 8);
        assert_eq!(cfg.n_plastic(6, 3), 18 * 32);
        let deep = SymlaConfig {
            hidden_neurons: 5,
            ..cfg
        };
        assert_eq!(deep.n_synapses(4, 2), 4 * 5 + 5 * 2);
        assert!(SymlaParams::unflatten(&[0.0; 3], &SymlaConfig::default()).is_err());
    }

    #[test]
    fn deterministic_given_seeds() {
        let cfg = SymlaConfig {
            hidden_neurons: 3,
            ..SymlaConfig::default()
        };
        let params = random_params(&cfg, 1);
        let run = || {
            let mut net = SymlaNet::init(&cfg, 4, 2, &mut seed::rng(2)).unwrap();
            let mut rng = seed::rng(3);
            (0..60)
                .map(|_| {
                    let obs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    net.step(&params, &obs, 1.0).unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn input_permutation_equivariance() {
        let cfg = SymlaConfig::default();
        let params = random_params(&cfg, 7);
        let base = SymlaNet::init(&cfg, 6, 3, &mut seed::rng(8)).unwrap();
        let perm = [3, 0, 5, 1, 4, 2];
        let mut permuted = base.permute_inputs(&perm);
        let mut plain = base;
        let mut rng = seed::rng(9);
        for _ in 0..80 {
            let obs: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut pobs = vec![0.0; 6];
            for (i, &p) in perm.iter().enumerate() {
                pobs[p] = obs[i];
            }
            let a = plain.step(&params, &obs, -1.0).unwrap();
            let b = permuted.step(&params, &pobs, -1.0).unwrap();
            assert_eq!(a, b);
        }
        assert_eq!(plain.permute_inputs(&perm), permuted);
    }

    #[test]
    fn evolved_parameters_dominate_plastic() {
        let cfg = SymlaConfig::default();
        for (n_in, n_out) in [(4, 2), (6, 3), (2, 3)] {
            assert!(cfg.n_params() >= 2 * cfg.n_plastic(n_in, n_out));
        }
    }
}

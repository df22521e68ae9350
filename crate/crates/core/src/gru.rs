//! GRU plasticity rule.
//!
//! Gates follow the Cho et al. formulation with one bias per gate:
//!
//! ```text
//! z  = sigmoid(Wz x + Uz h + bz)
//! r  = sigmoid(Wr x + Ur h + br)
//! n  = tanh(Wn x + Un (r * h) + bn)
//! h' = (1 - z) * h + z * n
//! ```
//!
//! The synapse update adds `h'` to the previous state scaled by the applied
//! learning rate instead of replacing it.

use crate::genome::{GateParams, SynapseRuleParams};

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Hyperbolic tangent through one exponential. Absolute error against
/// `f64::tanh` is a few ulp of 1; it is noticeably cheaper than the libm call.
#[inline]
pub fn tanh(x: f64) -> f64 {
    1.0 - 2.0 / (1.0 + (2.0 * x).exp())
}

fn gate_preactivation(gate: &GateParams, row: usize, x: &[f64], h: &[f64]) -> f64 {
    let nx = x.len();
    let a = h.len();
    let wx = &gate.input[row * nx..(row + 1) * nx];
    let uh = &gate.hidden[row * a..(row + 1) * a];
    let mut acc = gate.bias[row];
    for (w, v) in wx.iter().zip(x) {
        acc += w * v;
    }
    for (u, v) in uh.iter().zip(h) {
        acc += u * v;
    }
    acc
}

/// Plain GRU update of `h` given input `x = pre ++ post ++ [reward]`.
pub fn gru_step(rule: &SynapseRuleParams, h: &[f64], x: &[f64]) -> Vec<f64> {
    let a = h.len();
    let z: Vec<f64> = (0..a)
        .map(|i| sigmoid(gate_preactivation(&rule.update, i, x, h)))
        .collect();
    let r: Vec<f64> = (0..a)
        .map(|i| sigmoid(gate_preactivation(&rule.reset, i, x, h)))
        .collect();
    let rh: Vec<f64> = r.iter().zip(h).map(|(r, h)| r * h).collect();
    (0..a)
        .map(|i| {
            let n = tanh(gate_preactivation(&rule.candidate, i, x, &rh));
            (1.0 - z[i]) * h[i] + z[i] * n
        })
        .collect()
}

/// Builds the GRU input vector `pre ++ post ++ [reward]`.
pub fn plasticity_input(pre: &[f64], post: &[f64], reward: f64) -> Vec<f64> {
    let mut x = Vec::with_capacity(pre.len() + post.len() + 1);
    x.extend_from_slice(pre);
    x.extend_from_slice(post);
    x.push(reward);
    x
}

/// One plasticity update of a synapse state `h`.
pub fn gru_plasticity_step(
    rule: &SynapseRuleParams,
    h: &[f64],
    pre: &[f64],
    post: &[f64],
    reward: f64,
    lr_constant: f64,
) -> Vec<f64> {
    let lr = rule.learning_rate * lr_constant;
    if lr == 0.0 {
        return h.to_vec();
    }
    let x = plasticity_input(pre, post, reward);
    let step = gru_step(rule, h, &x);
    h.iter().zip(&step).map(|(h, s)| h + lr * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{ArchConfig, Genome};

    #[test]
    fn zero_parameters_at_zero_state() {
        let cfg = ArchConfig::default();
        let mut rule = Genome::zeros(&cfg).synapses[0].clone();
        rule.learning_rate = 1.0;
        let h = [0.0; 4];
        let x = plasticity_input(&[0.3, -2.0, 1.0, 5.0], &[0.1, 0.2, 0.3, 0.4], -1.0);
        assert_eq!(gru_step(&rule, &h, &x), vec![0.0; 4]);
        let out = gru_plasticity_step(&rule, &h, &x[..4], &x[4..8], -1.0, 0.01);
        assert_eq!(out, vec![0.0; 4]);
    }

    #[test]
    fn zero_learning_rate_is_identity_bitwise() {
        let cfg = ArchConfig::default();
        let mut rule = Genome::zeros(&cfg).synapses[0].clone();
        rule.update.bias = vec![1.0; 4];
        let h = [-0.0, 0.05, -0.07, 1e-300];
        let out = gru_plasticity_step(&rule, &h, &[1.0; 4], &[1.0; 4], 1.0, 0.01);
        for (a, b) in out.iter().zip(&h) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn zero_state_half_update_gate() {
        // with zero weights z = 0.5, r = 0.5; candidate = tanh(bn)
        let cfg = ArchConfig {
            activation_size: 1,
            n_neuron_types: 1,
            n_synapse_types: 1,
            ..ArchConfig::default()
        };
        let mut rule = Genome::zeros(&cfg).synapses[0].clone();
        rule.candidate.bias = vec![0.5];
        let out = gru_step(&rule, &[0.2], &[0.0, 0.0, 0.0]);
        let expected = 0.5 * 0.2 + 0.5 * 0.5f64.tanh();
        assert!((out[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn tanh_matches_libm() {
        assert_eq!(tanh(0.0), 0.0);
        assert_eq!(tanh(1e6), 1.0);
        assert_eq!(tanh(-1e6), -1.0);
        assert!(tanh(f64::NAN).is_nan());
        let mut x = -40.0;
        while x < 40.0 {
            assert!((tanh(x) - x.tanh()).abs() < 1e-15, "x = {x}");
            x += 0.001_7;
        }
    }
}

//! Evolved building blocks and their flat parameter layout.
//!
//! A [`Genome`] holds one linear layer per neuron type and one GRU plasticity
//! rule per synapse type. CMA-ES only ever sees the flat vector produced by
//! [`Genome::flatten`]; the layout is:
//!
//! ```text
//! for each neuron type t:   weight (A x A, row-major) | bias (A)
//! for each synapse type s:  for gate in [update, reset, candidate]:
//!                               input weights (A x (2A+1), row-major)
//!                               hidden weights (A x A, row-major)
//!                               bias (A)
//!                           learning_rate (1)
//! ```
//!
//! GRU convention: one bias vector per gate. With the default architecture
//! (A = 4, three neuron and three synapse types) this gives
//! `3 * 20 + 3 * (3 * 56 + 1) = 567` evolved parameters. The reference
//! architecture is reported with 565 and no breakdown; no convention we know
//! of (single or double GRU bias, with or without input-layer slots) lands on
//! it exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter count reported for the default architecture in the original experiments.
pub const REFERENCE_PARAMETER_COUNT: usize = 565;

/// Role of a neuron in the network. Also the type index when types are not collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NeuronRole {
    Input,
    Hidden,
    Output,
}

impl NeuronRole {
    pub fn index(self) -> usize {
        match self {
            NeuronRole::Input => 0,
            NeuronRole::Hidden => 1,
            NeuronRole::Output => 2,
        }
    }
}

/// Architecture hyperparameters shared by every network built from a genome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchConfig {
    /// Length of every neuron activation and synapse vector.
    pub activation_size: usize,
    pub n_total_neurons: usize,
    pub n_micro_ticks: usize,
    /// Probability that a candidate synapse is deleted at lifetime start.
    pub sparsity: f64,
    /// Multiplier applied to every evolved learning rate.
    pub lr_constant: f64,
    pub n_neuron_types: usize,
    pub n_synapse_types: usize,
}

impl Default for ArchConfig {
    fn default() -> Self {
        Self {
            activation_size: 4,
            n_total_neurons: 32,
            n_micro_ticks: 2,
            sparsity: 0.5,
            lr_constant: 0.01,
            n_neuron_types: 3,
            n_synapse_types: 3,
        }
    }
}

impl ArchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.activation_size == 0 {
            return Err(Error::Config("activation_size must be positive".into()));
        }
        if self.n_total_neurons == 0 {
            return Err(Error::Config("n_total_neurons must be positive".into()));
        }
        if self.n_micro_ticks == 0 {
            return Err(Error::Config("n_micro_ticks must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.sparsity) {
            return Err(Error::Config(format!(
                "sparsity must lie in [0, 1], got {}",
                self.sparsity
            )));
        }
        if !(self.lr_constant.is_finite() && self.lr_constant > 0.0) {
            return Err(Error::Config("lr_constant must be positive".into()));
        }
        for (name, n) in [
            ("n_neuron_types", self.n_neuron_types),
            ("n_synapse_types", self.n_synapse_types),
        ] {
            if n != 1 && n != 3 {
                return Err(Error::Config(format!("{name} must be 1 or 3, got {n}")));
            }
        }
        Ok(())
    }

    /// Checks that a network with `n_in` inputs and `n_out` outputs fits with at least one hidden neuron.
    pub fn check_io(&self, n_in: usize, n_out: usize) -> Result<usize> {
        if n_in + n_out >= self.n_total_neurons {
            return Err(Error::Config(format!(
                "{n_in} inputs + {n_out} outputs leave no hidden neurons out of {}",
                self.n_total_neurons
            )));
        }
        Ok(self.n_total_neurons - n_in - n_out)
    }

    pub fn neuron_type(&self, role: NeuronRole) -> usize {
        if self.n_neuron_types == 1 {
            0
        } else {
            role.index()
        }
    }

    /// Synapse type is the type of its pre-synaptic neuron.
    pub fn synapse_type(&self, pre: NeuronRole) -> usize {
        if self.n_synapse_types == 1 {
            0
        } else {
            pre.index()
        }
    }

    /// Width of the GRU input: pre-activation, post-activation and reward.
    pub fn gru_input_size(&self) -> usize {
        2 * self.activation_size + 1
    }

    fn neuron_block(&self) -> usize {
        let a = self.activation_size;
        a * a + a
    }

    fn gate_block(&self) -> usize {
        let a = self.activation_size;
        a * self.gru_input_size() + a * a + a
    }

    fn rule_block(&self) -> usize {
        3 * self.gate_block() + 1
    }
}

/// Length of the flat genome vector for `cfg`.
pub fn count_parameters(cfg: &ArchConfig) -> usize {
    cfg.n_neuron_types * cfg.neuron_block() + cfg.n_synapse_types * cfg.rule_block()
}

/// Human-readable breakdown of [`count_parameters`] relative to the reference total.
pub fn parameter_accounting(cfg: &ArchConfig) -> String {
    let a = cfg.activation_size;
    let total = count_parameters(cfg);
    let gap = total as i64 - REFERENCE_PARAMETER_COUNT as i64;
    format!(
        "evolved parameters: {total} = {nt} neuron types x ({a}x{a} weights + {a} bias) \
         + {st} synapse types x (3 GRU gates x ({a}x{i} input + {a}x{a} hidden + {a} bias) + 1 learning rate)\n\
         GRU convention: single bias per gate (update, reset, candidate)\n\
         reference total: {REFERENCE_PARAMETER_COUNT}; difference {gap:+} \
         (the reference count has no breakdown; a two-bias GRU would give {double})",
        nt = cfg.n_neuron_types,
        st = cfg.n_synapse_types,
        i = cfg.gru_input_size(),
        double = total + cfg.n_synapse_types * 3 * a,
    )
}

/// Linear layer applied to the summed incoming signal of a neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronParams {
    /// Row-major `A x A`.
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

/// Parameters of one GRU gate.
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams {
    /// Row-major `A x (2A + 1)`.
    pub input: Vec<f64>,
    /// Row-major `A x A`.
    pub hidden: Vec<f64>,
    pub bias: Vec<f64>,
}

impl GateParams {
    fn zeros(cfg: &ArchConfig) -> Self {
        let a = cfg.activation_size;
        Self {
            input: vec![0.0; a * cfg.gru_input_size()],
            hidden: vec![0.0; a * a],
            bias: vec![0.0; a],
        }
    }
}

/// One synapse type's plasticity rule: GRU gates plus an evolved learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SynapseRuleParams {
    pub update: GateParams,
    pub reset: GateParams,
    pub candidate: GateParams,
    pub learning_rate: f64,
}

impl SynapseRuleParams {
    pub fn zeros(cfg: &ArchConfig) -> Self {
        Self {
            update: GateParams::zeros(cfg),
            reset: GateParams::zeros(cfg),
            candidate: GateParams::zeros(cfg),
            learning_rate: 0.0,
        }
    }

    pub fn gates(&self) -> [&GateParams; 3] {
        [&self.update, &self.reset, &self.candidate]
    }

    fn gates_mut(&mut self) -> [&mut GateParams; 3] {
        [&mut self.update, &mut self.reset, &mut self.candidate]
    }
}

/// The complete evolved parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub arch: ArchConfig,
    pub neurons: Vec<NeuronParams>,
    pub synapses: Vec<SynapseRuleParams>,
}

impl Genome {
    pub fn zeros(arch: &ArchConfig) -> Self {
        let a = arch.activation_size;
        Self {
            arch: arch.clone(),
            neurons: (0..arch.n_neuron_types)
                .map(|_| NeuronParams {
                    weight: vec![0.0; a * a],
                    bias: vec![0.0; a],
                })
                .collect(),
            synapses: (0..arch.n_synapse_types)
                .map(|_| SynapseRuleParams::zeros(arch))
                .collect(),
        }
    }

    pub fn neuron(&self, role: NeuronRole) -> &NeuronParams {
        &self.neurons[self.arch.neuron_type(role)]
    }

    pub fn rule(&self, pre: NeuronRole) -> &SynapseRuleParams {
        &self.synapses[self.arch.synapse_type(pre)]
    }

    pub fn len(&self) -> usize {
        count_parameters(&self.arch)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for n in &self.neurons {
            out.extend_from_slice(&n.weight);
            out.extend_from_slice(&n.bias);
        }
        for s in &self.synapses {
            for g in s.gates() {
                out.extend_from_slice(&g.input);
                out.extend_from_slice(&g.hidden);
                out.extend_from_slice(&g.bias);
            }
            out.push(s.learning_rate);
        }
        out
    }

    pub fn unflatten(values: &[f64], arch: &ArchConfig) -> Result<Self> {
        arch.validate()?;
        let expected = count_parameters(arch);
        if values.len() != expected {
            return Err(Error::Layout {
                expected,
                actual: values.len(),
            });
        }
        let mut genome = Genome::zeros(arch);
        let mut rest = values;
        let mut take = |dst: &mut [f64]| {
            let (head, tail) = rest.split_at(dst.len());
            dst.copy_from_slice(head);
            rest = tail;
        };
        for n in &mut genome.neurons {
            take(&mut n.weight);
            take(&mut n.bias);
        }
        for s in &mut genome.synapses {
            for g in s.gates_mut() {
                take(&mut g.input);
                take(&mut g.hidden);
                take(&mut g.bias);
            }
            let mut lr = [0.0];
            take(&mut lr);
            s.learning_rate = lr[0];
        }
        Ok(genome)
    }
}

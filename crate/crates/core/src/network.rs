//! Network state for one agent lifetime: sparse random wiring, vector-valued
//! activations, and per-synapse GRU hidden states.
//!
//! Neurons are laid out as `[inputs | hidden | outputs]`. Legal edges are
//! input->hidden, hidden->hidden, hidden->output and output->hidden. Synapses
//! are stored grouped by post-synaptic neuron so a micro tick is one pass over
//! the edge list.
//!
//! Incoming signals are summed in a per-lifetime order set by random tags
//! drawn with the synapses. The tags travel with their synapses, which makes
//! every activation independent of how neurons are labelled: any relabelling of hidden neurons, or of inputs/outputs together with the
//! observation and action indexing, reproduces the same trajectory bit for bit.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::{ArchConfig, Genome, NeuronRole};
use crate::gru::{sigmoid, tanh};

/// Boolean wiring mask over ordered neuron pairs (row = pre, column = post).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Adjacency {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    live: Vec<bool>,
}

impl Adjacency {
    fn empty(n_in: usize, n_hidden: usize, n_out: usize) -> Self {
        let n = n_in + n_hidden + n_out;
        Self {
            n_in,
            n_hidden,
            n_out,
            live: vec![false; n * n],
        }
    }

    /// Samples a mask keeping each legal edge independently with probability `1 - sparsity`.
    pub fn sample<R: Rng + ?Sized>(
        cfg: &ArchConfig,
        n_in: usize,
        n_out: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let n_hidden = cfg.check_io(n_in, n_out)?;
        let mut adj = Self::empty(n_in, n_hidden, n_out);
        let n = adj.n();
        for pre in 0..n {
            for post in 0..n {
                if adj.is_legal(pre, post) {
                    let keep = rng.gen::<f64>() >= cfg.sparsity;
                    adj.live[pre * n + post] = keep;
                }
            }
        }
        Ok(adj)
    }

    /// Every legal edge present.
    pub fn full(cfg: &ArchConfig, n_in: usize, n_out: usize) -> Result<Self> {
        let n_hidden = cfg.check_io(n_in, n_out)?;
        let mut adj = Self::empty(n_in, n_hidden, n_out);
        let n = adj.n();
        for pre in 0..n {
            for post in 0..n {
                adj.live[pre * n + post] = adj.is_legal(pre, post);
            }
        }
        Ok(adj)
    }

    pub fn n(&self) -> usize {
        self.n_in + self.n_hidden + self.n_out
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn role(&self, i: usize) -> NeuronRole {
        if i < self.n_in {
            NeuronRole::Input
        } else if i < self.n_in + self.n_hidden {
            NeuronRole::Hidden
        } else {
            NeuronRole::Output
        }
    }

    pub fn is_legal(&self, pre: usize, post: usize) -> bool {
        use NeuronRole::*;
        matches!(
            (self.role(pre), self.role(post)),
            (Input, Hidden) | (Hidden, Hidden) | (Hidden, Output) | (Output, Hidden)
        )
    }

    pub fn is_live(&self, pre: usize, post: usize) -> bool {
        self.live[pre * self.n() + post]
    }

    pub fn live_count(&self) -> usize {
        self.live.iter().filter(|&&b| b).count()
    }

    pub fn legal_count(&self) -> usize {
        let (i, h, o) = (self.n_in, self.n_hidden, self.n_out);
        i * h + h * h + h * o + o * h
    }

    pub fn fingerprint(&self) -> u64 {
        let mut hasher = DefaultHasher::new();
        self.hash(&mut hasher);
        hasher.finish()
    }
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    pre_part: Vec<f64>,
    post_part: Vec<f64>,
    gates: Vec<f64>,
}

/// Mutable state of one network over one lifetime.
#[derive(Debug, Clone)]
pub struct Network {
    arch: ArchConfig,
    adjacency: Adjacency,
    /// Edge endpoints, grouped by post and ordered by `order_tags` within each group.
    pre: Vec<u32>,
    post: Vec<u32>,
    /// Per-synapse keys fixing the summation order of incoming signals. They are
    /// drawn at initialization and move with their synapse under relabelling, so
    /// sums do not depend on neuron labels.
    order_tags: Vec<u64>,
    in_offsets: Vec<usize>,
    weights: Vec<f64>,
    activations: Vec<f64>,
    prev_activations: Vec<f64>,
    pending: Vec<f64>,
    last_action: Option<usize>,
    scratch: Scratch,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        self.arch == other.arch
            && self.adjacency == other.adjacency
            && self.pre == other.pre
            && self.post == other.post
            && self.order_tags == other.order_tags
            && bits(&self.weights) == bits(&other.weights)
            && bits(&self.activations) == bits(&other.activations)
            && bits(&self.prev_activations) == bits(&other.prev_activations)
            && bits(&self.pending) == bits(&other.pending)
            && self.last_action == other.last_action
    }
}

impl Network {
    /// Samples wiring and synapse states from one stream.
    pub fn init<R: Rng + ?Sized>(
        cfg: &ArchConfig,
        n_in: usize,
        n_out: usize,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate()?;
        let adjacency = Adjacency::sample(cfg, n_in, n_out, rng)?;
        Self::with_adjacency(cfg, adjacency, rng)
    }

    /// Builds a network on a given mask; each live synapse starts uniform on (-0.1, 0.1).
    pub fn with_adjacency<R: Rng + ?Sized>(
        cfg: &ArchConfig,
        adjacency: Adjacency,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate()?;
        if adjacency.n() != cfg.n_total_neurons {
            return Err(Error::Config(format!(
                "adjacency has {} neurons, architecture expects {}",
                adjacency.n(),
                cfg.n_total_neurons
            )));
        }
        let mut net = Self::from_mask(cfg, adjacency);
        for w in net.weights.iter_mut() {
            *w = rng.gen_range(-0.1..0.1);
        }
        for t in net.order_tags.iter_mut() {
            *t = rng.gen();
        }
        net.sort_incoming();
        Ok(net)
    }

    /// Reorders each post neuron's incoming edges by `(order tag, pre)`.
    fn sort_incoming(&mut self) {
        let a = self.arch.activation_size;
        for q in 0..self.n_neurons() {
            let range = self.in_offsets[q]..self.in_offsets[q + 1];
            let mut idx: Vec<usize> = range.clone().collect();
            idx.sort_unstable_by_key(|&e| (self.order_tags[e], self.pre[e]));
            let pre: Vec<u32> = idx.iter().map(|&e| self.pre[e]).collect();
            let tags: Vec<u64> = idx.iter().map(|&e| self.order_tags[e]).collect();
            let weights: Vec<f64> = idx
                .iter()
                .flat_map(|&e| self.weights[e * a..(e + 1) * a].iter().copied())
                .collect();
            self.pre[range.clone()].copy_from_slice(&pre);
            self.order_tags[range.clone()].copy_from_slice(&tags);
            self.weights[range.start * a..range.end * a].copy_from_slice(&weights);
        }
    }

    fn from_mask(cfg: &ArchConfig, adjacency: Adjacency) -> Self {
        let n = adjacency.n();
        let a = cfg.activation_size;
        let mut pre = Vec::new();
        let mut post = Vec::new();
        let mut in_offsets = Vec::with_capacity(n + 1);
        in_offsets.push(0);
        for q in 0..n {
            for p in 0..n {
                if adjacency.is_live(p, q) {
                    pre.push(p as u32);
                    post.push(q as u32);
                }
            }
            in_offsets.push(pre.len());
        }
        let n_edges = pre.len();
        Self {
            arch: cfg.clone(),
            adjacency,
            pre,
            post,
            order_tags: vec![0; n_edges],
            in_offsets,
            weights: vec![0.0; n_edges * a],
            activations: vec![0.0; n * a],
            prev_activations: vec![0.0; n * a],
            pending: vec![0.0; n * a],
            last_action: None,
            scratch: Scratch::default(),
        }
    }

    pub fn arch(&self) -> &ArchConfig {
        &self.arch
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn n_neurons(&self) -> usize {
        self.adjacency.n()
    }

    pub fn n_in(&self) -> usize {
        self.adjacency.n_in
    }

    pub fn n_hidden(&self) -> usize {
        self.adjacency.n_hidden
    }

    pub fn n_out(&self) -> usize {
        self.adjacency.n_out
    }

    fn out_start(&self) -> usize {
        self.adjacency.n_in + self.adjacency.n_hidden
    }

    pub fn n_synapses(&self) -> usize {
        self.pre.len()
    }

    /// `(pre, post)` pairs of live synapses in storage order.
    pub fn synapses(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pre
            .iter()
            .zip(&self.post)
            .map(|(&p, &q)| (p as usize, q as usize))
    }

    fn edge_index(&self, pre: usize, post: usize) -> Option<usize> {
        let range = self.in_offsets[post]..self.in_offsets[post + 1];
        self.pre[range.clone()]
            .iter()
            .position(|&p| p as usize == pre)
            .map(|i| range.start + i)
    }

    /// Synapse vector of `pre -> post`, `None` if the synapse does not exist.
    pub fn synapse_state(&self, pre: usize, post: usize) -> Option<&[f64]> {
        let a = self.arch.activation_size;
        self.edge_index(pre, post)
            .map(|e| &self.weights[e * a..(e + 1) * a])
    }

    pub fn synapse_state_mut(&mut self, pre: usize, post: usize) -> Option<&mut [f64]> {
        let a = self.arch.activation_size;
        self.edge_index(pre, post)
            .map(move |e| &mut self.weights[e * a..(e + 1) * a])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn activation(&self, neuron: usize) -> &[f64] {
        let a = self.arch.activation_size;
        &self.activations[neuron * a..(neuron + 1) * a]
    }

    pub fn activation_mut(&mut self, neuron: usize) -> &mut [f64] {
        let a = self.arch.activation_size;
        &mut self.activations[neuron * a..(neuron + 1) * a]
    }

    pub fn prev_activation(&self, neuron: usize) -> &[f64] {
        let a = self.arch.activation_size;
        &self.prev_activations[neuron * a..(neuron + 1) * a]
    }

    pub fn pending(&self, neuron: usize) -> &[f64] {
        let a = self.arch.activation_size;
        &self.pending[neuron * a..(neuron + 1) * a]
    }

    pub fn last_action(&self) -> Option<usize> {
        self.last_action
    }

    /// Clears sensory state at an episode boundary. Synapse states are kept.
    pub fn begin_episode(&mut self) {
        self.activations.fill(0.0);
        self.prev_activations.fill(0.0);
        self.pending.fill(0.0);
        self.last_action = None;
    }

    /// Broadcasts each observation element over its input neuron's activation vector.
    pub fn set_inputs(&mut self, obs: &[f64]) -> Result<()> {
        let n_in = self.n_in();
        if obs.len() != n_in {
            return Err(Error::Length {
                what: "observation",
                expected: n_in,
                actual: obs.len(),
            });
        }
        let a = self.arch.activation_size;
        for (i, &o) in obs.iter().enumerate() {
            self.activations[i * a..(i + 1) * a].fill(o);
        }
        Ok(())
    }

    /// One synchronous propagation sweep over all hidden and output neurons.
    pub fn micro_tick(&mut self, genome: &Genome) {
        let a = self.arch.activation_size;
        let n = self.n_neurons();
        let n_in = self.n_in();
        let out_start = self.out_start();

        for q in n_in..n {
            let acc = &mut self.pending[q * a..(q + 1) * a];
            acc.fill(0.0);
            for e in self.in_offsets[q]..self.in_offsets[q + 1] {
                let p = self.pre[e] as usize;
                let x = &self.activations[p * a..(p + 1) * a];
                let w = &self.weights[e * a..(e + 1) * a];
                // an output neuron's first element carries the previous action's one-hot
                acc[0] += if p < out_start {
                    x[0] * w[0]
                } else if self.last_action == Some(p - out_start) {
                    1.0
                } else {
                    0.0
                };
                for k in 1..a {
                    acc[k] += x[k] * w[k];
                }
            }
        }

        for q in n_in..n {
            let params = genome.neuron(self.adjacency.role(q));
            let input = &self.pending[q * a..(q + 1) * a];
            for i in 0..a {
                let row = &params.weight[i * a..(i + 1) * a];
                let mut acc = params.bias[i];
                for (w, s) in row.iter().zip(input) {
                    acc += w * s;
                }
                self.activations[q * a + i] = tanh(acc);
            }
        }
    }

    /// First element of every output neuron's activation.
    pub fn action_vector(&self) -> Vec<f64> {
        let a = self.arch.activation_size;
        (self.out_start()..self.n_neurons())
            .map(|q| self.activations[q * a])
            .collect()
    }

    /// Argmax of the action vector (lowest index on ties).
    pub fn read_action(&mut self) -> (usize, Vec<f64>) {
        let v = self.action_vector();
        let action = argmax(&v);
        self.last_action = Some(action);
        (action, v)
    }

    /// Sets the one-hot first element carried by output neurons' outgoing signals.
    pub fn inject_action_feedback(&mut self, action: usize) -> Result<()> {
        if action >= self.n_out() {
            return Err(Error::InvalidAction {
                action,
                n_actions: self.n_out(),
            });
        }
        self.last_action = Some(action);
        Ok(())
    }

    /// GRU update of every live synapse.
    ///
    /// Pre-activations are the previous timestep's activations, post-activations
    /// the current ones. The input-weight products are split into a pre-neuron
    /// part and a post-neuron part so each is computed once per neuron.
    pub fn update_synapses(&mut self, genome: &Genome, reward: f64) {
        let a = self.arch.activation_size;
        let n = self.n_neurons();
        let nx = self.arch.gru_input_size();
        let n_types = self.arch.n_synapse_types;
        let ga = 3 * a;
        let lr_constant = self.arch.lr_constant;
        let n_in = self.n_in();

        let Scratch {
            pre_part,
            post_part,
            gates,
            ..
        } = &mut self.scratch;
        pre_part.resize(n * ga, 0.0);
        post_part.resize(n * n_types * ga, 0.0);
        gates.resize(3 * a, 0.0);

        for p in 0..n {
            let rule = genome.rule(self.adjacency.role(p));
            let x = &self.prev_activations[p * a..(p + 1) * a];
            for (g, gate) in rule.gates().into_iter().enumerate() {
                for i in 0..a {
                    let row = &gate.input[i * nx..i * nx + a];
                    let mut acc = 0.0;
                    for (w, v) in row.iter().zip(x) {
                        acc += w * v;
                    }
                    pre_part[p * ga + g * a + i] = acc;
                }
            }
        }
        for q in n_in..n {
            let x = &self.activations[q * a..(q + 1) * a];
            for (t, rule) in genome.synapses.iter().enumerate() {
                let base = (q * n_types + t) * ga;
                for (g, gate) in rule.gates().into_iter().enumerate() {
                    for i in 0..a {
                        let row = &gate.input[i * nx + a..(i + 1) * nx];
                        let mut acc = gate.bias[i];
                        for (w, v) in row[..a].iter().zip(x) {
                            acc += w * v;
                        }
                        acc += row[a] * reward;
                        post_part[base + g * a + i] = acc;
                    }
                }
            }
        }

        for e in 0..self.pre.len() {
            let p = self.pre[e] as usize;
            let q = self.post[e] as usize;
            let t = self.arch.synapse_type(self.adjacency.role(p));
            let rule = &genome.synapses[t];
            let lr = rule.learning_rate * lr_constant;
            if lr == 0.0 {
                continue;
            }
            let pre_g = &pre_part[p * ga..(p + 1) * ga];
            let post_g = &post_part[(q * n_types + t) * ga..(q * n_types + t + 1) * ga];
            let h = &mut self.weights[e * a..(e + 1) * a];
            let (z, rest) = gates.split_at_mut(a);
            let (r, rh) = rest.split_at_mut(a);

            for i in 0..a {
                let u = &rule.update.hidden[i * a..(i + 1) * a];
                let mut acc = pre_g[i] + post_g[i];
                for (w, v) in u.iter().zip(h.iter()) {
                    acc += w * v;
                }
                z[i] = sigmoid(acc);
                let u = &rule.reset.hidden[i * a..(i + 1) * a];
                let mut acc = pre_g[a + i] + post_g[a + i];
                for (w, v) in u.iter().zip(h.iter()) {
                    acc += w * v;
                }
                r[i] = sigmoid(acc);
            }
            for i in 0..a {
                rh[i] = r[i] * h[i];
            }
            for i in 0..a {
                let u = &rule.candidate.hidden[i * a..(i + 1) * a];
                let mut acc = pre_g[2 * a + i] + post_g[2 * a + i];
                for (w, v) in u.iter().zip(rh.iter()) {
                    acc += w * v;
                }
                // r is no longer needed; reuse it for the candidate
                r[i] = tanh(acc);
            }
            for i in 0..a {
                let std = (1.0 - z[i]) * h[i] + z[i] * r[i];
                h[i] += lr * std;
            }
        }
    }

    /// One environment timestep: propagate, act, then apply plasticity.
    pub fn env_step(&mut self, genome: &Genome, obs: &[f64], prev_reward: f64) -> Result<usize> {
        self.prev_activations.copy_from_slice(&self.activations);
        self.set_inputs(obs)?;
        for _ in 0..self.arch.n_micro_ticks {
            self.micro_tick(genome);
        }
        let (action, _) = self.read_action();
        self.inject_action_feedback(action)?;
        self.update_synapses(genome, prev_reward);
        Ok(action)
    }

    /// Relabels neurons: neuron `i` becomes `mapping[i]`. Roles must be preserved.
    pub fn relabel(&self, mapping: &[usize]) -> Result<Self> {
        let n = self.n_neurons();
        if mapping.len() != n {
            return Err(Error::Length {
                what: "neuron mapping",
                expected: n,
                actual: mapping.len(),
            });
        }
        let mut seen = vec![false; n];
        for (i, &m) in mapping.iter().enumerate() {
            if m >= n || seen[m] || self.adjacency.role(i) != self.adjacency.role(m) {
                return Err(Error::Config(
                    "neuron mapping must be a role-preserving permutation".into(),
                ));
            }
            seen[m] = true;
        }
        let a = self.arch.activation_size;
        let mut adj = Adjacency::empty(self.n_in(), self.n_hidden(), self.n_out());
        for (p, q) in self.synapses() {
            adj.live[mapping[p] * n + mapping[q]] = true;
        }
        let mut out = Self::from_mask(&self.arch, adj);
        for (e, (p, q)) in self.synapses().enumerate() {
            let dst = out.edge_index(mapping[p], mapping[q]).expect("edge exists");
            out.weights[dst * a..(dst + 1) * a].copy_from_slice(&self.weights[e * a..(e + 1) * a]);
            out.order_tags[dst] = self.order_tags[e];
        }
        out.sort_incoming();
        for (i, &j) in mapping.iter().enumerate() {
            out.activations[j * a..(j + 1) * a]
                .copy_from_slice(&self.activations[i * a..(i + 1) * a]);
            out.prev_activations[j * a..(j + 1) * a]
                .copy_from_slice(&self.prev_activations[i * a..(i + 1) * a]);
            out.pending[j * a..(j + 1) * a].copy_from_slice(&self.pending[i * a..(i + 1) * a]);
        }
        let out_start = self.out_start();
        out.last_action = self.last_action.map(|j| mapping[out_start + j] - out_start);
        Ok(out)
    }

    /// Dense `n x n` matrix (row = pre) of per-synapse element sums; absent synapses are 0.
    pub fn weight_sum_matrix(&self) -> Vec<f64> {
        let n = self.n_neurons();
        let a = self.arch.activation_size;
        let mut m = vec![0.0; n * n];
        for (e, (p, q)) in self.synapses().enumerate() {
            m[p * n + q] = self.weights[e * a..(e + 1) * a].iter().sum();
        }
        m
    }
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gru::gru_plasticity_step;
    use crate::seed;

    fn random_genome(cfg: &ArchConfig, scale: f64, seed_value: u64) -> Genome {
        let mut rng = seed::rng(seed_value);
        let flat: Vec<f64> = (0..crate::genome::count_parameters(cfg))
            .map(|_| rng.gen_range(-scale..scale))
            .collect();
        Genome::unflatten(&flat, cfg).unwrap()
    }

    #[test]
    fn sparsity_one_gives_no_synapses() {
        let cfg = ArchConfig {
            sparsity: 1.0,
            ..ArchConfig::default()
        };
        let net = Network::init(&cfg, 4, 2, &mut seed::rng(1)).unwrap();
        assert_eq!(net.n_synapses(), 0);
    }

    #[test]
    fn sparsity_zero_gives_every_legal_edge() {
        let cfg = ArchConfig {
            sparsity: 0.0,
            ..ArchConfig::default()
        };
        let net = Network::init(&cfg, 4, 2, &mut seed::rng(1)).unwrap();
        let h = 26;
        assert_eq!(net.n_synapses(), 4 * h + h * h + h * 2 + 2 * h);
        assert_eq!(net.adjacency().legal_count(), net.n_synapses());
    }

    #[test]
    fn only_legal_classes_and_initial_bounds() {
        let cfg = ArchConfig::default();
        let net = Network::init(&cfg, 6, 3, &mut seed::rng(9)).unwrap();
        assert_eq!(net.n_hidden(), 23);
        for (p, q) in net.synapses() {
            assert!(net.adjacency().is_legal(p, q));
            let r = (net.adjacency().role(p), net.adjacency().role(q));
            assert_ne!(r.1, NeuronRole::Input);
            assert!(!matches!(
                r,
                (NeuronRole::Input, NeuronRole::Output) | (NeuronRole::Output, NeuronRole::Output)
            ));
        }
        assert!(net.weights().iter().all(|w| (-0.1..0.1).contains(w)));
        assert!(net.last_action().is_none());
        assert!(net.activations.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn too_many_io_neurons_rejected() {
        let cfg = ArchConfig::default();
        assert!(matches!(
            Network::init(&cfg, 20, 12, &mut seed::rng(0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn inputs_broadcast_and_length_checked() {
        let cfg = ArchConfig::default();
        let mut net = Network::init(&cfg, 2, 3, &mut seed::rng(0)).unwrap();
        net.set_inputs(&[1.5, -2.0]).unwrap();
        assert_eq!(net.activation(0), &[1.5; 4]);
        assert_eq!(net.activation(1), &[-2.0; 4]);
        assert_eq!(net.activation(2), &[0.0; 4]);
        assert!(net.set_inputs(&[1.0]).is_err());
        net.set_inputs(&[0.0, 0.0]).unwrap();
        assert_eq!(net.activation(0), &[0.0; 4]);
    }

    #[test]
    fn without_synapses_activations_are_tanh_bias() {
        let cfg = ArchConfig {
            sparsity: 1.0,
            ..ArchConfig::default()
        };
        let genome = random_genome(&cfg, 1.0, 3);
        let mut net = Network::init(&cfg, 4, 2, &mut seed::rng(1)).unwrap();
        net.set_inputs(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        net.micro_tick(&genome);
        for q in 4..32 {
            let bias = &genome.neuron(net.adjacency().role(q)).bias;
            for (v, b) in net.activation(q).iter().zip(bias) {
                assert!((*v - b.tanh()).abs() < 1e-15);
            }
        }
    }

    fn one_synapse_net(cfg: &ArchConfig, weight: f64) -> Network {
        // one input, one hidden, one output; only input -> hidden is live
        let mut adj = Adjacency::empty(1, 1, 1);
        adj.live[1] = true;
        let mut net = Network::from_mask(cfg, adj);
        net.weights.fill(weight);
        net
    }

    #[test]
    fn hand_evaluated_single_synapse() {
        let cfg = ArchConfig {
            activation_size: 1,
            n_total_neurons: 3,
            n_neuron_types: 1,
            n_synapse_types: 1,
            ..ArchConfig::default()
        };
        let mut genome = Genome::zeros(&cfg);
        genome.neurons[0].weight = vec![1.0];
        let mut net = one_synapse_net(&cfg, 0.5);
        net.set_inputs(&[2.0]).unwrap();
        net.micro_tick(&genome);
        assert!((net.activation(1)[0] - 0.761594155955765).abs() < 1e-12);
        assert!((net.activation(1)[0] - 1.0f64.tanh()).abs() < 1e-15);

        let mut dead = one_synapse_net(&cfg, 0.0);
        dead.set_inputs(&[2.0]).unwrap();
        dead.micro_tick(&genome);
        assert_eq!(dead.pending(1)[0], 0.0);
    }

    #[test]
    fn argmax_rules() {
        assert_eq!(argmax(&[0.2, -0.1, 0.9]), 2);
        assert_eq!(argmax(&[0.3, 0.3, 0.3]), 0);
        let v = [0.1, 0.5, 0.4];
        let scaled: Vec<f64> = v.iter().map(|x| x * 7.5).collect();
        assert_eq!(argmax(&v), argmax(&scaled));
    }

    #[test]
    fn feedback_overrides_first_signal_element_only() {
        let cfg = ArchConfig {
            sparsity: 0.0,
            ..ArchConfig::default()
        };
        let mut genome = Genome::zeros(&cfg);
        for n in &mut genome.neurons {
            for i in 0..4 {
                n.weight[i * 4 + i] = 1.0;
            }
        }
        // 1 input, 1 hidden, 3 outputs: only output -> hidden edges feed the hidden neuron besides the input
        let mut adj = Adjacency::empty(1, 1, 3);
        for o in 2..5 {
            adj.live[o * 5 + 1] = true;
        }
        let cfg = ArchConfig {
            n_total_neurons: 5,
            ..cfg
        };
        let mut net = Network::from_mask(&cfg, adj);
        net.weights.fill(0.5);
        for o in 2..5 {
            net.activation_mut(o).copy_from_slice(&[0.2, 0.4, 0.6, 0.8]);
        }
        assert!(net.inject_action_feedback(3).is_err());
        net.inject_action_feedback(1).unwrap();
        net.micro_tick(&genome);
        // first element: one-hot (0, 1, 0) summed; others: 3 * act * 0.5
        let s = net.pending(1);
        assert_eq!(s[0], 1.0);
        assert!((s[1] - 3.0 * 0.4 * 0.5).abs() < 1e-15);
        assert!((s[2] - 3.0 * 0.6 * 0.5).abs() < 1e-15);
        assert!((s[3] - 3.0 * 0.8 * 0.5).abs() < 1e-15);

        net.inject_action_feedback(0).unwrap();
        net.micro_tick(&genome);
        assert_eq!(net.pending(1)[0], 1.0);
        net.last_action = None;
        net.micro_tick(&genome);
        assert_eq!(net.pending(1)[0], 0.0);
    }

    #[test]
    fn fast_plasticity_matches_reference_step() {
        let cfg = ArchConfig::default();
        let genome = random_genome(&cfg, 1.0, 17);
        let mut net = Network::init(&cfg, 4, 2, &mut seed::rng(5)).unwrap();
        let mut rng = seed::rng(6);
        for v in net.activations.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        for v in net.prev_activations.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let before = net.clone();
        net.update_synapses(&genome, 0.7);
        let a = 4;
        for (e, (p, q)) in before.synapses().enumerate() {
            let rule = genome.rule(before.adjacency().role(p));
            let expected = gru_plasticity_step(
                rule,
                &before.weights[e * a..(e + 1) * a],
                before.prev_activation(p),
                before.activation(q),
                0.7,
                cfg.lr_constant,
            );
            for (x, y) in net.synapse_state(p, q).unwrap().iter().zip(&expected) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn zero_learning_rates_freeze_synapses() {
        let cfg = ArchConfig::default();
        let mut genome = random_genome(&cfg, 1.0, 2);
        for s in &mut genome.synapses {
            s.learning_rate = 0.0;
        }
        let mut net = Network::init(&cfg, 4, 2, &mut seed::rng(3)).unwrap();
        let init = net.weights.clone();
        let mut rng = seed::rng(4);
        for _ in 0..100 {
            let obs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            net.env_step(&genome, &obs, 1.0).unwrap();
        }
        assert_eq!(net.weights, init);
    }

    #[test]
    fn activations_bounded_and_deterministic() {
        let cfg = ArchConfig::default();
        let genome = random_genome(&cfg, 2.0, 8);
        let run = || {
            let mut net = Network::init(&cfg, 4, 2, &mut seed::rng(10)).unwrap();
            let mut rng = seed::rng(11);
            let mut actions = Vec::new();
            for _ in 0..50 {
                let obs: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect();
                actions.push(net.env_step(&genome, &obs, 1.0).unwrap());
                for q in 4..32 {
                    assert!(net.activation(q).iter().all(|v| v.abs() < 1.0));
                }
            }
            (actions, net)
        };
        let (a1, n1) = run();
        let (a2, n2) = run();
        assert_eq!(a1, a2);
        assert!(n1 == n2);
    }

    #[test]
    fn type_sharing_perturbation() {
        let cfg = ArchConfig::default();
        let genome = random_genome(&cfg, 1.0, 21);
        let base = {
            let mut net = Network::init(&cfg, 4, 2, &mut seed::rng(2)).unwrap();
            net.set_inputs(&[0.5, -0.3, 0.2, 0.9]).unwrap();
            net
        };
        let mut reference = base.clone();
        reference.micro_tick(&genome);

        let mut hidden_mut = genome.clone();
        hidden_mut.neurons[NeuronRole::Hidden.index()].bias[1] += 0.3;
        let mut net = base.clone();
        net.micro_tick(&hidden_mut);
        for q in 4..30 {
            assert_ne!(net.activation(q)[1], reference.activation(q)[1]);
        }
        for q in 30..32 {
            assert_eq!(net.activation(q), reference.activation(q));
        }

        let mut out_mut = genome.clone();
        out_mut.neurons[NeuronRole::Output.index()].bias[1] += 0.3;
        let mut net = base;
        net.micro_tick(&out_mut);
        for q in 4..30 {
            assert_eq!(net.activation(q), reference.activation(q));
        }
        for q in 30..32 {
            assert_ne!(net.activation(q)[1], reference.activation(q)[1]);
        }
    }

    #[test]
    fn relabel_rejects_role_changes() {
        let cfg = ArchConfig::default();
        let net = Network::init(&cfg, 4, 2, &mut seed::rng(2)).unwrap();
        let mut mapping: Vec<usize> = (0..32).collect();
        mapping.swap(0, 10);
        assert!(net.relabel(&mapping).is_err());
        let identity: Vec<usize> = (0..32).collect();
        assert!(net.relabel(&identity).unwrap() == net);
    }

    #[test]
    fn weight_sum_matrix_zero_for_dead_synapses() {
        let cfg = ArchConfig::default();
        let net = Network::init(&cfg, 4, 2, &mut seed::rng(2)).unwrap();
        let m = net.weight_sum_matrix();
        for p in 0..32 {
            for q in 0..32 {
                if !net.adjacency().is_live(p, q) {
                    assert_eq!(m[p * 32 + q], 0.0);
                } else {
                    assert!(m[p * 32 + q].abs() < 0.4);
                }
            }
        }
    }
}

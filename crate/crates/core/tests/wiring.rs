//! Wiring statistics and conservation of the live-edge set over lifetimes.

use std::collections::HashSet;

use rand::Rng;
use sfnn_core::evolution::{Lifetime, LifetimePlan};
use sfnn_core::model::{Agent, Model, Wiring};
use sfnn_core::{seed, Adjacency, ArchConfig, EnvKind, Genome, ModelSpec, Network};

#[test]
fn live_edge_count_matches_expectation() {
    // 4 inputs, 26 hidden, 2 outputs: 104 + 676 + 52 + 52 = 884 legal edges
    let cfg = ArchConfig::default();
    let n = 2000;
    let mut total = 0usize;
    for s in 0..n {
        let adj = Adjacency::sample(&cfg, 4, 2, &mut seed::rng(s)).unwrap();
        assert_eq!(adj.legal_count(), 884);
        total += adj.live_count();
    }
    let mean = total as f64 / n as f64;
    assert!(
        (mean - 442.0).abs() / 442.0 < 0.01,
        "mean live edges {mean}"
    );
}

#[test]
fn fully_connected_wiring_is_deterministic() {
    let cfg = ArchConfig {
        sparsity: 0.0,
        ..ArchConfig::default()
    };
    for s in 0..5 {
        let adj = Adjacency::sample(&cfg, 6, 3, &mut seed::rng(s)).unwrap();
        assert_eq!(adj.live_count(), adj.legal_count());
    }
    assert_eq!(
        Adjacency::sample(&cfg, 6, 3, &mut seed::rng(1)).unwrap(),
        Adjacency::full(&cfg, 6, 3).unwrap()
    );
}

fn random_model(s: u64) -> Model {
    let spec = ModelSpec::Sfnn(ArchConfig::default());
    let mut rng = seed::rng(s);
    let flat: Vec<f64> = (0..spec.n_params())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    spec.decode(&flat).unwrap()
}

#[test]
fn dead_synapses_stay_dead_over_a_lifetime() {
    for kind in EnvKind::ALL {
        let model = random_model(kind.index());
        let mut lifetime = Lifetime::new(&model, kind, LifetimePlan::new(9)).unwrap();
        let net = lifetime.agent().network().unwrap();
        let fingerprint = net.adjacency().fingerprint();
        let live: HashSet<(usize, usize)> = net.synapses().collect();
        let n = net.n_neurons();
        for _ in 0..8 {
            lifetime.run_episode().unwrap();
            let net = lifetime.agent().network().unwrap();
            assert_eq!(net.adjacency().fingerprint(), fingerprint);
            for p in 0..n {
                for q in 0..n {
                    assert_eq!(
                        net.synapse_state(p, q).is_some(),
                        live.contains(&(p, q)),
                        "{kind}: synapse {p}->{q}"
                    );
                }
            }
            assert_eq!(net.weights().len(), live.len() * 4);
        }
    }
}

#[test]
fn fixed_wiring_shares_masks_across_lifetimes() {
    let model = random_model(3);
    let prints: HashSet<u64> = (0..10)
        .map(|s| {
            Agent::build(&model, 4, 2, Wiring::Fixed(42), s)
                .unwrap()
                .wiring_fingerprint()
        })
        .collect();
    assert_eq!(prints.len(), 1);
    let prints: HashSet<u64> = (0..10)
        .map(|s| {
            Agent::build(&model, 4, 2, Wiring::PerLifetime, s)
                .unwrap()
                .wiring_fingerprint()
        })
        .collect();
    assert_eq!(prints.len(), 10);
}

#[test]
fn single_type_networks_ignore_hidden_type_swaps() {
    // with one neuron and one synapse type every unit shares its parameters,
    // so networks built from the same mask and states agree regardless of roles
    let cfg = ArchConfig {
        n_neuron_types: 1,
        n_synapse_types: 1,
        ..ArchConfig::default()
    };
    let mut rng = seed::rng(8);
    let flat: Vec<f64> = (0..sfnn_core::count_parameters(&cfg))
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let genome = Genome::unflatten(&flat, &cfg).unwrap();
    assert_eq!(genome.neurons.len(), 1);
    let net = Network::init(&cfg, 4, 2, &mut rng).unwrap();
    let mut mapping: Vec<usize> = (0..32).collect();
    mapping.swap(7, 19);
    let mut a = net.clone();
    let mut b = net.relabel(&mapping).unwrap();
    for t in 0..20 {
        let obs = [0.1 * t as f64, -0.2, 0.3, 0.0];
        assert_eq!(
            a.env_step(&genome, &obs, 1.0).unwrap(),
            b.env_step(&genome, &obs, 1.0).unwrap()
        );
    }
    assert!(a.relabel(&mapping).unwrap() == b);
}

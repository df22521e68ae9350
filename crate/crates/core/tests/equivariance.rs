//! Relabelling neurons must not change behaviour: same actions, and a final
//! state equal (bitwise) to the relabelled final state of the original run.

use rand::seq::SliceRandom;
use rand::Rng;
use sfnn_core::{seed, ArchConfig, Env, EnvKind, Genome, Network};

fn random_genome(rng: &mut impl Rng, cfg: &ArchConfig) -> Genome {
    let scale = rng.gen_range(0.2..2.0);
    let flat: Vec<f64> = (0..sfnn_core::count_parameters(cfg))
        .map(|_| rng.gen_range(-scale..scale))
        .collect();
    Genome::unflatten(&flat, cfg).unwrap()
}

/// Identity on inputs and outputs, random on hidden neurons.
fn hidden_permutation(
    rng: &mut impl Rng,
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
) -> Vec<usize> {
    let mut hidden: Vec<usize> = (n_in..n_in + n_hidden).collect();
    hidden.shuffle(rng);
    (0..n_in)
        .chain(hidden)
        .chain(n_in + n_hidden..n_in + n_hidden + n_out)
        .collect()
}

#[test]
fn hidden_relabelling_is_invisible() {
    let cfg = ArchConfig::default();
    let mut rng = seed::rng(5);
    for trial in 0..100 {
        let genome = random_genome(&mut rng, &cfg);
        let net = Network::init(&cfg, 4, 2, &mut seed::rng(trial)).unwrap();
        let mapping = hidden_permutation(&mut rng, 4, 26, 2);
        let mut a = net.clone();
        let mut b = net.relabel(&mapping).unwrap();

        let (mut env, mut obs) = Env::reset(EnvKind::CartPole, trial);
        let mut reward = 0.0;
        for _ in 0..50 {
            let act_a = a.env_step(&genome, &obs, reward).unwrap();
            let act_b = b.env_step(&genome, &obs, reward).unwrap();
            assert_eq!(act_a, act_b, "trial {trial}");
            let tr = env.step(act_a).unwrap();
            if tr.done {
                let next = env.reset_next();
                a.begin_episode();
                b.begin_episode();
                obs = next;
                reward = 0.0;
            } else {
                obs = tr.obs;
                reward = tr.reward;
            }
        }
        assert!(a.relabel(&mapping).unwrap() == b, "trial {trial}");
    }
}

#[test]
fn io_relabelling_with_matching_observation_and_action_maps() {
    let cfg = ArchConfig::default();
    let mut rng = seed::rng(6);
    for trial in 0..30 {
        let genome = random_genome(&mut rng, &cfg);
        let net = Network::init(&cfg, 6, 3, &mut seed::rng(100 + trial)).unwrap();
        let (n_in, n_hidden, n_out) = (6, 23, 3);
        let mut mapping = hidden_permutation(&mut rng, n_in, n_hidden, n_out);
        mapping[..n_in].shuffle(&mut rng);
        mapping[n_in + n_hidden..].shuffle(&mut rng);
        let out_start = n_in + n_hidden;

        let mut a = net.clone();
        let mut b = net.relabel(&mapping).unwrap();
        let (mut env, mut obs) = Env::reset(EnvKind::Acrobot, trial);
        let mut reward = 0.0;
        for _ in 0..50 {
            // relabelled input mapping[i] sees observation element i
            let mut obs_b = vec![0.0; n_in];
            for i in 0..n_in {
                obs_b[mapping[i]] = obs[i];
            }
            let act_a = a.env_step(&genome, &obs, reward).unwrap();
            let act_b = b.env_step(&genome, &obs_b, reward).unwrap();
            assert_eq!(
                mapping[out_start + act_a] - out_start,
                act_b,
                "trial {trial}"
            );
            let tr = env.step(act_a).unwrap();
            obs = tr.obs;
            reward = tr.reward;
        }
        assert!(a.relabel(&mapping).unwrap() == b, "trial {trial}");
    }
}

#[test]
fn relabelling_rejects_role_changes() {
    let cfg = ArchConfig::default();
    let net = Network::init(&cfg, 4, 2, &mut seed::rng(1)).unwrap();
    let mut mapping: Vec<usize> = (0..32).collect();
    mapping.swap(0, 10);
    assert!(net.relabel(&mapping).is_err());
    assert!(net.relabel(&mapping[..31]).is_err());
}

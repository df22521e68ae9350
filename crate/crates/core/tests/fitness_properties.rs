//! Properties of lifetime weighting, normalization and product fitness.

use proptest::prelude::*;
use sfnn_core::evolution::{aggregate_fitness, normalize_score, LifetimeConfig};
use sfnn_core::EnvKind;

fn kind() -> impl Strategy<Value = EnvKind> {
    prop_oneof![
        Just(EnvKind::CartPole),
        Just(EnvKind::Acrobot),
        Just(EnvKind::MountainCar)
    ]
}

proptest! {
    #[test]
    fn normalization_is_monotone_and_bounded(k in kind(), a in -1000.0..1000.0f64, b in -1000.0..1000.0f64) {
        let spec = k.spec();
        let (na, nb) = (normalize_score(a, &spec), normalize_score(b, &spec));
        prop_assert!((0.0..=1.0).contains(&na));
        if a <= b {
            prop_assert!(na <= nb);
        }
        let inside = |s: f64| s > spec.min_score && s < spec.max_score;
        if a < b && inside(a) && inside(b) {
            prop_assert!(na < nb);
        }
    }

    #[test]
    fn fitness_in_unit_interval_and_zero_iff_a_zero(scores in prop::collection::vec(0.0..=1.0f64, 1..4)) {
        let f = aggregate_fitness(&scores);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert_eq!(f == 0.0, scores.contains(&0.0));
        let min = scores.iter().cloned().fold(1.0, f64::min);
        prop_assert!(f <= min);
    }

    #[test]
    fn fitness_is_monotone_in_each_score(scores in prop::collection::vec(0.0..=1.0f64, 3), i in 0usize..3, bump in 0.0..1.0f64) {
        let mut better = scores.clone();
        better[i] = (better[i] + bump).min(1.0);
        prop_assert!(aggregate_fitness(&better) >= aggregate_fitness(&scores));
    }

    #[test]
    fn weighted_score_is_a_convex_combination(scores in prop::collection::vec(-500.0..500.0f64, 8)) {
        let w = LifetimeConfig::default().weighted_score(&scores);
        let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(w >= lo - 1e-9 && w <= hi + 1e-9);
    }
}

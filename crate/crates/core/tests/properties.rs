//! Randomized invariants driven by proptest. Protocol-level cases derive a
//! ChaCha stream from a proptest-chosen seed, since the protocol generator
//! lives in the library.

use proptest::prelude::*;
use qic_core::builtins::{
    and_prior, and_round_entropy, build_and_protocol, engine_branch_entropies, random_protocol, AndParams,
    RandomShape, YBranch,
};
use qic_core::disc::{disc_fast, disc_oracle, gdm_delta, rectangle_sum, BooleanTable};
use qic_core::engine::{parallel, qcc, qic};
use qic_core::info::binary_entropy;
use qic_core::linalg::Config;
use qic_core::verify::trial_rng;
use qic_core::{tv_distance, InputDistribution};

fn table_and_prior() -> impl Strategy<Value = (BooleanTable, InputDistribution)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(x, y)| {
        (
            proptest::collection::vec(proptest::collection::vec(0u8..=1, y), x),
            proptest::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0], x * y),
        )
            .prop_filter_map("needs positive mass", move |(values, raw)| {
                let total: f64 = raw.iter().sum();
                (total > 0.0).then(|| {
                    let probs = raw.iter().map(|v| v / total).collect();
                    (
                        BooleanTable::new(x, y, values).unwrap(),
                        InputDistribution::new(x, y, probs, 1e-9).unwrap(),
                    )
                })
            })
    })
}

fn prior(x: usize, y: usize) -> impl Strategy<Value = InputDistribution> {
    proptest::collection::vec(0.01f64..1.0, x * y).prop_map(move |raw| {
        let total: f64 = raw.iter().sum();
        InputDistribution::new(x, y, raw.iter().map(|v| v / total).collect(), 1e-9).unwrap()
    })
}

fn small_shape() -> impl Strategy<Value = RandomShape> {
    (2usize..=3, 2usize..=3, 1usize..=3, 2usize..=3, 1usize..=2)
        .prop_map(|(a, b, rounds, m, e)| RandomShape {
            alice_inputs: vec![a],
            bob_inputs: vec![b],
            rounds,
            message_dim: m,
            entanglement_dim: e,
        })
        .prop_filter("state stays small", |s| s.total_dim() <= 64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_discrepancy_is_exact((g, mu) in table_and_prior()) {
        let fast = disc_fast(&g, &mu).unwrap();
        let slow = disc_oracle(&g, &mu).unwrap();
        prop_assert_eq!(fast.value, slow.value);
        prop_assert!(fast.value > 0.0 && fast.value <= 1.0 + 1e-12);
        prop_assert!((rectangle_sum(&g, &mu, &fast.rows, &fast.cols).abs() - fast.value).abs() <= 1e-12);
        prop_assert!((rectangle_sum(&g, &mu, &slow.rows, &slow.cols).abs() - slow.value).abs() <= 1e-12);
    }

    #[test]
    fn gdm_grows_with_budget((f, mu) in table_and_prior(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = gdm_delta(&f, &mu, lo).unwrap();
        let large = gdm_delta(&f, &mu, hi).unwrap();
        prop_assert!(large.value >= small.value);
        let moved: f64 = small.flipped.iter().map(|&c| mu.probs()[c]).sum();
        prop_assert!(moved <= lo + 1e-12);
    }

    #[test]
    fn binary_entropy_is_symmetric_and_bounded(p in 0.0f64..=1.0) {
        let h = binary_entropy(p).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&h));
        prop_assert!((h - binary_entropy(1.0 - p).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn total_variation_is_a_metric(a in prior(2, 3), b in prior(2, 3), c in prior(2, 3)) {
        let d = |u: &InputDistribution, v: &InputDistribution| tv_distance(u, v, 1e-9).unwrap().delta;
        prop_assert!(d(&a, &a).abs() <= 1e-15);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-15);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d(&a, &b)));
    }

    #[test]
    fn mixing_priors_stays_normalized(a in prior(2, 2), b in prior(2, 2), w in 0.0f64..=1.0) {
        let m = a.mix(w, &b).unwrap();
        prop_assert!((m.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let t = tv_distance(&a, &m, 1e-9).unwrap().delta;
        prop_assert!((t - (1.0 - w) * tv_distance(&a, &b, 1e-9).unwrap().delta).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn information_never_exceeds_communication(shape in small_shape(), seed in any::<u64>()) {
        let cfg = Config::default();
        let mut rng = trial_rng(seed, "properties/qcc", 0);
        let p = random_protocol(&shape, &mut rng).unwrap();
        let mu = qic_core::verify::random_distribution(p.x_size, p.y_size, &mut rng).unwrap();
        let q = qic(&p, &mu, &cfg).unwrap();
        prop_assert!(q >= -1e-9);
        prop_assert!(q <= qcc(&p).unwrap() + 1e-8);
    }

    #[test]
    fn independent_side_by_side_runs_add(seed in any::<u64>()) {
        let cfg = Config::default();
        let shape = RandomShape { alice_inputs: vec![2], bob_inputs: vec![2], rounds: 2, message_dim: 2, entanglement_dim: 1 };
        let mut rng = trial_rng(seed, "properties/add", 0);
        let p1 = random_protocol(&shape, &mut rng).unwrap();
        let p2 = random_protocol(&shape, &mut rng).unwrap();
        let m1 = qic_core::verify::random_distribution(2, 2, &mut rng).unwrap();
        let m2 = qic_core::verify::random_distribution(2, 2, &mut rng).unwrap();
        let joint = qic(&parallel(&p1, &p2).unwrap(), &m1.product(&m2), &cfg).unwrap();
        let sum = qic(&p1, &m1, &cfg).unwrap() + qic(&p2, &m2, &cfg).unwrap();
        prop_assert!((joint - sum).abs() <= 1e-8);
    }

    #[test]
    fn mass_on_one_one_matches_eigenvalue_formula(r in 1usize..=4, w in 0.0f64..=0.5) {
        let cfg = Config::default();
        let params = AndParams::new(r).unwrap();
        let hs = engine_branch_entropies(params, &and_prior(w).unwrap(), 1, &cfg).unwrap();
        for (k, h) in hs.iter().enumerate() {
            let i = k + 1;
            if i % 2 == 1 {
                if let Some(h) = h {
                    let expect = and_round_entropy(i, params, w, YBranch::One).unwrap();
                    prop_assert!((h - expect).abs() <= 1e-8, "i = {}: {} vs {}", i, h, expect);
                }
            }
        }
    }

    #[test]
    fn mass_on_one_one_raises_the_cost(r in 1usize..=4, w in 0.001f64..=0.5) {
        let cfg = Config::default();
        let p = build_and_protocol(AndParams::new(r).unwrap()).unwrap();
        let base = qic(&p, &and_prior(0.0).unwrap(), &cfg).unwrap();
        prop_assert!(qic(&p, &and_prior(w).unwrap(), &cfg).unwrap() > base);
    }
}

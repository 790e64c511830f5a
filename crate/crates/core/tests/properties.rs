mod common;

use cycap::cancel_patch::{cancel_traced, patch_all};
use cycap::detect::{karp_min_mean, min_cost_circulation};
use cycap::instance::{parse_auto, Instance};
use cycap::pipeline::{cycap_once, CycapOptions, Variant};
use cycap::residual::{build_separated, map_back_arcs, structure_cost};
use cycap::tour::{random_tour, validate_tour};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance_strategy(max_n: usize) -> impl Strategy<Value = Instance> {
    (4..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1i64..200, n * n)
            .prop_map(move |c| Instance::from_fn("prop", n, |i, j| c[i * n + j]).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_and_tsplib_text_round_trip(inst in instance_strategy(9)) {
        let from_csv = parse_auto(&inst.to_matrix_csv()).unwrap();
        let from_tsplib = parse_auto(&inst.to_tsplib()).unwrap();
        for i in 0..inst.n() {
            for j in 0..inst.n() {
                if i != j {
                    prop_assert_eq!(from_csv.cost(i, j), inst.cost(i, j));
                    prop_assert_eq!(from_tsplib.cost(i, j), inst.cost(i, j));
                }
            }
        }
    }

    #[test]
    fn random_cancels_patch_to_tours(inst in instance_strategy(14), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tour = random_tour(inst.n(), &mut rng);
        let sep = build_separated(&inst, &tour);
        if let Some(s) = common::random_structure(&mut rng, &sep, 3) {
            let out = cancel_traced(&inst, &tour, &s).unwrap();
            let before = out.flow.decompose();
            prop_assert_eq!(before.isolated.len(), 2 * out.trimmed.len());
            let t = patch_all(&inst, &out.flow, &mut rng);
            prop_assert!(validate_tour(t.successors(), inst.n()));
        }
    }

    #[test]
    fn pipeline_never_degrades(inst in instance_strategy(11), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tour = random_tour(inst.n(), &mut rng);
        for v in [Variant::F, Variant::M, Variant::C] {
            let (t, _) = cycap_once(&inst, &tour, v, &mut rng, CycapOptions::default());
            prop_assert!(validate_tour(t.successors(), inst.n()));
            prop_assert!(t.cost(&inst) <= tour.cost(&inst));
        }
    }

    #[test]
    fn circulation_splits_into_disjoint_cycles(inst in instance_strategy(10), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tour = random_tour(inst.n(), &mut rng);
        let sep = build_separated(&inst, &tour);
        let circ = min_cost_circulation(&sep);
        if !circ.is_empty() {
            let s = map_back_arcs(&sep, &circ.arcs).unwrap();
            prop_assert_eq!(structure_cost(&inst, &s), circ.cost);
            let parts = s.decompose_cycles();
            let mut ins: Vec<_> = parts.iter().flat_map(|p| p.insertions().to_vec()).collect();
            let mut rem: Vec<_> = parts.iter().flat_map(|p| p.removals().to_vec()).collect();
            ins.sort_unstable();
            rem.sort_unstable();
            prop_assert_eq!(&ins[..], s.insertions());
            prop_assert_eq!(&rem[..], s.removals());
            let total: i64 = parts.iter().map(|p| structure_cost(&inst, p)).sum();
            prop_assert_eq!(total, circ.cost);
            // dropping a positive component would give a cheaper circulation
            for p in &parts {
                prop_assert!(structure_cost(&inst, p) <= 0);
            }
            if let Some(c) = karp_min_mean(&sep) {
                prop_assert!(circ.cost <= c.cost);
            }
        }
    }
}

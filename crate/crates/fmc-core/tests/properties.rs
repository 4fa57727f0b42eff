//! Property tests for the data-model and rounding invariants.

use fmc_core::instance::{from_graph, ColoredGraph, FmcInstance};
use fmc_core::rounding::{dependent_round_trial, Marginals};
use proptest::prelude::*;

fn arb_instance() -> impl Strategy<Value = FmcInstance> {
    (2usize..=16, 1usize..=8, 1usize..=3)
        .prop_flat_map(|(n, m, chi)| {
            let chi = chi.min(n);
            (
                Just(n),
                Just(m),
                Just(chi),
                proptest::collection::vec(0usize..chi, n),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), m),
                proptest::collection::vec(0.0f64..4.0, n),
                1usize..=m,
                any::<bool>(),
            )
        })
        .prop_filter_map("needs non-empty sets and all colors", |(n, m, chi, mut colors, members, weights, k, unweighted)| {
            for c in 0..chi {
                colors[c % n] = c; // force every color to appear
            }
            let sets: Vec<Vec<usize>> = members
                .iter()
                .map(|row| {
                    let mut s: Vec<usize> =
                        row.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| e).collect();
                    if s.is_empty() {
                        s.push(0);
                    }
                    s
                })
                .collect();
            let weights = if unweighted { vec![1.0; n] } else { weights };
            FmcInstance::new(n, m, k, chi, weights, colors, sets, None).ok()
        })
}

proptest! {
    #[test]
    fn serialization_roundtrips(inst in arb_instance()) {
        let text = inst.to_json();
        let back = FmcInstance::from_json(&text).unwrap();
        prop_assert_eq!(&inst, &back);
        prop_assert_eq!(text, back.to_json());
    }

    #[test]
    fn evaluate_is_pure_and_consistent(inst in arb_instance(), raw_sel in proptest::collection::vec(0usize..8, 1..4)) {
        let mut selected: Vec<usize> = raw_sel.into_iter().map(|s| s % inst.m).collect();
        selected.sort_unstable();
        selected.dedup();
        let (a, ra) = inst.evaluate(&selected).unwrap();
        let (b, rb) = inst.evaluate(&selected).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(ra.sigma.to_bits(), rb.sigma.to_bits());
        // covered is exactly the union; p partitions it
        let mut union: Vec<bool> = vec![false; inst.n];
        for &s in &selected {
            for &e in &inst.sets[s] {
                union[e] = true;
            }
        }
        for e in 0..inst.n {
            prop_assert_eq!(a.covered.contains(e), union[e]);
        }
        prop_assert_eq!(a.p.iter().sum::<usize>(), a.covered.count());
        let direct: f64 = (0..inst.n).filter(|&e| union[e]).map(|e| inst.weights[e]).sum();
        prop_assert!((a.weight - direct).abs() < 1e-9);
    }

    #[test]
    fn stats_invariants_hold(inst in arb_instance()) {
        let st = inst.stats();
        prop_assert!(st.a >= 1 && st.a <= inst.n);
        prop_assert!(st.f >= 1 && st.f <= inst.m);
        prop_assert_eq!(st.per_color_counts.iter().sum::<usize>(), inst.n);
        prop_assert_eq!(st.singleton_sets_only, st.a == 1);
    }

    #[test]
    fn graph_translation_has_frequency_two(
        nodes in 2usize..10,
        raw_edges in proptest::collection::vec((0usize..10, 0usize..10, 0usize..3), 1..14),
    ) {
        let edges: Vec<(usize, usize, usize, f64)> = raw_edges
            .into_iter()
            .map(|(u, v, c)| (u % nodes, v % nodes, c, 1.0))
            .filter(|&(u, v, _, _)| u != v)
            .map(|(u, v, mut c, w)| {
                c %= 3;
                (u, v, c, w)
            })
            .collect();
        prop_assume!(!edges.is_empty());
        // make colors contiguous from zero
        let mut edges = edges;
        let used_max = edges.iter().map(|e| e.2).max().unwrap();
        for (i, e) in edges.iter_mut().enumerate() {
            if i <= used_max {
                e.2 = i % (used_max + 1);
            }
        }
        let g = ColoredGraph { nodes, edges };
        let tr = from_graph(&g, 1).unwrap();
        prop_assert_eq!(tr.instance.stats().f, 2);
        prop_assert_eq!(tr.instance.n, g.edges.len());
    }

    #[test]
    fn rounding_cardinality_is_exact(values in proptest::collection::vec(0.0f64..1.0, 2..14), seed in any::<u64>()) {
        // trim to an integral sum
        let mut values = values;
        let sum: f64 = values.iter().sum();
        let mut excess = sum - sum.floor();
        for v in values.iter_mut() {
            let take = v.min(excess);
            *v -= take;
            excess -= take;
            if excess <= 0.0 {
                break;
            }
        }
        let p = Marginals::new(values).unwrap();
        for trial in 0..16 {
            let r = dependent_round_trial(&p, seed, trial);
            prop_assert_eq!(r.sum, p.declared_sum());
            prop_assert_eq!(r.bits.iter().filter(|&&b| b).count(), p.declared_sum());
        }
    }
}

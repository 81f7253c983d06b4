//! Property tests over the public API. Each property pins an invariant the
//! pipeline relies on rather than a specific expected output.

use maxtsp::instance::Instance;
use maxtsp::matching::{max_weight_cycle_cover, max_weight_perfect_matching};
use maxtsp::oracle::{brute_force_perfect_matching, exact_tsp_dp, tour_weight};
use maxtsp::pipeline::{run_pipeline, Options};
use maxtsp::weight::Weight;
use num_rational::Rational64;
use proptest::prelude::*;

/// Symmetric weight matrix with zero diagonal and small integer entries.
fn weights(n: usize) -> impl Strategy<Value = Vec<Vec<Weight>>> {
    proptest::collection::vec(0i64..=100, n * (n - 1) / 2).prop_map(move |flat| {
        let mut w = vec![vec![Weight::from(0); n]; n];
        let mut it = flat.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let x = Rational64::from(it.next().unwrap());
                w[i][j] = x;
                w[j][i] = x;
            }
        }
        w
    })
}

fn instances(lo: usize, hi: usize) -> impl Strategy<Value = Instance> {
    (lo..=hi)
        .prop_flat_map(weights)
        .prop_map(|w| Instance::new(w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The text format round-trips exactly: parse(to_text(x)) == x.
    #[test]
    fn text_round_trip(inst in instances(2, 9)) {
        let back = Instance::parse(&inst.to_text()).unwrap();
        prop_assert_eq!(back.n(), inst.n());
        for (u, v) in inst.pairs() {
            prop_assert_eq!(back.weight(u, v), inst.weight(u, v));
        }
    }

    /// The blossom solver agrees with brute force on perfect matchings.
    #[test]
    fn blossom_matches_brute_force(inst in instances(4, 8).prop_filter("even", |i| i.n() % 2 == 0)) {
        let n = inst.n();
        let edges: Vec<_> = inst.pairs().map(|(u, v)| (u, v, inst.weight(u, v))).collect();
        let m = max_weight_perfect_matching(n, &edges).unwrap();
        let got: Weight = m.iter().map(|e| inst.weight(e.0, e.1)).sum();
        let (best, _) = brute_force_perfect_matching(n, &edges).unwrap();
        prop_assert_eq!(got, best);
    }

    /// A maximum cycle cover never weighs less than the optimal tour (a tour
    /// is one feasible cover), and every cover cycle has length >= 3.
    #[test]
    fn cover_dominates_optimum(inst in instances(5, 8)) {
        let cover = max_weight_cycle_cover(&inst).unwrap();
        let (opt, _) = exact_tsp_dp(&inst).unwrap();
        prop_assert!(cover.weight(&inst) >= opt);
        for c in &cover.cycles {
            prop_assert!(c.len() >= 3);
        }
    }

    /// End-to-end: the emitted tour is a Hamiltonian cycle, its recomputed
    /// weight matches, and it reaches at least 7/9 of the exact optimum.
    #[test]
    fn pipeline_ratio_holds(inst in instances(5, 9)) {
        let (tour, cert) = run_pipeline(&inst, &Options { oracle: true }).unwrap();
        let mut seen = tour.order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..inst.n()).collect::<Vec<_>>());
        prop_assert_eq!(tour_weight(&inst, &tour.order), tour.weight);
        prop_assert!(cert.all_ok());
        let (opt, _) = exact_tsp_dp(&inst).unwrap();
        prop_assert!(tour.weight * Rational64::from(9) >= opt * Rational64::from(7));
        prop_assert!(tour.weight <= opt);
    }

    /// Two runs on the same instance produce byte-identical certificates.
    #[test]
    fn pipeline_is_deterministic(inst in instances(5, 9)) {
        let (_, a) = run_pipeline(&inst, &Options::default()).unwrap();
        let (_, b) = run_pipeline(&inst, &Options::default()).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }
}

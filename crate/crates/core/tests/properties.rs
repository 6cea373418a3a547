use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spanlab::graph::random_connected;
use spanlab::mst::{kruskal, ordering_counts, prim, WeightAssignment};
use spanlab::polytope::membership;
use spanlab::pwit::{theta, theta_inv};
use spanlab::{Graph, LaplacianSystem};

fn host() -> impl Strategy<Value = Graph> {
    (3usize..8, 0usize..6, any::<u64>())
        .prop_map(|(n, extra, seed)| random_connected(n, n - 1 + extra, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kruskal_equals_prim(g in host(), seed in any::<u64>()) {
        let w = WeightAssignment::sample(g.m(), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(kruskal(&g, &w).unwrap(), prim(&g, &w).unwrap());
    }

    #[test]
    fn mst_ignores_monotone_maps(g in host(), seed in any::<u64>()) {
        let w = WeightAssignment::sample(g.m(), &mut ChaCha8Rng::seed_from_u64(seed));
        let v = w.map_monotone(|x| (3.0 * x).exp() - 7.0).unwrap();
        prop_assert_eq!(kruskal(&g, &w).unwrap(), kruskal(&g, &v).unwrap());
    }

    #[test]
    fn ust_edge_probabilities_sum_to_rank(g in host()) {
        let sys = LaplacianSystem::new(&g).unwrap();
        let total: f64 = (0..g.m()).map(|e| sys.edge_probability_ust(e).unwrap()).sum();
        prop_assert!((total - (g.n() - 1) as f64).abs() < 1e-9);
    }

    #[test]
    fn ordering_edge_probabilities_sum_to_rank(g in host().prop_filter("small", |g| g.m() <= 9)) {
        let c = ordering_counts(&g).unwrap();
        let total: f64 = (0..g.m()).map(|e| num_traits::ToPrimitive::to_f64(&c.edge_probability(e)).unwrap()).sum();
        prop_assert!((total - (g.n() - 1) as f64).abs() < 1e-12);
    }

    #[test]
    fn mst_indicators_are_members(g in host(), seed in any::<u64>()) {
        let w = WeightAssignment::sample(g.m(), &mut ChaCha8Rng::seed_from_u64(seed));
        let t = kruskal(&g, &w).unwrap();
        let x: Vec<f64> = (0..g.m()).map(|e| if t.contains(e) { 1.0 } else { 0.0 }).collect();
        prop_assert!(membership(&g, &x).unwrap().member);
    }

    #[test]
    fn theta_inverts(f in 0.001f64..0.999) {
        let lambda = theta_inv(f).unwrap();
        prop_assert!((theta(lambda) - f).abs() < 1e-10);
    }

    #[test]
    fn text_round_trip(g in host()) {
        prop_assert_eq!(Graph::from_text(&g.to_text()).unwrap(), g);
    }
}

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unigame_core::graph::ball;
use unigame_core::{check_mtp, generate_ball, rooted_isomorphic, uniform_root_ensemble, Graph, LimitKind};

fn arb_kind() -> impl Strategy<Value = LimitKind> {
    prop_oneof![
        Just(LimitKind::TwoWayPath),
        (1usize..=3).prop_map(LimitKind::IntegerLattice),
        (2usize..=4).prop_map(LimitKind::RegularTree),
    ]
}

#[test]
fn cycle_transport_by_hand() {
    let (e, _) = uniform_root_ensemble(&Graph::cycle(5)).unwrap();
    let r = check_mtp(&e, |g, o, v| f64::from(u8::from(g.has_edge(o, v)))).unwrap();
    assert_eq!((r.lhs, r.rhs), (2.0, 2.0));
    let (e, _) = uniform_root_ensemble(&Graph::star(3)).unwrap();
    let r = check_mtp(&e, |g, o, v| f64::from(u8::from(g.has_edge(o, v) && g.degree(o) > g.degree(v)))).unwrap();
    assert!((r.lhs - 0.75).abs() < 1e-15 && (r.rhs - 0.75).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mass_transport_balances(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=14);
        let g = common::random_connected(&mut rng, n, n / 2, 4);
        let table: Vec<f64> = (0..5 * 5 * 16).map(|_| rng.gen_range(0.0..3.0)).collect();
        let (e, _) = uniform_root_ensemble(&g).unwrap();
        let r = check_mtp(&e, |g, o, v| table[(g.degree(o) * 5 + g.degree(v)) * 16 + g.distances_from(o)[v].min(15)]).unwrap();
        prop_assert!(r.abs_diff <= 1e-12, "{:?}", r);
    }

    #[test]
    fn limit_balls_are_consistent_under_truncation(kind in arb_kind(), r in 0usize..4) {
        let small = generate_ball(kind, r).unwrap();
        let big = generate_ball(kind, r + 3).unwrap();
        let cut = ball(big.graph(), 0, r);
        prop_assert_eq!(small.n() as u128, kind.ball_size(r));
        prop_assert!(rooted_isomorphic(&small, &cut).unwrap());
        prop_assert_eq!(small.code().unwrap(), cut.code().unwrap());
    }

    #[test]
    fn tree_balls_have_full_degree_inside(d in 2usize..=5, r in 0usize..5) {
        let b = generate_ball(LimitKind::RegularTree(d), r).unwrap();
        for v in 0..b.n() {
            if b.depth(v) < r {
                prop_assert_eq!(b.graph().degree(v), d);
            } else if r > 0 {
                prop_assert_eq!(b.graph().degree(v), 1);
            }
        }
        prop_assert_eq!(b.graph().edge_count() + 1, b.n());
    }
}

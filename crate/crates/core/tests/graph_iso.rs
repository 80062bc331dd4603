use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unigame_core::graph::{ball, local_distance, rooted_isomorphic, Ball, Graph};

/// Exhaustive search for a root-preserving bijection.
fn brute_force_rooted_iso(g1: &Graph, r1: usize, g2: &Graph, r2: usize) -> bool {
    let n = g1.n();
    if n != g2.n() || g1.edge_count() != g2.edge_count() {
        return false;
    }
    let others1: Vec<usize> = (0..n).filter(|&v| v != r1).collect();
    let others2: Vec<usize> = (0..n).filter(|&v| v != r2).collect();
    let mut perm: Vec<usize> = (0..others2.len()).collect();
    let mut map = vec![0usize; n];
    loop {
        map[r1] = r2;
        for (i, &v) in others1.iter().enumerate() {
            map[v] = others2[perm[i]];
        }
        if g1.edges().all(|(u, v)| g2.has_edge(map[u], map[v])) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_deg: usize) -> Graph {
    let mut edges = Vec::new();
    let mut deg = vec![0usize; n];
    for v in 1..n {
        let mut u = rng.gen_range(0..v);
        let mut tries = 0;
        while deg[u] >= max_deg && tries < 50 {
            u = rng.gen_range(0..v);
            tries += 1;
        }
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v || deg[u] >= max_deg || deg[v] >= max_deg {
            continue;
        }
        if edges.contains(&(u, v)) || edges.contains(&(v, u)) {
            continue;
        }
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    Graph::from_edges(n, edges, None).unwrap()
}

#[test]
fn codes_agree_with_brute_force_on_small_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut iso_pairs = 0;
    let mut non_iso_pairs = 0;
    for trial in 0..200 {
        let n = rng.gen_range(2..=9);
        let extra = rng.gen_range(0..6);
        let g1 = random_connected(&mut rng, n, extra, 4);
        let r1 = rng.gen_range(0..n);
        let (g2, r2) = if trial % 2 == 0 {
            // A relabelled copy, possibly with a different root.
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let g2 = g1.relabel(&perm);
            let r2 = if rng.gen_bool(0.5) { perm[r1] } else { rng.gen_range(0..n) };
            (g2, r2)
        } else {
            let g2 = random_connected(&mut rng, n, g1.edge_count() + 1 - n, 4);
            (g2, rng.gen_range(0..n))
        };
        let b1 = Ball::from_rooted(&g1, r1, n).unwrap();
        let b2 = Ball::from_rooted(&g2, r2, n).unwrap();
        let expected = brute_force_rooted_iso(&g1, r1, &g2, r2);
        assert_eq!(rooted_isomorphic(&b1, &b2).unwrap(), expected, "trial {trial}");
        if expected {
            iso_pairs += 1;
        } else {
            non_iso_pairs += 1;
        }
    }
    assert!(iso_pairs > 50 && non_iso_pairs > 50, "{iso_pairs} / {non_iso_pairs}");
}

#[test]
fn triangle_ball_is_not_square_ball() {
    let b3 = ball(&Graph::cycle(3), 0, 1);
    let b4 = ball(&Graph::cycle(4), 0, 1);
    assert!(!brute_force_rooted_iso(b3.graph(), 0, b4.graph(), 0));
    assert!(!rooted_isomorphic(&b3, &b4).unwrap());
    let c4 = Graph::cycle(4);
    assert!(rooted_isomorphic(&ball(&c4, 0, 2), &ball(&c4, 3, 2)).unwrap());
    assert!(rooted_isomorphic(&b3, &b3).unwrap());
}

fn arb_graph() -> impl Strategy<Value = (Graph, usize)> {
    (2usize..=12, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra = rng.gen_range(0..n);
        let g = random_connected(&mut rng, n, extra, 4);
        let root = rng.gen_range(0..n);
        (g, root)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn code_is_invariant_under_relabeling((g, root) in arb_graph(), seed in any::<u64>(), r in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut rng);
        let h = g.relabel(&perm);
        let c1 = ball(&g, root, r).code().unwrap().clone();
        let c2 = ball(&h, perm[root], r).code().unwrap().clone();
        prop_assert_eq!(c1, c2);
    }

    #[test]
    fn balls_grow_monotonically((g, root) in arb_graph(), r in 0usize..6) {
        let small = ball(&g, root, r);
        let big = ball(&g, root, r + 1);
        prop_assert!(small.host_ids().iter().all(|h| big.host_ids().contains(h)));
    }

    #[test]
    fn local_distance_is_a_symmetric_ultrametric(
        (g1, r1) in arb_graph(), (g2, r2) in arb_graph(), (g3, r3) in arb_graph()
    ) {
        let rm = 3;
        let (b1, b2, b3) = (ball(&g1, r1, rm), ball(&g2, r2, rm), ball(&g3, r3, rm));
        let d12 = local_distance(&b1, &b2).unwrap().value;
        let d21 = local_distance(&b2, &b1).unwrap().value;
        let d13 = local_distance(&b1, &b3).unwrap().value;
        let d23 = local_distance(&b2, &b3).unwrap().value;
        prop_assert_eq!(d12, d21);
        prop_assert!(d13 <= d12.max(d23));
    }
}

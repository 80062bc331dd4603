#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unigame_core::Graph;

/// Random spanning tree plus `extra` random edges, all degrees at most `max_deg`.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_deg: usize) -> Graph {
    let mut edges = Vec::new();
    let mut deg = vec![0usize; n];
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < max_deg).collect();
        let u = open[rng.gen_range(0..open.len())];
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v || deg[u] >= max_deg || deg[v] >= max_deg || edges.iter().any(|&e| e == (u.min(v), u.max(v)) || e == (u.max(v), u.min(v))) {
            continue;
        }
        edges.push((u.min(v), u.max(v)));
        deg[u] += 1;
        deg[v] += 1;
    }
    Graph::from_edges(n, edges, Some(max_deg)).unwrap()
}

/// Connected graphs with `2 <= n <= 12` and degrees at most 4.
pub fn small_corpus(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=12);
            let extra = rng.gen_range(0..=n);
            random_connected(&mut rng, n, extra, 4)
        })
        .collect()
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Random source values summing to zero.
pub fn balanced(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v = uniform(rng, n, -1.0, 1.0);
    let mean = v.iter().sum::<f64>() / n as f64;
    for x in &mut v {
        *x -= mean;
    }
    v
}

pub fn centered(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| v - mean).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Binomial coefficient by the multiplicative formula.
pub fn choose(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of rooted-isomorphism classes of the box `[n]^d`, counted by
/// brute force: two vertices are equivalent iff some symmetry of the box
/// (coordinate permutation and reflections) maps one to the other.
pub fn box_orbit_count(n: usize, d: usize) -> usize {
    let mut seen = std::collections::HashSet::new();
    let total = n.pow(d as u32);
    for v in 0..total {
        let mut c: Vec<usize> = (0..d).map(|i| (v / n.pow(i as u32)) % n).collect();
        for x in &mut c {
            *x = (*x).min(n - 1 - *x);
        }
        c.sort_unstable();
        seen.insert(c);
    }
    seen.len()
}

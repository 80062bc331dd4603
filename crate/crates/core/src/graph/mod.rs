//! Bounded-degree simple graphs, rooted balls and their canonical codes.

mod ball;
mod canon;
mod io;
mod metric;

pub use ball::{ball, Ball};
pub use canon::{canonical_code, canonical_code_with_limit, rooted_isomorphic, Code, DEFAULT_MAX_VERTICES};
pub use io::{load_graph, write_edge_list};
pub use metric::{local_distance, LocalDistance};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A simple undirected graph with sorted adjacency lists and a declared
/// degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    degree_bound: usize,
}

impl Graph {
    /// Builds a graph on `n` vertices. With `degree_bound = None` the bound is
    /// the maximum observed degree.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        degree_bound: Option<usize>,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        let degree_bound = degree_bound.unwrap_or(max_degree);
        if let Some((vertex, list)) = adj.iter().enumerate().find(|(_, l)| l.len() > degree_bound) {
            return Err(Error::DegreeBoundExceeded {
                vertex,
                degree: list.len(),
                bound: degree_bound,
            });
        }
        Ok(Graph { adj, degree_bound })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// BFS distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().len() == 1
    }

    /// Eccentricity maximum over all vertices. Requires a connected graph.
    pub fn diameter(&self) -> Result<usize> {
        if self.n() == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut diam = 0;
        for v in 0..self.n() {
            let d = self.distances_from(v);
            let ecc = d.iter().copied().max().unwrap_or(0);
            if ecc == usize::MAX {
                return Err(Error::NotConnected);
            }
            diam = diam.max(ecc);
        }
        Ok(diam)
    }

    /// Induced subgraph on `vertices` (kept in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut l: Vec<usize> = self.adj[v]
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect();
                l.sort_unstable();
                l
            })
            .collect();
        Graph {
            adj,
            degree_bound: self.degree_bound,
        }
    }

    /// Graph obtained by renaming vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![Vec::new(); self.n()];
        for (v, list) in self.adj.iter().enumerate() {
            let mut l: Vec<usize> = list.iter().map(|&w| perm[w]).collect();
            l.sort_unstable();
            adj[perm[v]] = l;
        }
        Graph {
            adj,
            degree_bound: self.degree_bound,
        }
    }

    /// Cycle `C_n` (n >= 3).
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)), None).expect("valid cycle")
    }

    /// Path `P_n` on vertices 0..n.
    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i)), None).expect("valid path")
    }

    /// Star with `leaves` leaves; the center is vertex 0.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i)), None).expect("valid star")
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges, None).expect("valid complete graph")
    }

    /// Box `[n]^d` with nearest-neighbour edges. Vertex `i` has coordinates
    /// given by [`box_coords`].
    pub fn lattice_box(n: usize, d: usize) -> Graph {
        assert!(d >= 1, "box dimension must be at least 1");
        let total = n.checked_pow(d as u32).expect("box size overflows");
        let mut edges = Vec::with_capacity(d * total);
        let mut stride = 1;
        for _ in 0..d {
            for v in 0..total {
                if (v / stride) % n + 1 < n {
                    edges.push((v, v + stride));
                }
            }
            stride *= n;
        }
        Graph::from_edges(total, edges, Some(2 * d)).expect("valid box")
    }
}

/// One-based coordinates of vertex `v` in [`Graph::lattice_box`]`(n, d)`.
pub fn box_coords(v: usize, n: usize, d: usize) -> Vec<usize> {
    let mut rest = v;
    (0..d)
        .map(|_| {
            let c = rest % n + 1;
            rest /= n;
            c
        })
        .collect()
}

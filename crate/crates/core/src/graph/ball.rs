use std::sync::OnceLock;

use super::canon::{canonical_code, Code};
use super::Graph;
use crate::error::{Error, Result};

/// The induced rooted subgraph `B_r(G, o)`.
///
/// Local vertex ids follow BFS order from the root, so the root is always 0
/// and the root's neighbors are `1..=deg(root)` in host adjacency order.
#[derive(Debug, Clone)]
pub struct Ball {
    graph: Graph,
    radius: usize,
    depth: Vec<usize>,
    host: Vec<usize>,
    code: OnceLock<Code>,
}

/// Extracts `B_r(g, v)`, including edges between vertices at distance exactly `r`.
///
/// Panics if `v` is not a vertex of `g`.
pub fn ball(g: &Graph, v: usize, r: usize) -> Ball {
    assert!(v < g.n(), "vertex {v} out of range (n = {})", g.n());
    let mut order = vec![v];
    let mut depth = vec![0];
    let mut dist = std::collections::HashMap::from([(v, 0usize)]);
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        let du = depth[i];
        i += 1;
        if du == r {
            continue;
        }
        for &w in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(du + 1);
                order.push(w);
                depth.push(du + 1);
            }
        }
    }
    let graph = g.induced(&order);
    Ball {
        graph,
        radius: r,
        depth,
        host: order,
        code: OnceLock::new(),
    }
}

impl Ball {
    /// Wraps a connected graph rooted at `root` as a ball of the given radius.
    /// Vertices are reordered into BFS order from the root.
    pub fn from_rooted(g: &Graph, root: usize, radius: usize) -> Result<Ball> {
        if root >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: root, n: g.n() });
        }
        let b = ball(g, root, radius);
        if b.graph.n() != g.n() {
            return Err(Error::OutOfRange(format!(
                "graph has vertices beyond radius {radius} of the root (or is disconnected)"
            )));
        }
        Ok(b)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depth
    }

    /// Host-graph id of local vertex `v`.
    pub fn host(&self, v: usize) -> usize {
        self.host[v]
    }

    pub fn host_ids(&self) -> &[usize] {
        &self.host
    }

    pub fn host_root(&self) -> usize {
        self.host[0]
    }

    /// Local id of a host vertex, if it lies in the ball.
    pub fn local_of(&self, host_vertex: usize) -> Option<usize> {
        self.host.iter().position(|&h| h == host_vertex)
    }

    /// `B_r` of this ball around its own root; `r` must not exceed the radius.
    pub fn sub_ball(&self, r: usize) -> Ball {
        assert!(r <= self.radius, "sub-ball radius {r} > {}", self.radius);
        let mut b = ball(&self.graph, 0, r);
        // Keep ids pointing into the original host graph.
        b.host = b.host.iter().map(|&l| self.host[l]).collect();
        b
    }

    /// Canonical code, computed once and cached.
    pub fn code(&self) -> Result<&Code> {
        if let Some(c) = self.code.get() {
            return Ok(c);
        }
        let c = canonical_code(self)?;
        Ok(self.code.get_or_init(|| c))
    }
}

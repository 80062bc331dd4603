//! Canonical codes for rooted balls.
//!
//! Two encodings share one code space, told apart by a leading tag byte.
//! Being a tree is an isomorphism invariant, so dispatching on it is safe:
//!
//! * trees (`m = n - 1`) get a balanced-parenthesis string built from
//!   level-wise canonical child multisets;
//! * everything else goes through colour refinement with the root fixed by
//!   its depth colour, then individualization/backtracking over residual cells,
//!   keeping the lexicographically smallest relabelled edge list. Subtrees are
//!   pruned with automorphisms discovered from coinciding leaves.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ball::Ball;
use super::Graph;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_VERTICES: usize = 100_000;

const TAG_TREE: u8 = 0;
const TAG_GENERAL: u8 = 1;

/// Canonical byte string of a rooted-isomorphism class. Serializes as
/// lowercase hex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code(Vec<u8>);

impl Code {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Code> {
        hex::decode(s)
            .map(Code)
            .map_err(|e| Error::parse(0, format!("bad code hex: {e}")))
    }
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.to_hex();
        if h.len() > 24 {
            write!(f, "Code({}..{})", &h[..16], h.len() / 2)
        } else {
            write!(f, "Code({h})")
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(&s).map(Code).map_err(serde::de::Error::custom)
    }
}

pub fn canonical_code(b: &Ball) -> Result<Code> {
    canonical_code_with_limit(b, DEFAULT_MAX_VERTICES)
}

pub fn canonical_code_with_limit(b: &Ball, max_vertices: usize) -> Result<Code> {
    if b.n() > max_vertices {
        return Err(Error::SizeLimitExceeded {
            size: b.n(),
            limit: max_vertices,
        });
    }
    let g = b.graph();
    if g.edge_count() + 1 == g.n() {
        Ok(tree_code(g, b.depths()))
    } else {
        Ok(general_code(g, b.depths()))
    }
}

/// True iff a root-preserving isomorphism exists.
pub fn rooted_isomorphic(b1: &Ball, b2: &Ball) -> Result<bool> {
    if b1.n() != b2.n() || b1.graph().edge_count() != b2.graph().edge_count() {
        return Ok(false);
    }
    Ok(b1.code()? == b2.code()?)
}

fn push_u32(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u32).to_le_bytes());
}

fn tree_code(g: &Graph, depth: &[usize]) -> Code {
    let n = g.n();
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let mut by_level = vec![Vec::new(); max_depth + 1];
    for v in 0..n {
        by_level[depth[v]].push(v);
    }
    let children = |v: usize| g.neighbors(v).iter().copied().filter(move |&w| depth[w] == depth[v] + 1);

    // Canonical label of each vertex within its level.
    let mut label = vec![0u32; n];
    for level in by_level.iter().rev() {
        let mut sigs: Vec<(Vec<u32>, usize)> = level
            .iter()
            .map(|&v| {
                let mut s: Vec<u32> = children(v).map(|w| label[w]).collect();
                s.sort_unstable();
                (s, v)
            })
            .collect();
        sigs.sort();
        let mut rank = 0u32;
        for i in 0..sigs.len() {
            if i > 0 && sigs[i].0 != sigs[i - 1].0 {
                rank += 1;
            }
            label[sigs[i].1] = rank;
        }
    }

    // Balanced parentheses from a DFS visiting children in label order.
    let mut bits: Vec<bool> = Vec::with_capacity(2 * n);
    let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    let sorted_children = |v: usize| {
        let mut c: Vec<usize> = children(v).collect();
        c.sort_by_key(|&w| label[w]);
        c
    };
    bits.push(true);
    stack.push((0, sorted_children(0), 0));
    while let Some((_, kids, next)) = stack.last_mut() {
        if *next < kids.len() {
            let w = kids[*next];
            *next += 1;
            bits.push(true);
            let c = sorted_children(w);
            stack.push((w, c, 0));
        } else {
            bits.push(false);
            stack.pop();
        }
    }

    let mut out = vec![TAG_TREE];
    push_u32(&mut out, n);
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                byte |= 1 << (7 - i);
            }
        }
        out.push(byte);
    }
    Code(out)
}

/// Stable colour refinement. Colours are cell start positions: a vertex's
/// colour is the number of vertices with a strictly smaller colour, so
/// singleton cells never change colour under further splitting.
fn refine(adj: &[Vec<usize>], colors: &mut [u32]) {
    let n = colors.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut buf: Vec<u32> = Vec::new();
    let mut cells = count_cells(colors);
    loop {
        buf.clear();
        offsets.clear();
        offsets.push(0);
        for list in adj {
            let start = buf.len();
            buf.extend(list.iter().map(|&w| colors[w]));
            buf[start..].sort_unstable();
            offsets.push(buf.len());
        }
        let nbrs = |v: usize| &buf[offsets[v]..offsets[v + 1]];
        order.sort_unstable_by(|&a, &b| colors[a].cmp(&colors[b]).then_with(|| nbrs(a).cmp(nbrs(b))));
        let mut fresh = vec![0u32; n];
        let mut start = 0usize;
        for i in 0..n {
            let v = order[i];
            if i > 0 {
                let u = order[i - 1];
                if colors[u] != colors[v] || nbrs(u) != nbrs(v) {
                    start = i;
                }
            }
            fresh[v] = start as u32;
        }
        let new_cells = count_cells(&fresh);
        colors.copy_from_slice(&fresh);
        if new_cells == cells {
            break;
        }
        cells = new_cells;
    }
}

fn count_cells(colors: &[u32]) -> usize {
    let mut c: Vec<u32> = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Individualizes `v` inside its cell: `v` keeps the cell start, the rest
/// move one position up.
fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let c = colors[v];
    colors
        .iter()
        .enumerate()
        .map(|(u, &cu)| if cu == c && u != v { c + 1 } else { cu })
        .collect()
}

struct Leaf {
    labeling: Vec<u32>,
    path: Vec<usize>,
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    leaves: HashMap<Vec<u32>, Leaf>,
    best: Option<Vec<u32>>,
    automorphisms: Vec<Vec<usize>>,
    path: Vec<usize>,
}

impl Search<'_> {
    fn encode(&self, labeling: &[u32]) -> Vec<u32> {
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            for &w in list {
                if u < w {
                    let (a, b) = (labeling[u], labeling[w]);
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        edges.sort_unstable();
        edges.into_iter().flat_map(|(a, b)| [a, b]).collect()
    }

    /// Explores the node with the given equitable colouring. Returns the level
    /// to resume at when an automorphism shows the remaining subtree is
    /// equivalent to one already explored.
    fn run(&mut self, colors: Vec<u32>) -> Option<usize> {
        let n = colors.len();
        let mut size = vec![0usize; n];
        for &c in &colors {
            size[c as usize] += 1;
        }
        let target = match (0..n).find(|&c| size[c] > 1) {
            Some(c) => c as u32,
            None => return self.leaf(colors),
        };
        let level = self.path.len();
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &members {
            if !explored.is_empty() && self.equivalent_to_explored(w, &explored) {
                continue;
            }
            explored.push(w);
            let mut child = individualize(&colors, w);
            refine(self.adj, &mut child);
            self.path.push(w);
            let jump = self.run(child);
            self.path.pop();
            if let Some(k) = jump {
                if k < level {
                    return Some(k);
                }
            }
        }
        None
    }

    fn leaf(&mut self, labeling: Vec<u32>) -> Option<usize> {
        let enc = self.encode(&labeling);
        if let Some(prev) = self.leaves.get(&enc) {
            let n = labeling.len();
            let mut inverse = vec![0usize; n];
            for (v, &l) in labeling.iter().enumerate() {
                inverse[l as usize] = v;
            }
            let gamma: Vec<usize> = prev.labeling.iter().map(|&l| inverse[l as usize]).collect();
            let common = prev
                .path
                .iter()
                .zip(&self.path)
                .take_while(|(a, b)| a == b)
                .count();
            if gamma.iter().enumerate().any(|(v, &g)| v != g) {
                self.automorphisms.push(gamma);
            }
            return Some(common);
        }
        if self.best.as_ref().is_none_or(|b| enc < *b) {
            self.best = Some(enc.clone());
        }
        self.leaves.insert(
            enc,
            Leaf {
                labeling,
                path: self.path.clone(),
            },
        );
        None
    }

    /// Whether `w` shares an orbit with an explored sibling under the known
    /// automorphisms that fix the current individualization path pointwise.
    fn equivalent_to_explored(&self, w: usize, explored: &[usize]) -> bool {
        let n = self.adj.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if self.path.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            any = true;
            for (v, &g) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, v), find(&mut parent, g));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let rw = find(&mut parent, w);
        explored.iter().any(|&e| find(&mut parent, e) == rw)
    }
}

fn general_code(g: &Graph, depth: &[usize]) -> Code {
    let n = g.n();
    let mut sorted_depths: Vec<usize> = depth.to_vec();
    sorted_depths.sort_unstable();
    let mut colors: Vec<u32> = depth
        .iter()
        .map(|d| sorted_depths.partition_point(|x| x < d) as u32)
        .collect();
    refine(g.adjacency(), &mut colors);

    let mut search = Search {
        adj: g.adjacency(),
        leaves: HashMap::new(),
        best: None,
        automorphisms: Vec::new(),
        path: Vec::new(),
    };
    search.run(colors);
    let best = search.best.expect("search visits at least one leaf");

    let mut out = Vec::with_capacity(9 + 4 * best.len());
    out.push(TAG_GENERAL);
    push_u32(&mut out, n);
    push_u32(&mut out, best.len() / 2);
    for x in best {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Code(out)
}

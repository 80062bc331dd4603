//! Unimodular ensembles: uniformly rooted finite graphs, transitive limit
//! graphs, and a mass-transport checker.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ball, load_graph, Ball, Graph, DEFAULT_MAX_VERTICES};

/// Transitive limit graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "param", rename_all = "snake_case")]
pub enum LimitKind {
    /// `Z`
    TwoWayPath,
    /// `Z^d`, d >= 1
    IntegerLattice(usize),
    /// `T_D`, D >= 2
    RegularTree(usize),
}

impl LimitKind {
    fn validate(self) -> Result<()> {
        match self {
            LimitKind::IntegerLattice(0) => Err(Error::OutOfRange("lattice dimension must be >= 1".into())),
            LimitKind::RegularTree(d) if d < 2 => Err(Error::OutOfRange("tree degree must be >= 2".into())),
            _ => Ok(()),
        }
    }

    /// Degree of every vertex of the limit graph.
    pub fn degree(self) -> usize {
        match self {
            LimitKind::TwoWayPath => 2,
            LimitKind::IntegerLattice(d) => 2 * d,
            LimitKind::RegularTree(d) => d,
        }
    }

    /// Number of vertices in a radius-`r` ball, saturating.
    pub fn ball_size(self, r: usize) -> u128 {
        match self {
            LimitKind::TwoWayPath => 2 * r as u128 + 1,
            LimitKind::IntegerLattice(d) => {
                // sum_k 2^k C(d,k) C(r,k)
                let mut total: u128 = 0;
                for k in 0..=d.min(r) {
                    let term = binomial(d, k).saturating_mul(binomial(r, k)).saturating_mul(1u128 << k.min(100));
                    total = total.saturating_add(term);
                }
                total
            }
            LimitKind::RegularTree(d) => {
                let mut total: u128 = 1;
                let mut layer: u128 = d as u128;
                for _ in 0..r {
                    total = total.saturating_add(layer);
                    layer = layer.saturating_mul(d as u128 - 1);
                }
                total
            }
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

#[derive(Debug, Clone)]
pub struct Atom {
    pub graph: Arc<Graph>,
    pub root: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub enum RootedEnsemble {
    FiniteSupport(Vec<Atom>),
    Transitive(LimitKind),
}

/// Emitted when a uniformly rooted ensemble is built from a disconnected graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisconnectedWarning {
    pub components: usize,
}

impl RootedEnsemble {
    pub fn finite(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if let Some(a) = atoms.iter().find(|a| !(a.weight > 0.0) || !a.weight.is_finite()) {
            return Err(Error::OutOfRange(format!("atom weight {} must be positive", a.weight)));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange(format!("weights sum to {total}, not 1")));
        }
        for a in &atoms {
            if a.root >= a.graph.n() {
                return Err(Error::VertexOutOfRange {
                    vertex: a.root,
                    n: a.graph.n(),
                });
            }
        }
        Ok(RootedEnsemble::FiniteSupport(atoms))
    }

    pub fn transitive(kind: LimitKind) -> Result<Self> {
        kind.validate()?;
        Ok(RootedEnsemble::Transitive(kind))
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match self {
            RootedEnsemble::FiniteSupport(a) => Some(a),
            RootedEnsemble::Transitive(_) => None,
        }
    }
}

/// `mu_G`: the root chosen uniformly among the vertices of `g`, each atom
/// restricted to its root's component.
pub fn uniform_root_ensemble(g: &Graph) -> Result<(RootedEnsemble, Option<DisconnectedWarning>)> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let w = 1.0 / n as f64;
    let comps = g.components();
    if comps.len() == 1 {
        let shared = Arc::new(g.clone());
        let atoms = (0..n)
            .map(|v| Atom {
                graph: Arc::clone(&shared),
                root: v,
                weight: w,
            })
            .collect();
        return Ok((RootedEnsemble::FiniteSupport(atoms), None));
    }
    log::warn!("graph has {} components; atoms use the root's component", comps.len());
    let mut atoms = Vec::with_capacity(n);
    for comp in &comps {
        let sub = Arc::new(g.induced(comp));
        for (local, _) in comp.iter().enumerate() {
            atoms.push(Atom {
                graph: Arc::clone(&sub),
                root: local,
                weight: w,
            });
        }
    }
    Ok((
        RootedEnsemble::FiniteSupport(atoms),
        Some(DisconnectedWarning {
            components: comps.len(),
        }),
    ))
}

/// Ball of radius `r` around any vertex of a transitive limit graph.
pub fn generate_ball(kind: LimitKind, r: usize) -> Result<Ball> {
    generate_ball_with_limit(kind, r, DEFAULT_MAX_VERTICES)
}

pub fn generate_ball_with_limit(kind: LimitKind, r: usize, max_vertices: usize) -> Result<Ball> {
    kind.validate()?;
    let size = kind.ball_size(r);
    if size > max_vertices as u128 {
        return Err(Error::SizeLimitExceeded {
            size: usize::try_from(size).unwrap_or(usize::MAX),
            limit: max_vertices,
        });
    }
    let (g, root) = match kind {
        LimitKind::TwoWayPath => (Graph::path(2 * r + 1), r),
        LimitKind::IntegerLattice(d) => lattice_ball(d, r),
        LimitKind::RegularTree(d) => (tree_ball(d, r), 0),
    };
    Ok(ball(&g, root, r))
}

fn lattice_ball(d: usize, r: usize) -> (Graph, usize) {
    let r = r as i64;
    // Enumerate points with |x|_1 <= r in lexicographic order.
    let mut points: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-r; d];
    loop {
        if cur.iter().map(|x| x.abs()).sum::<i64>() <= r {
            points.push(cur.clone());
        }
        let mut i = d;
        loop {
            if i == 0 {
                let index: std::collections::HashMap<&[i64], usize> =
                    points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
                let mut edges = Vec::new();
                for (i, p) in points.iter().enumerate() {
                    for k in 0..d {
                        let mut q = p.clone();
                        q[k] += 1;
                        if let Some(&j) = index.get(q.as_slice()) {
                            edges.push((i, j));
                        }
                    }
                }
                let root = index[vec![0; d].as_slice()];
                let g = Graph::from_edges(points.len(), edges, Some(2 * d)).expect("lattice ball is simple");
                return (g, root);
            }
            i -= 1;
            if cur[i] < r {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = -r;
                }
                break;
            }
        }
    }
}

fn tree_ball(d: usize, r: usize) -> Graph {
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1;
    for depth in 0..r {
        let mut next = Vec::new();
        for &v in &frontier {
            let kids = if depth == 0 { d } else { d - 1 };
            for _ in 0..kids {
                edges.push((v, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    Graph::from_edges(next_id, edges, Some(d)).expect("tree ball is simple")
}

/// Both sides of the mass-transport principle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MtpReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
}

/// Mass sent out of the root vs. mass received by the root, for a transport
/// function `t(graph, from, to)`.
pub fn check_mtp<T>(e: &RootedEnsemble, t: T) -> Result<MtpReport>
where
    T: Fn(&Graph, usize, usize) -> f64,
{
    let atoms = match e {
        RootedEnsemble::FiniteSupport(a) => a,
        RootedEnsemble::Transitive(_) => {
            return Err(Error::UnsupportedEnsemble(
                "mass transport is checked on finite-support ensembles only".into(),
            ))
        }
    };
    let eval = |g: &Graph, from: usize, to: usize| -> Result<f64> {
        let x = t(g, from, to);
        if x.is_finite() && x >= 0.0 {
            Ok(x)
        } else {
            Err(Error::InvalidTransport { from, to, value: x })
        }
    };
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for a in atoms {
        let g = a.graph.as_ref();
        let (mut out, mut inn) = (0.0, 0.0);
        for v in 0..g.n() {
            out += eval(g, a.root, v)?;
            inn += eval(g, v, a.root)?;
        }
        lhs += a.weight * out;
        rhs += a.weight * inn;
    }
    Ok(MtpReport {
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
    })
}

/// JSON form of an ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleDoc {
    Finite { atoms: Vec<AtomDoc> },
    Transitive(LimitKind),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomDoc {
    pub graph_file: String,
    pub root: usize,
    pub weight: f64,
}

impl EnsembleDoc {
    /// Resolves graph files relative to `base_dir`.
    pub fn load(&self, base_dir: &Path) -> Result<RootedEnsemble> {
        match self {
            EnsembleDoc::Transitive(kind) => RootedEnsemble::transitive(*kind),
            EnsembleDoc::Finite { atoms } => {
                let mut cache: std::collections::HashMap<&str, Arc<Graph>> = Default::default();
                let mut out = Vec::with_capacity(atoms.len());
                for a in atoms {
                    let g = match cache.get(a.graph_file.as_str()) {
                        Some(g) => Arc::clone(g),
                        None => {
                            let text = std::fs::read_to_string(base_dir.join(&a.graph_file))?;
                            let g = Arc::new(load_graph(&text)?);
                            cache.insert(&a.graph_file, Arc::clone(&g));
                            g
                        }
                    };
                    out.push(Atom {
                        graph: g,
                        root: a.root,
                        weight: a.weight,
                    });
                }
                RootedEnsemble::finite(out)
            }
        }
    }
}

use rayon::prelude::*;

use super::{CostModel, EdgeView};
use crate::ensemble::{generate_ball, RootedEnsemble};
use crate::error::{Error, Result};
use crate::graph::{ball, Ball, Graph};
use crate::reduction::{class_values, ActionRule, ClassPartition, Profile};

/// A cost model bound to a finite graph, with every player's balls
/// precomputed.
///
/// Neighbour `i` of vertex `v` (in adjacency order) has local id `i + 1` in
/// `v`'s edge ball.
pub struct LocalGame<'a, M: CostModel + ?Sized> {
    graph: &'a Graph,
    model: &'a M,
    own: Vec<Ball>,
    /// Only needed when the model radius is 0.
    edge: Option<Vec<Ball>>,
}

impl<'a, M: CostModel + ?Sized> LocalGame<'a, M> {
    pub fn new(graph: &'a Graph, model: &'a M) -> Result<Self> {
        let r = model.radius();
        let own: Vec<Ball> = (0..graph.n())
            .into_par_iter()
            .map(|v| {
                let b = ball(graph, v, r);
                model.prepare(&b).map(|_| b)
            })
            .collect::<Result<_>>()?;
        let edge = (r == 0).then(|| (0..graph.n()).into_par_iter().map(|v| ball(graph, v, 1)).collect());
        Ok(LocalGame {
            graph,
            model,
            own,
            edge,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn model(&self) -> &M {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn own_ball(&self, v: usize) -> &Ball {
        &self.own[v]
    }

    /// Edge view from `v` towards its `i`-th neighbour.
    pub fn edge_view(&self, v: usize, i: usize) -> EdgeView<'_> {
        let ball = match &self.edge {
            Some(e) => &e[v],
            None => &self.own[v],
        };
        EdgeView { ball, neighbor: i + 1 }
    }

    pub fn check_profile(&self, prof: &Profile) -> Result<()> {
        if prof.n() != self.graph.n() {
            return Err(Error::DimensionMismatch {
                expected: self.graph.n(),
                got: prof.n(),
            });
        }
        if prof.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: prof.dim(),
            });
        }
        Ok(())
    }

    /// Cost to `v` of playing `a` while everyone else follows `prof`.
    pub fn deviation_cost(&self, prof: &Profile, v: usize, a: &[f64]) -> f64 {
        let mut total = self.model.own_cost(&self.own[v], a);
        for (i, &u) in self.graph.neighbors(v).iter().enumerate() {
            total += self.model.interaction(self.edge_view(v, i), a, prof.get(u));
        }
        total
    }

    /// Gradient of [`LocalGame::deviation_cost`] in `a`.
    pub fn deviation_grad(&self, prof: &Profile, v: usize, a: &[f64]) -> Vec<f64> {
        let mut g = self.model.own_cost_grad(&self.own[v], a);
        for (i, &u) in self.graph.neighbors(v).iter().enumerate() {
            let gi = self.model.interaction_grad(self.edge_view(v, i), a, prof.get(u));
            for (x, y) in g.iter_mut().zip(gi) {
                *x += y;
            }
        }
        g
    }

    pub fn player_cost(&self, prof: &Profile, v: usize) -> f64 {
        self.deviation_cost(prof, v, prof.get(v))
    }

    /// The first-order operator at `v`.
    pub fn first_order(&self, prof: &Profile, v: usize) -> Vec<f64> {
        self.deviation_grad(prof, v, prof.get(v))
    }

    /// Per-vertex contribution to the unnormalized potential.
    pub fn potential_term(&self, prof: &Profile, v: usize) -> f64 {
        let x = prof.get(v);
        let mut total = self.model.own_cost(&self.own[v], x);
        for (i, &u) in self.graph.neighbors(v).iter().enumerate() {
            total += 0.5 * self.model.pair_potential(self.edge_view(v, i), x, prof.get(u));
        }
        total
    }

    /// Sum over players of own cost plus half the pair potential on each
    /// incident edge.
    pub fn potential_hat(&self, prof: &Profile) -> Result<f64> {
        self.check_profile(prof)?;
        let terms: Vec<f64> = (0..self.graph.n())
            .into_par_iter()
            .map(|v| self.potential_term(prof, v))
            .collect();
        // Sequential sum keeps results independent of the thread count.
        Ok(terms.iter().sum())
    }

    /// The first-order operator at every vertex, row-major.
    pub fn first_order_all(&self, prof: &Profile) -> Result<Vec<f64>> {
        self.check_profile(prof)?;
        let rows: Vec<Vec<f64>> = (0..self.graph.n())
            .into_par_iter()
            .map(|v| self.first_order(prof, v))
            .collect();
        Ok(rows.concat())
    }

    /// Gradient of the normalized potential with respect to per-class values.
    pub fn reduced_gradient(&self, part: &ClassPartition, prof: &Profile) -> Result<Vec<f64>> {
        if part.n() != self.graph.n() {
            return Err(Error::DimensionMismatch {
                expected: self.graph.n(),
                got: part.n(),
            });
        }
        class_values(part, prof)?;
        Ok(self.class_sums(part, &self.first_order_all(prof)?, 1.0 / self.graph.n() as f64))
    }

    pub(crate) fn class_sums(&self, part: &ClassPartition, per_vertex: &[f64], scale: f64) -> Vec<f64> {
        let m = self.dim();
        let mut out = vec![0.0; part.class_count() * m];
        for v in 0..part.n() {
            let c = part.class_of(v);
            for k in 0..m {
                out[c * m + k] += per_vertex[v * m + k];
            }
        }
        for x in &mut out {
            *x *= scale;
        }
        out
    }
}

pub fn player_cost<M: CostModel + ?Sized>(g: &Graph, prof: &Profile, v: usize, model: &M) -> Result<f64> {
    let game = LocalGame::new(g, model)?;
    game.check_profile(prof)?;
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    Ok(game.player_cost(prof, v))
}

/// Unnormalized potential of a profile; divide by `n` for the uniformly
/// rooted potential.
pub fn potential_profile<M: CostModel + ?Sized>(g: &Graph, prof: &Profile, model: &M) -> Result<f64> {
    LocalGame::new(g, model)?.potential_hat(prof)
}

pub fn first_order<M: CostModel + ?Sized>(g: &Graph, prof: &Profile, v: usize, model: &M) -> Result<Vec<f64>> {
    let game = LocalGame::new(g, model)?;
    game.check_profile(prof)?;
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    Ok(game.first_order(prof, v))
}

pub fn reduced_gradient<M: CostModel + ?Sized>(
    g: &Graph,
    part: &ClassPartition,
    prof: &Profile,
    model: &M,
) -> Result<Vec<f64>> {
    LocalGame::new(g, model)?.reduced_gradient(part, prof)
}

/// Potential of an action rule under an ensemble.
pub fn potential<M: CostModel + ?Sized>(e: &RootedEnsemble, rule: &ActionRule, model: &M) -> Result<f64> {
    potential_detailed(e, rule, model).map(|(phi, _)| phi)
}

/// Like [`potential`], also counting rule lookups that fell back to the
/// default.
pub fn potential_detailed<M: CostModel + ?Sized>(
    e: &RootedEnsemble,
    rule: &ActionRule,
    model: &M,
) -> Result<(f64, usize)> {
    if rule.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: rule.dim(),
        });
    }
    match e {
        RootedEnsemble::FiniteSupport(atoms) => {
            let terms: Vec<(f64, usize)> = atoms
                .par_iter()
                .map(|a| rooted_term(&a.graph, a.root, rule, model).map(|(t, u)| (a.weight * t, u)))
                .collect::<Result<_>>()?;
            Ok(terms.iter().fold((0.0, 0), |(s, n), (t, u)| (s + t, n + u)))
        }
        RootedEnsemble::Transitive(kind) => {
            if !model.is_local() {
                return Err(Error::UnsupportedEnsemble(
                    "per-vertex model data cannot be evaluated on a limit graph".into(),
                ));
            }
            let big = generate_ball(*kind, rule.radius().max(model.radius()) + 1)?;
            rooted_term(big.graph(), 0, rule, model)
        }
    }
}

/// Own cost plus half the pair potentials at `root`, with actions given by
/// the rule. `g` must contain the rule ball of every neighbour of `root`.
fn rooted_term<M: CostModel + ?Sized>(
    g: &Graph,
    root: usize,
    rule: &ActionRule,
    model: &M,
) -> Result<(f64, usize)> {
    let mut unseen = 0;
    let mut action = |v: usize| -> Result<Vec<f64>> {
        let (x, seen) = rule.lookup(&ball(g, v, rule.radius()))?;
        unseen += usize::from(!seen);
        Ok(x.to_vec())
    };
    let x = action(root)?;
    let own = ball(g, root, model.radius());
    model.prepare(&own)?;
    let mut total = model.own_cost(&own, &x);
    let edge_ball = if model.radius() == 0 { ball(g, root, 1) } else { own.clone() };
    for (i, &u) in g.neighbors(root).iter().enumerate() {
        let xu = action(u)?;
        let e = EdgeView {
            ball: &edge_ball,
            neighbor: i + 1,
        };
        total += 0.5 * model.pair_potential(e, &x, &xu);
    }
    if !total.is_finite() {
        return Err(Error::NonFiniteValue("potential term".into()));
    }
    Ok((total, unseen))
}

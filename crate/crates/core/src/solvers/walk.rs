use crate::error::{Error, Result};
use crate::graph::Graph;

/// Simple random walk on a finite graph without isolated vertices.
#[derive(Debug, Clone)]
pub struct RWOperator<'a> {
    graph: &'a Graph,
}

impl<'a> RWOperator<'a> {
    pub fn new(graph: &'a Graph) -> Result<Self> {
        if graph.n() == 0 {
            return Err(Error::EmptyGraph);
        }
        if let Some(v) = (0..graph.n()).find(|&v| graph.degree(v) == 0) {
            return Err(Error::OutOfRange(format!("vertex {v} is isolated")));
        }
        Ok(RWOperator { graph })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    /// Reversing measure: the degree.
    pub fn measure(&self, v: usize) -> f64 {
        self.graph.degree(v) as f64
    }

    /// Transition probability as a fraction `(numerator, denominator)`.
    pub fn transition_fraction(&self, v: usize, u: usize) -> (u64, u64) {
        (u64::from(self.graph.has_edge(v, u)), self.graph.degree(v) as u64)
    }

    pub fn transition(&self, v: usize, u: usize) -> f64 {
        let (a, b) = self.transition_fraction(v, u);
        a as f64 / b as f64
    }

    /// `(P f)(v)`: average of `f` over the neighbours of `v`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.graph.n())
            .map(|v| {
                let nb = self.graph.neighbors(v);
                nb.iter().map(|&u| f[u]).sum::<f64>() / nb.len() as f64
            })
            .collect()
    }

    /// `(I - P) f`.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.apply(f).iter().zip(f).map(|(pf, x)| x - pf).collect()
    }

    /// One step of the walk's distribution: `(q P)(u)`.
    pub fn push_forward(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; q.len()];
        for v in 0..self.graph.n() {
            let share = q[v] / self.graph.degree(v) as f64;
            for &u in self.graph.neighbors(v) {
                out[u] += share;
            }
        }
        out
    }

    /// Checks `m(v) p(v, u) = m(u) p(u, v)` in exact rational arithmetic for
    /// every ordered pair of adjacent vertices, and that rows sum to one.
    pub fn is_reversible(&self) -> bool {
        self.graph.edges().all(|(v, u)| {
            let (a, b) = self.transition_fraction(v, u);
            let (c, d) = self.transition_fraction(u, v);
            let (mv, mu) = (self.graph.degree(v) as u64, self.graph.degree(u) as u64);
            mv * a * d == mu * c * b
        }) && (0..self.graph.n()).all(|v| {
            let row: u64 = self.graph.neighbors(v).iter().map(|&u| self.transition_fraction(v, u).0).sum();
            row == self.graph.degree(v) as u64
        })
    }
}

/// The simple random walk on the `D`-regular tree, reduced to the distance
/// from the root. Functions are indexed by distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialChain {
    degree: usize,
}

impl RadialChain {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::OutOfRange("tree degree must be >= 2".into()));
        }
        Ok(RadialChain { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Probability of moving one step closer to the root from distance >= 1.
    pub fn p_in(&self) -> f64 {
        1.0 / self.degree as f64
    }

    pub fn p_out(&self) -> f64 {
        (self.degree - 1) as f64 / self.degree as f64
    }

    /// `(P f)(k)` for a radial `f`, treating values beyond the slice as 0.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let at = |k: usize| f.get(k).copied().unwrap_or(0.0);
        (0..f.len())
            .map(|k| {
                if k == 0 {
                    at(1)
                } else {
                    self.p_in() * at(k - 1) + self.p_out() * at(k + 1)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_operator() {
        let g = Graph::star(3);
        let w = RWOperator::new(&g).unwrap();
        assert!(w.is_reversible());
        assert_eq!(w.apply(&[3.0, 0.0, 0.0, 3.0]), vec![1.0, 3.0, 3.0, 3.0]);
        assert_eq!(w.laplacian(&[1.0; 4]), vec![0.0; 4]);
        let q = w.push_forward(&[1.0, 0.0, 0.0, 0.0]);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(RWOperator::new(&Graph::path(1)).is_err());
    }

    #[test]
    fn radial_chain() {
        let c = RadialChain::new(3).unwrap();
        assert_eq!(c.apply(&[0.0, 3.0, 6.0]), vec![3.0, 4.0, 1.0]);
        assert!(RadialChain::new(1).is_err());
    }
}

//! Cost models, per-player costs, the potential and its first variation.

mod config;
mod local;
mod models;
mod verify;

pub use config::{BuiltinModel, ModelConfig, ModelType};
pub use local::{
    first_order, player_cost, potential, potential_detailed, potential_profile, reduced_gradient, LocalGame,
};
pub use models::{register_interaction, LQModel, Source, WFunction, WModel};
pub use verify::{verify_potential_property, PotentialCheck};

use crate::error::{Error, Result};
use crate::graph::Ball;

/// A ball seen from its root together with one distinguished neighbour of the
/// root, given by its local id in `ball`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeView<'a> {
    pub ball: &'a Ball,
    pub neighbor: usize,
}

/// Optional smoothness constants of a model, used for step-size hints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub own: f64,
    pub interaction: f64,
}

/// A player's cost structure. Own cost depends on the player's ball and
/// action; the interaction and pair-potential terms on an edge view and the
/// two endpoint actions.
///
/// `own_cost` receives balls of radius [`CostModel::radius`]; edge views use
/// balls of radius `max(radius, 1)`.
pub trait CostModel: Send + Sync {
    fn dim(&self) -> usize;

    fn radius(&self) -> usize;

    /// Called once per ball before any evaluation on it. Implementations that
    /// look up data by ball code should validate here.
    fn prepare(&self, _b: &Ball) -> Result<()> {
        Ok(())
    }

    /// False if the model reads anything beyond the ball structure, e.g. a
    /// per-vertex table indexed by host ids.
    fn is_local(&self) -> bool {
        true
    }

    fn own_cost(&self, b: &Ball, a: &[f64]) -> f64;

    fn own_cost_grad(&self, b: &Ball, a: &[f64]) -> Vec<f64>;

    fn interaction(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64;

    /// Gradient of the interaction in its first action argument.
    fn interaction_grad(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64>;

    fn pair_potential(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64;

    fn pair_potential_grad1(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64>;

    fn pair_potential_grad2(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64>;

    fn reference_action(&self) -> Vec<f64>;

    fn lipschitz(&self) -> Option<Lipschitz> {
        None
    }
}

/// Coordinatewise bounds on actions; infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxConstraint {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxConstraint {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for (l, h) in lo.iter().zip(&hi) {
            if l.is_nan() || h.is_nan() || l > h {
                return Err(Error::OutOfRange(format!("invalid bounds [{l}, {h}]")));
            }
        }
        Ok(BoxConstraint { lo, hi })
    }

    pub fn unbounded(dim: usize) -> Self {
        BoxConstraint {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    /// The same interval in every coordinate.
    pub fn interval(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        BoxConstraint::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn is_unbounded(&self) -> bool {
        self.lo.iter().all(|x| *x == f64::NEG_INFINITY) && self.hi.iter().all(|x| *x == f64::INFINITY)
    }

    pub fn project(&self, a: &mut [f64]) {
        for (k, x) in a.iter_mut().enumerate() {
            *x = x.clamp(self.lo[k], self.hi[k]);
        }
    }

    pub fn contains(&self, a: &[f64]) -> bool {
        a.iter().enumerate().all(|(k, x)| *x >= self.lo[k] && *x <= self.hi[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_projection() {
        let k = BoxConstraint::interval(2, -1.0, 1.0).unwrap();
        let mut a = [3.0, -0.5];
        k.project(&mut a);
        assert_eq!(a, [1.0, -0.5]);
        assert!(k.contains(&a));
        assert!(!k.is_unbounded());
        assert!(BoxConstraint::unbounded(1).is_unbounded());
        assert!(BoxConstraint::interval(1, 1.0, 0.0).is_err());
        assert!(BoxConstraint::new(vec![0.0], vec![]).is_err());
    }
}

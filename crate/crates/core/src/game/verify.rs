use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{CostModel, EdgeView};
use crate::error::{Error, Identity, Result, Violation};
use crate::graph::{ball, Graph};

/// Outcome of a successful potential-property check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialCheck {
    pub trials: usize,
    /// Largest scaled discrepancy seen across all identities.
    pub max_discrepancy: f64,
}

const FD_STEP: f64 = 1e-6;

/// Samples action tuples in `[-2, 2]^m` and checks that the pair potential
/// reproduces unilateral changes of the interaction on the directed edge
/// `(o, v)` of `g`, in difference and in gradient form. Supplied gradients
/// are also compared against central differences.
pub fn verify_potential_property<M: CostModel + ?Sized>(
    model: &M,
    g: &Graph,
    edge: (usize, usize),
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<PotentialCheck> {
    if trials == 0 {
        return Err(Error::InvalidOptions("trials must be >= 1".into()));
    }
    let (o, v) = edge;
    for w in [o, v] {
        if w >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: w, n: g.n() });
        }
    }
    if !g.has_edge(o, v) {
        return Err(Error::OutOfRange(format!("({o}, {v}) is not an edge")));
    }
    let r = model.radius().max(1);
    let (bo, bv) = (ball(g, o, r), ball(g, v, r));
    model.prepare(&bo)?;
    model.prepare(&bv)?;
    let fwd = EdgeView {
        ball: &bo,
        neighbor: bo.local_of(v).expect("neighbour lies in the ball"),
    };
    let rev = EdgeView {
        ball: &bv,
        neighbor: bv.local_of(o).expect("neighbour lies in the ball"),
    };

    let m = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = || -> Vec<f64> { (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect() };
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (a, a2, b, b2) = (sample(), sample(), sample(), sample());
        let fail = |identity, lhs: f64, rhs: f64| {
            Error::PropertyViolated(Box::new(Violation {
                identity,
                a: a.clone(),
                a_alt: a2.clone(),
                b: b.clone(),
                b_alt: b2.clone(),
                lhs,
                rhs,
            }))
        };
        let mut check = |identity, lhs: f64, rhs: f64| -> Result<()> {
            let d = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
            if !d.is_finite() || d > tol {
                return Err(fail(identity, lhs, rhs));
            }
            worst = worst.max(d);
            Ok(())
        };

        let lhs = model.pair_potential(fwd, &a, &b) - model.pair_potential(fwd, &a2, &b);
        let rhs = model.interaction(fwd, &a, &b) - model.interaction(fwd, &a2, &b);
        check(Identity::FirstArgument, lhs, rhs)?;

        let lhs = model.pair_potential(fwd, &a, &b) - model.pair_potential(fwd, &a, &b2);
        let rhs = model.interaction(rev, &b, &a) - model.interaction(rev, &b2, &a);
        check(Identity::SecondArgument, lhs, rhs)?;

        let g1 = model.pair_potential_grad1(fwd, &a, &b);
        let g2 = model.pair_potential_grad2(fwd, &a, &b);
        let h1 = model.interaction_grad(fwd, &a, &b);
        let h1_rev = model.interaction_grad(rev, &b, &a);
        for k in 0..m {
            check(Identity::FirstGradient, g1[k], h1[k])?;
            check(Identity::SecondGradient, g2[k], h1_rev[k])?;
        }

        // Supplied gradients against central differences.
        let fd_tol = tol.max(1e-5);
        for k in 0..m {
            let bump = |x: &[f64], s: f64| -> Vec<f64> {
                let mut y = x.to_vec();
                y[k] += s;
                y
            };
            let pairs = [
                (
                    Identity::FirstGradient,
                    (model.pair_potential(fwd, &bump(&a, FD_STEP), &b) - model.pair_potential(fwd, &bump(&a, -FD_STEP), &b))
                        / (2.0 * FD_STEP),
                    g1[k],
                ),
                (
                    Identity::SecondGradient,
                    (model.pair_potential(fwd, &a, &bump(&b, FD_STEP)) - model.pair_potential(fwd, &a, &bump(&b, -FD_STEP)))
                        / (2.0 * FD_STEP),
                    g2[k],
                ),
                (
                    Identity::FirstGradient,
                    (model.interaction(fwd, &bump(&a, FD_STEP), &b) - model.interaction(fwd, &bump(&a, -FD_STEP), &b))
                        / (2.0 * FD_STEP),
                    h1[k],
                ),
            ];
            for (identity, fd, analytic) in pairs {
                let d = (fd - analytic).abs() / (1.0 + analytic.abs());
                if !d.is_finite() || d > fd_tol {
                    return Err(fail(identity, fd, analytic));
                }
            }
        }
    }
    Ok(PotentialCheck {
        trials,
        max_discrepancy: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{LQModel, Source, WModel};
    use crate::graph::Ball;

    /// Interaction `a b^2` with itself as pair potential; not a potential game.
    struct Skewed;

    impl CostModel for Skewed {
        fn dim(&self) -> usize {
            1
        }
        fn radius(&self) -> usize {
            0
        }
        fn own_cost(&self, _b: &Ball, _a: &[f64]) -> f64 {
            0.0
        }
        fn own_cost_grad(&self, _b: &Ball, _a: &[f64]) -> Vec<f64> {
            vec![0.0]
        }
        fn interaction(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
            a[0] * b[0] * b[0]
        }
        fn interaction_grad(&self, _e: EdgeView<'_>, _a: &[f64], b: &[f64]) -> Vec<f64> {
            vec![b[0] * b[0]]
        }
        fn pair_potential(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
            self.interaction(e, a, b)
        }
        fn pair_potential_grad1(&self, _e: EdgeView<'_>, _a: &[f64], b: &[f64]) -> Vec<f64> {
            vec![b[0] * b[0]]
        }
        fn pair_potential_grad2(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
            vec![2.0 * a[0] * b[0]]
        }
        fn reference_action(&self) -> Vec<f64> {
            vec![0.0]
        }
    }

    #[test]
    fn builtin_models_pass() {
        let g = Graph::cycle(5);
        let lq = LQModel::new(Source::constant(1.0).unwrap()).unwrap();
        assert!(verify_potential_property(&lq, &g, (0, 1), 100, 1e-10, 1).is_ok());
        for p in [1.5, 2.0, 3.0, 4.0] {
            let w = WModel::power(Source::constant(0.5).unwrap(), p).unwrap();
            let r = verify_potential_property(&w, &g, (2, 3), 100, 1e-10, 2).unwrap();
            assert_eq!(r.trials, 100);
        }
    }

    #[test]
    fn skewed_model_is_rejected() {
        let g = Graph::path(2);
        match verify_potential_property(&Skewed, &g, (0, 1), 50, 1e-10, 3) {
            Err(Error::PropertyViolated(v)) => assert_eq!(v.identity, Identity::SecondArgument),
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn bad_arguments() {
        let g = Graph::path(3);
        let lq = LQModel::new(Source::constant(1.0).unwrap()).unwrap();
        assert!(verify_potential_property(&lq, &g, (0, 2), 1, 1e-10, 0).is_err());
        assert!(verify_potential_property(&lq, &g, (0, 1), 0, 1e-10, 0).is_err());
    }
}

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{BoxConstraint, CostModel, LocalGame};
use crate::graph::Graph;
use crate::reduction::Profile;

/// Per-player best-response gaps of a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashReport {
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    pub argmax: usize,
    pub tol: f64,
    pub pass: bool,
    /// True for vector actions, where best responses come from coordinate
    /// sweeps rather than an exact search.
    pub heuristic: bool,
}

const MAX_DOUBLINGS: u32 = 60;
const WIDTH: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_8;
const COORDINATE_SWEEPS: usize = 3;

pub fn verify_nash<M: CostModel + ?Sized>(
    g: &Graph,
    prof: &Profile,
    model: &M,
    k: &BoxConstraint,
    tol: f64,
) -> Result<NashReport> {
    let game = LocalGame::new(g, model)?;
    verify_nash_with_game(&game, prof, k, tol)
}

/// Compares each player's cost with the best unilateral deviation inside
/// `k`, found by a bracketed golden-section search on the (assumed convex)
/// deviation cost.
pub fn verify_nash_with_game<M: CostModel + ?Sized>(
    game: &LocalGame<'_, M>,
    prof: &Profile,
    k: &BoxConstraint,
    tol: f64,
) -> Result<NashReport> {
    game.check_profile(prof)?;
    let m = game.dim();
    if k.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: k.dim(),
        });
    }
    let gaps: Vec<f64> = (0..game.graph().n())
        .into_par_iter()
        .map(|v| best_response_gap(game, prof, k, v))
        .collect::<Result<_>>()?;
    let (argmax, max_gap) = gaps
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (v, x)| if x > best.1 { (v, x) } else { best });
    Ok(NashReport {
        pass: max_gap <= tol,
        gaps,
        max_gap,
        argmax,
        tol,
        heuristic: m > 1,
    })
}

fn best_response_gap<M: CostModel + ?Sized>(
    game: &LocalGame<'_, M>,
    prof: &Profile,
    k: &BoxConstraint,
    v: usize,
) -> Result<f64> {
    let x = prof.get(v).to_vec();
    let current = game.deviation_cost(prof, v, &x);
    let mut a = x.clone();
    k.project(&mut a);
    let mut best = if k.contains(&x) { current } else { f64::INFINITY };
    let sweeps = if x.len() == 1 { 1 } else { COORDINATE_SWEEPS };
    for _ in 0..sweeps {
        for c in 0..a.len() {
            let (arg, val) = line_min(game, prof, v, &a, c, k.lo()[c], k.hi()[c])?;
            a[c] = arg;
            best = best.min(val);
        }
    }
    Ok(current - best)
}

/// Minimizes the deviation cost of `v` along coordinate `c` over `[lo, hi]`.
fn line_min<M: CostModel + ?Sized>(
    game: &LocalGame<'_, M>,
    prof: &Profile,
    v: usize,
    base: &[f64],
    c: usize,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    let mut point = base.to_vec();
    let mut eval = |t: f64| -> f64 {
        point[c] = t;
        game.deviation_cost(prof, v, &point)
    };
    let slope = |t: f64| -> f64 {
        let mut p = base.to_vec();
        p[c] = t;
        game.deviation_grad(prof, v, &p)[c]
    };
    let x = base[c];
    let (mut a, mut b) = ((x - 1.0).max(lo), (x + 1.0).min(hi));
    let mut width = 1.0;
    let mut doublings = 0;
    while b < hi && slope(b) < 0.0 {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure { vertex: v });
        }
        width *= 2.0;
        b = (x + width).min(hi);
    }
    let mut width = 1.0;
    let mut doublings = 0;
    while a > lo && slope(a) > 0.0 {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure { vertex: v });
        }
        width *= 2.0;
        a = (x - width).max(lo);
    }
    let (fa, fb) = (eval(a), eval(b));
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };
    let mut p = b - INV_PHI * (b - a);
    let mut q = a + INV_PHI * (b - a);
    let (mut fp, mut fq) = (eval(p), eval(q));
    while b - a > WIDTH.max(4.0 * f64::EPSILON * a.abs().max(b.abs())) {
        if fp <= fq {
            b = q;
            q = p;
            fq = fp;
            p = b - INV_PHI * (b - a);
            fp = eval(p);
        } else {
            a = p;
            p = q;
            fp = fq;
            q = a + INV_PHI * (b - a);
            fq = eval(q);
        }
    }
    for cand in [(p, fp), (q, fq)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    if !best.1.is_finite() {
        return Err(Error::NonFiniteValue(format!("deviation cost at vertex {v}")));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{LQModel, Source, WFunction, WModel};

    #[test]
    fn zero_profile_is_not_an_equilibrium() {
        let g = Graph::path(2);
        let m = LQModel::new(Source::PerVertex(vec![1.0, -1.0])).unwrap();
        let r = verify_nash(&g, &Profile::constant(2, &[0.0]), &m, &BoxConstraint::unbounded(1), 1e-6).unwrap();
        // Best response at vertex 0 is a = 1 with cost -1/2.
        assert!((r.max_gap - 0.5).abs() < 1e-12);
        assert!(!r.pass);
        assert!(r.gaps.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn poisson_solution_passes() {
        let g = Graph::path(2);
        let m = LQModel::new(Source::PerVertex(vec![1.0, -1.0])).unwrap();
        let prof = Profile::scalar(vec![0.5, -0.5]).unwrap();
        let r = verify_nash(&g, &prof, &m, &BoxConstraint::unbounded(1), 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn degenerate_box() {
        let g = Graph::cycle(4);
        let m = WModel::power(Source::PerVertex(vec![3.0, -1.0, 2.0, -4.0]), 3.0).unwrap();
        let k = BoxConstraint::interval(1, 0.7, 0.7).unwrap();
        let r = verify_nash(&g, &Profile::constant(4, &[0.7]), &m, &k, 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_gap, 0.0);
    }

    #[test]
    fn far_best_response_needs_doubling() {
        let g = Graph::path(2);
        let m = LQModel::new(Source::PerVertex(vec![1000.0, -1000.0])).unwrap();
        let r = verify_nash(&g, &Profile::constant(2, &[0.0]), &m, &BoxConstraint::unbounded(1), 1e-6).unwrap();
        // a = 1000 gives -1000 a + a^2 / 2 = -500000.
        assert!((r.gaps[0] - 500_000.0).abs() < 1e-6);
    }

    #[test]
    fn unbounded_best_response_fails_to_bracket() {
        // A bounded-slope interaction cannot balance a source of 2.
        let huber = WFunction::plugin(
            "huber_test",
            |s: f64| if s.abs() <= 1.0 { 0.5 * s * s } else { s.abs() - 0.5 },
            |s: f64| s.clamp(-1.0, 1.0),
        )
        .unwrap();
        let g = Graph::path(2);
        let m = WModel::new(Source::PerVertex(vec![2.0, -2.0]), huber).unwrap();
        let r = verify_nash(&g, &Profile::constant(2, &[0.0]), &m, &BoxConstraint::unbounded(1), 1e-6);
        assert!(matches!(r, Err(Error::BracketFailure { vertex: 0 })));
    }
}

use super::poisson::{check_source, pin_degree_mean};
use super::SolveOptions;
use crate::error::{Error, Result};
use crate::game::{WFunction, WModel};
use crate::graph::Graph;
use crate::reduction::Profile;

const MAX_DOUBLINGS: u32 = 60;

/// Largest `|sum over neighbours W'(x_v - x_u) - eta_v| / deg(v)`.
fn residual(g: &Graph, w: &WFunction, x: &[f64], eta: &[f64]) -> f64 {
    (0..g.n())
        .filter(|&v| g.degree(v) > 0)
        .map(|v| {
            let s: f64 = g.neighbors(v).iter().map(|&u| w.dw(x[v] - x[u])).sum();
            ((s - eta[v]) / g.degree(v) as f64).abs()
        })
        .fold(0.0, f64::max)
}

/// Solves `sum over neighbours W'(x_v - x_u) = eta_v` by cyclic coordinate
/// descent: each vertex in turn moves to the root of its (nondecreasing)
/// one-dimensional first-order condition, found by bracketing and bisection.
/// The degree-weighted mean is reset to zero after every sweep.
pub fn solve_nonlinear_poisson(g: &Graph, model: &WModel, tol: f64, opts: &SolveOptions) -> Result<Profile> {
    opts.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidOptions("tolerance must be positive".into()));
    }
    let eta = model.source().values_on(g)?;
    check_source(g, &eta, tol)?;
    let w = model.interaction_fn();
    let n = g.n();
    let mut x = vec![0.0; n];
    if n == 1 {
        return Profile::scalar(x);
    }
    for _ in 0..opts.max_iters {
        if residual(g, w, &x, &eta) <= tol {
            return Profile::scalar(x);
        }
        for v in 0..n {
            x[v] = coordinate_root(g, w, &x, eta[v], v)?;
        }
        pin_degree_mean(g, &mut x);
    }
    let res = residual(g, w, &x, &eta);
    if res <= tol {
        return Profile::scalar(x);
    }
    Err(Error::NoConvergence {
        iters: opts.max_iters,
        residual: res,
    })
}

fn coordinate_root(g: &Graph, w: &WFunction, x: &[f64], eta: f64, v: usize) -> Result<f64> {
    let nb = g.neighbors(v);
    let slope = |a: f64| -> f64 { nb.iter().map(|&u| w.dw(a - x[u])).sum::<f64>() - eta };
    let start = x[v];
    let s0 = slope(start);
    if s0 == 0.0 {
        return Ok(start);
    }
    // Walk away from `start` downhill until the slope changes sign.
    let dir = if s0 > 0.0 { -1.0 } else { 1.0 };
    let mut width = 1.0;
    let mut inner = start;
    let mut outer = start + dir * width;
    let mut doublings = 0;
    while slope(outer) * s0 > 0.0 {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure { vertex: v });
        }
        inner = outer;
        width *= 2.0;
        outer = start + dir * width;
    }
    let (mut lo, mut hi) = if dir > 0.0 { (inner, outer) } else { (outer, inner) };
    // slope(lo) < 0 <= slope(hi)
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if slope(lo).abs() < slope(hi).abs() { lo } else { hi })
}

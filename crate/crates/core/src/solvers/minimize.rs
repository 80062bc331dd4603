use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SolveOptions;
use crate::error::{Error, Result};
use crate::game::{BoxConstraint, CostModel, LocalGame};
use crate::graph::Graph;
use crate::reduction::{fmt_num, lift_class_vector, ClassPartition, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    /// Normalized potential (unnormalized sum divided by `n`).
    pub phi: f64,
    /// Sup-norm of the projected class-mean first-order operator.
    pub grad_norm: f64,
    /// Step that produced this iterate; 0 for the starting point.
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct Minimized {
    pub class_values: Vec<f64>,
    pub profile: Profile,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

pub fn write_trace_csv<W: Write>(trace: &[TraceRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "phi", "grad_norm", "step"])?;
    for r in trace {
        out.write_record([r.iter.to_string(), fmt_num(r.phi), fmt_num(r.grad_norm), fmt_num(r.step)])?;
    }
    out.flush()?;
    Ok(())
}

/// Projected gradient descent on per-class actions.
///
/// Each class moves along minus the class mean of the first-order operator,
/// which is the potential gradient rescaled by class mass. Trial steps use
/// the Barzilai-Borwein rule and are shortened until the Armijo condition
/// holds, so the potential never increases beyond rounding. Stops once the
/// projected direction has sup-norm at most `grad_tol`.
pub fn minimize_potential<M: CostModel + ?Sized>(
    g: &Graph,
    part: &ClassPartition,
    model: &M,
    k: &BoxConstraint,
    opts: &SolveOptions,
) -> Result<Minimized> {
    let game = LocalGame::new(g, model)?;
    minimize_with_game(&game, part, k, opts, None)
}

struct Point {
    y: Vec<f64>,
    phi: f64,
    /// Class means of the first-order operator.
    dir: Vec<f64>,
}

/// As [`minimize_potential`], reusing a prepared game and optionally starting
/// from given class values.
pub fn minimize_with_game<M: CostModel + ?Sized>(
    game: &LocalGame<'_, M>,
    part: &ClassPartition,
    k: &BoxConstraint,
    opts: &SolveOptions,
    init: Option<&[f64]>,
) -> Result<Minimized> {
    opts.validate()?;
    let m = game.dim();
    let n = game.graph().n();
    if part.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: part.n(),
        });
    }
    if k.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: k.dim(),
        });
    }
    let classes = part.class_count();
    let sizes = part.sizes();
    let mass: Vec<f64> = (0..classes * m).map(|i| sizes[i / m] as f64).collect();

    let mut y = match init {
        Some(v) if v.len() != classes * m => {
            return Err(Error::DimensionMismatch {
                expected: classes * m,
                got: v.len(),
            })
        }
        Some(v) => v.to_vec(),
        None => game.model().reference_action().repeat(classes),
    };
    if opts.init_jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for x in &mut y {
            *x += rng.gen_range(-opts.init_jitter..=opts.init_jitter);
        }
    }
    for c in y.chunks_mut(m) {
        k.project(c);
    }

    let evaluate = |y: Vec<f64>| -> Result<Point> {
        let prof = lift_class_vector(part, m, &y)?;
        let phi = game.potential_hat(&prof)? / n as f64;
        let f = game.first_order_all(&prof)?;
        let mut dir = game.class_sums(part, &f, 1.0);
        for (d, w) in dir.iter_mut().zip(&mass) {
            *d /= w;
        }
        Ok(Point { y, phi, dir })
    };
    let projected_norm = |p: &Point| -> f64 {
        p.y.chunks(m)
            .zip(p.dir.chunks(m))
            .map(|(yc, dc)| {
                let mut t: Vec<f64> = yc.iter().zip(dc).map(|(a, b)| a - b).collect();
                k.project(&mut t);
                t.iter().zip(yc).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };
    let step_to = |p: &Point, t: f64| -> Vec<f64> {
        let mut out: Vec<f64> = p.y.iter().zip(&p.dir).map(|(a, d)| a - t * d).collect();
        for c in out.chunks_mut(m) {
            k.project(c);
        }
        out
    };
    // Inner product with the true gradient, which is mass * dir / n.
    let grad_dot = |dir: &[f64], delta: &[f64]| -> f64 {
        dir.iter().zip(delta).zip(&mass).map(|((d, x), w)| d * x * w).sum::<f64>() / n as f64
    };

    let mut cur = evaluate(y)?;
    if !cur.phi.is_finite() || cur.dir.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue("potential at the starting point".into()));
    }
    let mut trace = Vec::new();
    let mut last_step = 0.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut converged = false;
    for iter in 0..=opts.max_iters {
        let pg = projected_norm(&cur);
        trace.push(TraceRow {
            iter,
            phi: cur.phi,
            grad_norm: pg,
            step: last_step,
        });
        if pg <= opts.grad_tol {
            converged = true;
            break;
        }
        if iter == opts.max_iters {
            break;
        }
        let mut t = match &prev {
            Some((s, d)) => {
                let ss: f64 = s.iter().zip(&mass).map(|(a, w)| a * a * w).sum();
                let sd: f64 = s.iter().zip(d).zip(&mass).map(|((a, b), w)| a * b * w).sum();
                let bb = ss / sd;
                if bb.is_finite() && bb > 0.0 {
                    bb.clamp(1e-12, 1e12)
                } else {
                    opts.step_init
                }
            }
            None => opts.step_init,
        };
        let min_step = 1e-20 * t.max(1.0);
        let next = loop {
            let trial = step_to(&cur, t);
            let delta: Vec<f64> = trial.iter().zip(&cur.y).map(|(a, b)| a - b).collect();
            let predicted = grad_dot(&cur.dir, &delta);
            let cand = evaluate(trial)?;
            if cand.phi.is_finite() && cand.dir.iter().all(|x| x.is_finite()) {
                let noise = 1e3 * f64::EPSILON * (1.0 + cur.phi.abs());
                let mut change = cand.phi - cur.phi;
                if change.abs() < noise {
                    // The computed difference is rounding noise; use the
                    // trapezoid rule on the two gradients instead.
                    change = 0.5 * (predicted + grad_dot(&cand.dir, &delta));
                }
                if change <= opts.armijo_c * predicted && predicted < 0.0 {
                    break cand;
                }
            }
            t *= opts.armijo_shrink;
            if t < min_step {
                return Err(Error::NoDescent { iter, step: t });
            }
        };
        let s: Vec<f64> = next.y.iter().zip(&cur.y).map(|(a, b)| a - b).collect();
        let d: Vec<f64> = next.dir.iter().zip(&cur.dir).map(|(a, b)| a - b).collect();
        prev = Some((s, d));
        last_step = t;
        cur = next;
    }
    if !converged {
        log::warn!("minimizer stopped after {} iterations", opts.max_iters);
    }
    let profile = lift_class_vector(part, m, &cur.y)?;
    Ok(Minimized {
        class_values: cur.y,
        profile,
        trace,
        converged,
    })
}

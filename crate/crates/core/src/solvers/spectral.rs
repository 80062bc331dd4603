use super::walk::{RWOperator, RadialChain};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Where to estimate the spectral radius of the simple random walk.
#[derive(Debug, Clone, Copy)]
pub enum SpectralTarget<'a> {
    Graph { graph: &'a Graph, root: usize },
    RegularTree(usize),
}

const MAX_STEPS: usize = 10_000_000;

/// `rho_n = p^(2n)(root, root)^(1 / 2n)` for `n = 1..=n_max`.
pub fn spectral_radius(target: SpectralTarget<'_>, n_max: usize) -> Result<Vec<f64>> {
    if 2 * n_max > MAX_STEPS {
        return Err(Error::SizeLimitExceeded {
            size: 2 * n_max,
            limit: MAX_STEPS,
        });
    }
    let log_returns = match target {
        SpectralTarget::RegularTree(d) => tree_log_returns(RadialChain::new(d)?, n_max),
        SpectralTarget::Graph { graph, root } => graph_log_returns(graph, root, n_max)?,
    };
    Ok(log_returns
        .iter()
        .enumerate()
        .map(|(i, lp)| (lp / (2.0 * (i + 1) as f64)).exp())
        .collect())
}

/// Log return probabilities at even times for the distance chain.
///
/// The state is conjugated by `(D - 1)^(k/2)` and renormalized every step so
/// that nothing underflows; the running log scale is kept separately.
fn tree_log_returns(chain: RadialChain, n_max: usize) -> Vec<f64> {
    let d = chain.degree() as f64;
    let sq = (d - 1.0).sqrt();
    // u_k = q_k / (D-1)^(k/2)
    let out_from_root = 1.0 / sq;
    let up = sq / d;
    let down = sq / d;
    let steps = 2 * n_max;
    let mut u = vec![0.0; n_max + 2];
    u[0] = 1.0;
    let mut next = vec![0.0; n_max + 2];
    let mut log_scale = 0.0;
    let mut out = Vec::with_capacity(n_max);
    for t in 1..=steps {
        // Only distances from which the root is still reachable matter.
        let reach = t.min(steps - t).min(n_max + 1);
        for k in 0..=reach {
            let from_below = if k >= 1 {
                if k == 1 {
                    u[0] * out_from_root
                } else {
                    u[k - 1] * up
                }
            } else {
                0.0
            };
            let from_above = if k + 1 < u.len() { u[k + 1] * down } else { 0.0 };
            next[k] = from_below + from_above;
        }
        for x in next.iter_mut().skip(reach + 1) {
            *x = 0.0;
        }
        std::mem::swap(&mut u, &mut next);
        let m = u[..=reach].iter().copied().fold(0.0, f64::max);
        if m > 0.0 {
            log_scale += m.ln();
            for x in &mut u[..=reach] {
                *x /= m;
            }
        }
        if t % 2 == 0 {
            out.push(u[0].ln() + log_scale);
        }
    }
    out
}

fn graph_log_returns(g: &Graph, root: usize, n_max: usize) -> Result<Vec<f64>> {
    if root >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: root, n: g.n() });
    }
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let walk = RWOperator::new(g)?;
    let mut q = vec![0.0; g.n()];
    q[root] = 1.0;
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        q = walk.push_forward(&walk.push_forward(&q));
        out.push(q[root].ln());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_returns_match_direct_evolution() {
        // Unscaled distance-chain evolution as an oracle.
        let chain = RadialChain::new(3).unwrap();
        let mut q = vec![0.0; 40];
        q[0] = 1.0;
        let mut direct = Vec::new();
        for _ in 0..15 {
            for _ in 0..2 {
                let mut nq = vec![0.0; 40];
                for k in 0..39 {
                    if k == 0 {
                        nq[1] += q[0];
                    } else {
                        nq[k - 1] += q[k] * chain.p_in();
                        nq[k + 1] += q[k] * chain.p_out();
                    }
                }
                q = nq;
            }
            direct.push(q[0]);
        }
        let rho = spectral_radius(SpectralTarget::RegularTree(3), 15).unwrap();
        for (n, (r, p)) in rho.iter().zip(&direct).enumerate() {
            let want = p.powf(1.0 / (2.0 * (n + 1) as f64));
            assert!((r - want).abs() < 1e-12, "n = {}: {r} vs {want}", n + 1);
        }
        assert!((rho[0] - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn finite_graphs() {
        let c = Graph::cycle(10);
        let rho = spectral_radius(SpectralTarget::Graph { graph: &c, root: 0 }, 200).unwrap();
        assert!(rho[199] > 0.99);
        assert!((rho[0] - 0.5f64.sqrt()).abs() < 1e-14);
        let bad = Graph::from_edges(3, [(0, 1)], None).unwrap();
        assert!(spectral_radius(SpectralTarget::Graph { graph: &bad, root: 0 }, 5).is_err());
    }

    #[test]
    fn large_degree_does_not_underflow() {
        let rho = spectral_radius(SpectralTarget::RegularTree(12), 3000).unwrap();
        let limit = 2.0 * 11f64.sqrt() / 12.0;
        assert!(rho.iter().all(|r| r.is_finite() && *r > 0.0 && *r < limit));
    }
}

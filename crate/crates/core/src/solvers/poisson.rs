use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::reduction::Profile;

/// Degree-weighted mean of `x`.
pub fn degree_mean(g: &Graph, x: &[f64]) -> f64 {
    let total: f64 = (0..g.n()).map(|v| g.degree(v) as f64).sum();
    if total == 0.0 {
        return x.iter().sum::<f64>() / x.len().max(1) as f64;
    }
    (0..g.n()).map(|v| g.degree(v) as f64 * x[v]).sum::<f64>() / total
}

/// Shifts `x` so its degree-weighted mean is zero.
pub fn pin_degree_mean(g: &Graph, x: &mut [f64]) {
    let mean = degree_mean(g, x);
    for xi in x.iter_mut() {
        *xi -= mean;
    }
}

/// Checks that a Poisson source fits a connected graph and sums to zero
/// within `tol * n`.
pub fn check_source(g: &Graph, eta: &[f64], tol: f64) -> Result<()> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    if eta.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: eta.len(),
        });
    }
    if let Some(x) = eta.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue(format!("source value {x}")));
    }
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    let sum: f64 = eta.iter().sum();
    if sum.abs() > tol * g.n() as f64 {
        return Err(Error::Unbalanced { sum });
    }
    Ok(())
}

fn laplacian(g: &Graph, x: &[f64], out: &mut [f64]) {
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        out[v] = nb.len() as f64 * x[v] - nb.iter().map(|&u| x[u]).sum::<f64>();
    }
}

/// Largest deviation `|x_v - mean of neighbours - eta_v / deg(v)|`.
pub(crate) fn walk_residual(g: &Graph, x: &[f64], eta: &[f64]) -> f64 {
    let mut lx = vec![0.0; g.n()];
    laplacian(g, x, &mut lx);
    (0..g.n())
        .filter(|&v| g.degree(v) > 0)
        .map(|v| ((lx[v] - eta[v]) / g.degree(v) as f64).abs())
        .fold(0.0, f64::max)
}

fn remove_mean(r: &mut [f64]) {
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    for x in r.iter_mut() {
        *x -= mean;
    }
}

/// Solves `sum over neighbours (x_v - x_u) = eta_v` by conjugate gradients on
/// the graph Laplacian, returning the solution with zero degree-weighted
/// mean. The source must sum to zero within `tol * n`.
pub fn solve_linear_poisson(g: &Graph, eta: &[f64], tol: f64) -> Result<Profile> {
    if !(tol > 0.0) {
        return Err(Error::InvalidOptions("tolerance must be positive".into()));
    }
    check_source(g, eta, tol)?;
    let n = g.n();
    if n == 1 {
        return Profile::scalar(vec![0.0]);
    }
    let mut x = vec![0.0; n];
    let mut r = eta.to_vec();
    remove_mean(&mut r);
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let max_iters = 10 * n + 100;
    for _ in 0..max_iters {
        if walk_residual(g, &x, eta) <= tol {
            pin_degree_mean(g, &mut x);
            return Profile::scalar(x);
        }
        laplacian(g, &p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // Keep the residual orthogonal to the constants.
        remove_mean(&mut r);
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    let residual = walk_residual(g, &x, eta);
    if residual <= tol {
        pin_degree_mean(g, &mut x);
        return Profile::scalar(x);
    }
    Err(Error::NoConvergence {
        iters: max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_instances() {
        let x = solve_linear_poisson(&Graph::path(2), &[1.0, -1.0], 1e-12).unwrap();
        assert!((x.get(0)[0] - 0.5).abs() < 1e-12 && (x.get(1)[0] + 0.5).abs() < 1e-12);

        let x = solve_linear_poisson(&Graph::cycle(4), &[1.0, -1.0, 1.0, -1.0], 1e-12).unwrap();
        for (v, want) in [0.25, -0.25, 0.25, -0.25].iter().enumerate() {
            assert!((x.get(v)[0] - want).abs() < 1e-12);
        }

        let x = solve_linear_poisson(&Graph::cycle(9), &[0.0; 9], 1e-12).unwrap();
        assert!(x.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn degree_weighted_pin() {
        // Star: the centre carries weight 3, each leaf weight 1.
        let g = Graph::star(3);
        let x = solve_linear_poisson(&g, &[3.0, -1.0, -1.0, -1.0], 1e-12).unwrap();
        assert!(degree_mean(&g, x.values()).abs() < 1e-14);
        assert!((x.get(0)[0] - x.get(1)[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gates() {
        assert!(matches!(
            solve_linear_poisson(&Graph::path(3), &[1.0, 0.0, 0.0], 1e-10),
            Err(Error::Unbalanced { .. })
        ));
        let g = Graph::from_edges(4, [(0, 1), (2, 3)], None).unwrap();
        assert!(matches!(solve_linear_poisson(&g, &[0.0; 4], 1e-10), Err(Error::NotConnected)));
        assert!(solve_linear_poisson(&Graph::path(3), &[0.0; 2], 1e-10).is_err());
    }
}

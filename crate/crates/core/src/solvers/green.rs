use serde::Serialize;

use super::walk::RadialChain;
use crate::error::{Error, Result};

/// Partial Green series of a radial source on the `D`-regular tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenSeries {
    /// `sum_{n <= N} (P^n xi)(root)`.
    pub root_value: f64,
    /// The partial sum by distance from the root, for the distances where the
    /// truncated tree gives exact values (`0..=R - N`).
    pub radial: Vec<f64>,
    /// The individual terms `(P^n xi)(root)`, `n = 0..=N`.
    pub terms: Vec<f64>,
    /// Geometric estimate of the omitted terms `n > N`.
    pub tail_estimate: f64,
}

/// Sums `P^n xi` for `n = 0..=terms` on the depth-`radius` tree, where `xi` is
/// given by distance from the root (`xi[k]` at distance `k`, zero beyond).
pub fn green_apply(degree: usize, xi: &[f64], radius: usize, terms: usize) -> Result<GreenSeries> {
    let chain = RadialChain::new(degree)?;
    if degree < 3 {
        // The walk on Z is recurrent: the series diverges for positive sources.
        return Err(Error::DivergentTail { ratio: 1.0 });
    }
    if let Some(x) = xi.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue(format!("source value {x}")));
    }
    let support = xi.iter().rposition(|&x| x != 0.0).unwrap_or(0);
    if radius < terms + support {
        return Err(Error::InsufficientRadius {
            needed: terms + support,
            got: radius,
        });
    }
    let mut f = vec![0.0; radius + 1];
    for (k, &x) in xi.iter().enumerate().take(radius + 1) {
        f[k] = x;
    }
    let mut acc = vec![0.0; radius + 1];
    let mut root_terms = Vec::with_capacity(terms + 1);
    for step in 0..=terms {
        root_terms.push(f[0]);
        for (a, x) in acc.iter_mut().zip(&f) {
            *a += x;
        }
        if step < terms {
            f = chain.apply(&f);
        }
    }
    let root_value = acc[0];
    acc.truncate(radius - terms + 1);
    let tail_estimate = tail(&root_terms)?;
    Ok(GreenSeries {
        root_value,
        radial: acc,
        terms: root_terms,
        tail_estimate,
    })
}

/// Terms alternate in size on a bipartite tree, so ratios are taken between
/// consecutive pairs of terms.
fn tail(t: &[f64]) -> Result<f64> {
    let n = t.len();
    if n < 4 {
        return Ok(0.0);
    }
    let last = t[n - 1] + t[n - 2];
    let prev = t[n - 3] + t[n - 4];
    if last == 0.0 {
        return Ok(0.0);
    }
    if prev == 0.0 {
        return Err(Error::DivergentTail { ratio: f64::INFINITY });
    }
    let q = (last / prev).abs();
    if q >= 1.0 {
        return Err(Error::DivergentTail { ratio: q });
    }
    Ok(last * q / (1.0 - q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_source() {
        let s = green_apply(3, &[0.0], 20, 10).unwrap();
        assert_eq!(s.root_value, 0.0);
        assert_eq!(s.tail_estimate, 0.0);
    }

    #[test]
    fn first_terms_by_hand() {
        // P^2 1_root (root) = 1/D, P^4 = (1/D)(1/D + (D-1)/D^2)
        let s = green_apply(3, &[1.0], 10, 4).unwrap();
        assert_eq!(&s.terms[..4], &[1.0, 0.0, 1.0 / 3.0, 0.0]);
        assert!((s.terms[4] - (1.0 / 9.0 + 2.0 / 27.0)).abs() < 1e-15);
        assert_eq!(s.radial.len(), 7);
    }

    #[test]
    fn linear_in_the_source() {
        let a = green_apply(4, &[1.0, 0.5], 80, 60).unwrap();
        let b = green_apply(4, &[0.0, -2.0, 3.0], 80, 60).unwrap();
        let ab = green_apply(4, &[1.0, -1.5, 3.0], 80, 60).unwrap();
        assert!((a.root_value + b.root_value - ab.root_value).abs() < 1e-12);
    }

    #[test]
    fn guards() {
        assert!(matches!(green_apply(3, &[1.0, 1.0], 60, 60), Err(Error::InsufficientRadius { needed: 61, got: 60 })));
        assert!(matches!(green_apply(2, &[1.0], 100, 10), Err(Error::DivergentTail { .. })));
        assert!(green_apply(1, &[1.0], 100, 10).is_err());
    }
}

use serde::Serialize;

use super::ball::Ball;
use super::canon::rooted_isomorphic;
use crate::error::{Error, Result};

/// Result of comparing two balls radius by radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalDistance {
    /// Largest checked radius at which the balls are isomorphic.
    pub agree_radius: usize,
    /// `2^-agree_radius`.
    pub value: f64,
    /// False when the balls agree at every checked radius; the true distance
    /// is then only bounded above by `value`.
    pub exact: bool,
}

/// `d_*` between the rooted graphs the balls were cut from, resolved up to
/// the balls' common radius.
pub fn local_distance(b1: &Ball, b2: &Ball) -> Result<LocalDistance> {
    if b1.radius() != b2.radius() {
        return Err(Error::RadiusMismatch(b1.radius(), b2.radius()));
    }
    let r_max = b1.radius();
    // B_0 is always a single vertex.
    let mut agree = 0;
    for r in 1..=r_max {
        let same = if r == r_max {
            rooted_isomorphic(b1, b2)?
        } else {
            rooted_isomorphic(&b1.sub_ball(r), &b2.sub_ball(r))?
        };
        if !same {
            break;
        }
        agree = r;
    }
    Ok(LocalDistance {
        agree_radius: agree,
        value: 0.5f64.powi(agree as i32),
        exact: agree < r_max,
    })
}

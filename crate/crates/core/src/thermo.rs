//! Graph families and the convergence of their potentials to the limit graph.

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{uniform_root_ensemble, LimitKind, RootedEnsemble};
use crate::error::{Error, Result};
use crate::game::{potential_detailed, CostModel, LocalGame};
use crate::graph::{Graph, DEFAULT_MAX_VERTICES};
use crate::reduction::{fmt_num, materialize_profile, partition_classes, ActionRule, ClassRadius};

pub const PAIRING_ATTEMPTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    Cycles,
    Boxes { d: usize },
    RandomRegular { degree: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<usize>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    sizes: Vec<usize>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidFamily("no sizes given".into()));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFamily("sizes must be strictly increasing".into()));
        }
        match kind {
            FamilyKind::Cycles if sizes[0] < 3 => return Err(Error::InvalidFamily("cycles need n >= 3".into())),
            FamilyKind::Boxes { d: 0 } => return Err(Error::InvalidFamily("box dimension must be >= 1".into())),
            FamilyKind::Boxes { .. } if sizes[0] < 1 => return Err(Error::InvalidFamily("boxes need n >= 1".into())),
            FamilyKind::RandomRegular { degree, .. } => {
                if degree < 2 {
                    return Err(Error::InvalidFamily("random regular graphs need D >= 2".into()));
                }
                if let Some(&n) = sizes.iter().find(|&&n| n * degree % 2 == 1) {
                    return Err(Error::InvalidParity { n, degree });
                }
                if sizes[0] <= degree {
                    return Err(Error::InvalidFamily(format!("n must exceed D = {degree}")));
                }
            }
            _ => {}
        }
        Ok(FamilySpec { kind, sizes })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyDoc = serde_json::from_str(text)?;
        let kind = match doc.kind.as_str() {
            "cycles" => FamilyKind::Cycles,
            "boxes" => FamilyKind::Boxes {
                d: doc.d.ok_or_else(|| Error::InvalidFamily("boxes need d".into()))?,
            },
            "random_regular" => FamilyKind::RandomRegular {
                degree: doc.degree.ok_or_else(|| Error::InvalidFamily("random_regular needs D".into()))?,
                seed: doc.seed.unwrap_or(0),
            },
            other => return Err(Error::InvalidFamily(format!("unknown family '{other}'"))),
        };
        FamilySpec::new(kind, doc.sizes)
    }

    pub fn to_json(&self) -> Result<String> {
        let (kind, d, degree, seed) = match self.kind {
            FamilyKind::Cycles => ("cycles", None, None, None),
            FamilyKind::Boxes { d } => ("boxes", Some(d), None, None),
            FamilyKind::RandomRegular { degree, seed } => ("random_regular", None, Some(degree), Some(seed)),
        };
        Ok(serde_json::to_string(&FamilyDoc {
            kind: kind.into(),
            d,
            degree,
            seed,
            sizes: self.sizes.clone(),
        })?)
    }
}

pub fn limit_of(kind: FamilyKind) -> LimitKind {
    match kind {
        FamilyKind::Cycles => LimitKind::TwoWayPath,
        FamilyKind::Boxes { d } => LimitKind::IntegerLattice(d),
        FamilyKind::RandomRegular { degree, .. } => LimitKind::RegularTree(degree),
    }
}

/// The member of size `n`: `C_n`, the box `[n]^d`, or a random `D`-regular
/// graph on `n` vertices.
pub fn make_graph(kind: FamilyKind, n: usize) -> Result<Graph> {
    match kind {
        FamilyKind::Cycles => {
            if n < 3 {
                return Err(Error::InvalidFamily("cycles need n >= 3".into()));
            }
            Ok(Graph::cycle(n))
        }
        FamilyKind::Boxes { d } => {
            if d == 0 || n == 0 {
                return Err(Error::InvalidFamily("boxes need n, d >= 1".into()));
            }
            let size = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
            if size > DEFAULT_MAX_VERTICES as u128 {
                return Err(Error::SizeLimitExceeded {
                    size: usize::try_from(size).unwrap_or(usize::MAX),
                    limit: DEFAULT_MAX_VERTICES,
                });
            }
            Ok(Graph::lattice_box(n, d))
        }
        FamilyKind::RandomRegular { degree, seed } => random_regular(n, degree, seed),
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Configuration model conditioned on simplicity by rejection.
pub fn random_regular(n: usize, degree: usize, seed: u64) -> Result<Graph> {
    if n * degree % 2 == 1 {
        return Err(Error::InvalidParity { n, degree });
    }
    if degree >= n {
        return Err(Error::InvalidFamily(format!("no simple {degree}-regular graph on {n} vertices")));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    for attempt in 0..PAIRING_ATTEMPTS {
        let sub_seed = mix(mix(seed ^ mix(n as u64)) ^ attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
        stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(stubs.len() / 2);
        let simple = stubs.chunks(2).all(|p| p[0] != p[1] && seen.insert((p[0].min(p[1]), p[0].max(p[1]))));
        if simple {
            let edges = stubs.chunks(2).map(|p| (p[0], p[1]));
            return Graph::from_edges(n, edges, Some(degree));
        }
        // Restore a canonical order so each attempt depends only on its seed.
        stubs.sort_unstable();
    }
    Err(Error::PairingFailed {
        attempts: PAIRING_ATTEMPTS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermoRow {
    pub n: usize,
    pub phi_n: f64,
    pub phi_limit: f64,
    pub abs_err: f64,
    /// Number of rooted-isomorphism classes at the rule radius.
    pub class_count: usize,
    pub wall_ms: u64,
    /// Vertices whose rule lookup fell back to the default.
    pub unseen: usize,
}

/// Runs every size of the family. Wall times are recorded only with
/// `timing`, so that untimed output is reproducible byte for byte.
pub fn thermo_run<M: CostModel + ?Sized>(
    spec: &FamilySpec,
    rule: &ActionRule,
    model: &M,
    timing: bool,
) -> Result<Vec<ThermoRow>> {
    let limit = RootedEnsemble::transitive(limit_of(spec.kind))?;
    let (phi_limit, limit_unseen) = potential_detailed(&limit, rule, model)?;
    if limit_unseen > 0 {
        log::warn!("rule has no entry for the limit graph; the default is used there");
    }
    spec.sizes
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let g = make_graph(spec.kind, n)?;
            let (e, _) = uniform_root_ensemble(&g)?;
            let (phi_n, _) = potential_detailed(&e, rule, model)?;
            let (_, unseen) = materialize_profile(&g, rule)?;
            let class_count = partition_classes(&g, ClassRadius::Fixed(rule.radius()))?.class_count();
            let wall_ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
            Ok(ThermoRow {
                n,
                phi_n,
                phi_limit,
                abs_err: (phi_n - phi_limit).abs(),
                class_count,
                wall_ms,
                unseen,
            })
        })
        .collect()
}

pub fn write_thermo_csv<W: Write>(rows: &[ThermoRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "phi_n", "phi_limit", "abs_err", "class_count", "wall_ms"])?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            fmt_num(r.phi_n),
            fmt_num(r.phi_limit),
            fmt_num(r.abs_err),
            r.class_count.to_string(),
            r.wall_ms.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Bound on `|phi_n - phi_limit|` for a box: the fraction of vertices within
/// `r + 1` of the boundary times the spread of the per-vertex potential terms
/// and the limit value, where `r` is the larger of the rule and model radii.
/// Vertices further inside contribute exactly the limit value.
pub fn box_error_bound<M: CostModel + ?Sized>(n: usize, d: usize, rule: &ActionRule, model: &M) -> Result<f64> {
    let g = make_graph(FamilyKind::Boxes { d }, n)?;
    let (prof, _) = materialize_profile(&g, rule)?;
    let game = LocalGame::new(&g, model)?;
    let limit = RootedEnsemble::transitive(LimitKind::IntegerLattice(d))?;
    let mut terms: Vec<f64> = (0..g.n()).map(|v| game.potential_term(&prof, v)).collect();
    terms.push(potential_detailed(&limit, rule, model)?.0);
    let spread = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max) - terms.iter().copied().fold(f64::INFINITY, f64::min);
    let r = rule.radius().max(model.radius());
    let inner = n.saturating_sub(2 * r + 2) as f64 / n as f64;
    Ok((1.0 - inner.powi(d as i32)) * spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{LQModel, Source};

    #[test]
    fn family_members() {
        let c = make_graph(FamilyKind::Cycles, 30).unwrap();
        assert_eq!(c.edge_count(), 30);
        assert!((0..30).all(|v| c.degree(v) == 2));
        let b = make_graph(FamilyKind::Boxes { d: 2 }, 5).unwrap();
        assert_eq!((b.n(), b.edge_count()), (25, 40));
        let r = make_graph(FamilyKind::RandomRegular { degree: 4, seed: 1 }, 8).unwrap();
        assert!((0..8).all(|v| r.degree(v) == 4));
        assert_eq!(r.edge_count(), 16);
    }

    #[test]
    fn random_regular_is_seeded() {
        let a = random_regular(64, 3, 9).unwrap();
        let b = random_regular(64, 3, 9).unwrap();
        let c = random_regular(64, 3, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(matches!(random_regular(7, 3, 0), Err(Error::InvalidParity { n: 7, degree: 3 })));
        assert!(random_regular(4, 4, 0).is_err());
    }

    #[test]
    fn limits() {
        assert_eq!(limit_of(FamilyKind::Cycles), LimitKind::TwoWayPath);
        assert_eq!(limit_of(FamilyKind::Boxes { d: 2 }), LimitKind::IntegerLattice(2));
        assert_eq!(limit_of(FamilyKind::RandomRegular { degree: 4, seed: 3 }), LimitKind::RegularTree(4));
    }

    #[test]
    fn family_json() {
        let s = FamilySpec::from_json(r#"{"kind":"random_regular","D":4,"seed":7,"sizes":[8,32]}"#).unwrap();
        assert_eq!(s.kind, FamilyKind::RandomRegular { degree: 4, seed: 7 });
        assert_eq!(FamilySpec::from_json(&s.to_json().unwrap()).unwrap(), s);
        assert!(FamilySpec::from_json(r#"{"kind":"boxes","sizes":[3]}"#).is_err());
        assert!(FamilySpec::from_json(r#"{"kind":"cycles","sizes":[5,4]}"#).is_err());
        assert!(FamilySpec::from_json(r#"{"kind":"random_regular","D":3,"sizes":[9]}"#).is_err());
    }

    #[test]
    fn cycles_match_the_line() {
        let path = Graph::path(9);
        let rule = ActionRule::tabulate(1, 1, vec![0.0], [&path], |b| vec![b.n() as f64 * 0.5]).unwrap();
        let model = LQModel::new(Source::constant(0.7).unwrap()).unwrap();
        let spec = FamilySpec::new(FamilyKind::Cycles, vec![3, 4, 6, 9]).unwrap();
        let rows = thermo_run(&spec, &rule, &model, false).unwrap();
        assert_eq!(rows[0].unseen, 3);
        for r in &rows[2..] {
            assert!(r.abs_err <= 1e-12, "{r:?}");
            assert_eq!(r.class_count, 1);
        }
        let mut buf = Vec::new();
        write_thermo_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,phi_n,phi_limit,abs_err,class_count,wall_ms\n3,"));
        assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
    }
}

//! Representative-player reduction: rooted-isomorphism classes, action rules
//! keyed by ball codes, and per-vertex profiles.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ball, Ball, Code, Graph};

/// Radius at which vertices are classed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassRadius {
    Fixed(usize),
    /// The graph's diameter: classes are full rooted-isomorphism classes.
    Exact,
}

#[derive(Debug, Clone)]
pub struct ClassPartition {
    class_of: Vec<usize>,
    representatives: Vec<usize>,
    codes: Vec<Code>,
    radius_used: usize,
    exact: bool,
}

/// Groups vertices by the canonical code of their radius-`r` ball. Class ids
/// are assigned in order of first appearance.
pub fn partition_classes(g: &Graph, radius: ClassRadius) -> Result<ClassPartition> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let diameter = match radius {
        ClassRadius::Exact => Some(g.diameter()?),
        ClassRadius::Fixed(_) => g.diameter().ok(),
    };
    let r = match radius {
        ClassRadius::Exact => diameter.unwrap_or(0),
        ClassRadius::Fixed(r) => r,
    };
    let codes = vertex_codes(g, r)?;
    let mut index: HashMap<&Code, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(g.n());
    let mut representatives = Vec::new();
    for (v, c) in codes.iter().enumerate() {
        let next = index.len();
        let id = *index.entry(c).or_insert(next);
        if id == next {
            representatives.push(v);
        }
        class_of.push(id);
    }
    let class_codes = representatives.iter().map(|&v| codes[v].clone()).collect();
    Ok(ClassPartition {
        class_of,
        representatives,
        codes: class_codes,
        radius_used: r,
        exact: diameter.is_some_and(|d| r >= d),
    })
}

fn vertex_codes(g: &Graph, r: usize) -> Result<Vec<Code>> {
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let b = ball(g, v, r);
            b.code().cloned()
        })
        .collect()
}

impl ClassPartition {
    /// Every vertex in its own class.
    pub fn discrete(n: usize) -> ClassPartition {
        ClassPartition {
            class_of: (0..n).collect(),
            representatives: (0..n).collect(),
            codes: Vec::new(),
            radius_used: 0,
            exact: false,
        }
    }

    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class_of
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    /// Per-class codes; empty for [`ClassPartition::discrete`].
    pub fn codes(&self) -> &[Code] {
        &self.codes
    }

    pub fn radius_used(&self) -> usize {
        self.radius_used
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count()];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }

    /// Vertices grouped by class.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// True if every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &ClassPartition) -> bool {
        if self.n() != coarser.n() {
            return false;
        }
        let mut image = vec![usize::MAX; self.class_count()];
        for v in 0..self.n() {
            let c = self.class_of[v];
            let target = coarser.class_of[v];
            if image[c] == usize::MAX {
                image[c] = target;
            } else if image[c] != target {
                return false;
            }
        }
        true
    }

    /// Same blocks, regardless of class numbering.
    pub fn same_blocks(&self, other: &ClassPartition) -> bool {
        self.class_count() == other.class_count() && self.refines(other)
    }
}

/// Sorted distances of a box vertex to the faces of `[n]^d`, with one-based
/// coordinates.
pub fn boxes_class_signature(v: &[usize], n: usize, d: usize) -> Result<Vec<usize>> {
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: v.len(),
        });
    }
    if let Some(&x) = v.iter().find(|&&x| x == 0 || x > n) {
        return Err(Error::OutOfRange(format!("coordinate {x} not in 1..={n}")));
    }
    let mut sig: Vec<usize> = v.iter().map(|&x| (x - 1).min(n - x)).collect();
    sig.sort_unstable();
    Ok(sig)
}

/// A rule assigning an action in `R^dim` to every rooted ball of a fixed
/// radius, with a fallback for codes missing from the table.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionRule {
    radius: usize,
    dim: usize,
    table: BTreeMap<Code, Vec<f64>>,
    default: Vec<f64>,
}

fn check_vector(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue(format!("rule value {x}")));
    }
    Ok(())
}

impl ActionRule {
    pub fn new(radius: usize, dim: usize, default: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange("action dimension must be >= 1".into()));
        }
        check_vector(&default, dim)?;
        Ok(ActionRule {
            radius,
            dim,
            table: BTreeMap::new(),
            default,
        })
    }

    /// Radius-0 rule with every vertex playing `value`.
    pub fn constant(value: Vec<f64>) -> Result<Self> {
        let dim = value.len();
        let mut rule = ActionRule::new(0, dim, value.clone())?;
        let single = ball(&Graph::path(1), 0, 0);
        rule.insert(single.code()?.clone(), value)?;
        Ok(rule)
    }

    /// Tabulates `f` over every radius-`radius` ball appearing in `graphs`.
    pub fn tabulate<'a, F>(
        radius: usize,
        dim: usize,
        default: Vec<f64>,
        graphs: impl IntoIterator<Item = &'a Graph>,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&Ball) -> Vec<f64>,
    {
        let mut rule = ActionRule::new(radius, dim, default)?;
        for g in graphs {
            for v in 0..g.n() {
                let b = ball(g, v, radius);
                let code = b.code()?;
                if !rule.table.contains_key(code) {
                    let value = f(&b);
                    rule.insert(code.clone(), value)?;
                }
            }
        }
        Ok(rule)
    }

    pub fn insert(&mut self, code: Code, value: Vec<f64>) -> Result<()> {
        check_vector(&value, self.dim)?;
        self.table.insert(code, value);
        Ok(())
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn default_value(&self) -> &[f64] {
        &self.default
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Code, &[f64])> {
        self.table.iter().map(|(c, v)| (c, v.as_slice()))
    }

    pub fn get(&self, code: &Code) -> Option<&[f64]> {
        self.table.get(code).map(Vec::as_slice)
    }

    /// Value for a ball of radius at least the rule's radius, and whether its
    /// code was found in the table.
    pub fn lookup(&self, b: &Ball) -> Result<(&[f64], bool)> {
        if b.radius() < self.radius {
            return Err(Error::InsufficientRadius {
                needed: self.radius,
                got: b.radius(),
            });
        }
        let found = if b.radius() == self.radius {
            self.get(b.code()?)
        } else {
            self.get(b.sub_ball(self.radius).code()?)
        };
        Ok(match found {
            Some(v) => (v, true),
            None => (&self.default, false),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RuleDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&RuleDoc::from(self))?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RuleDoc {
    radius: usize,
    dim: usize,
    default: Vec<f64>,
    #[serde(default)]
    entries: Vec<RuleEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RuleEntry {
    code: Code,
    value: Vec<f64>,
}

impl TryFrom<RuleDoc> for ActionRule {
    type Error = Error;

    fn try_from(doc: RuleDoc) -> Result<Self> {
        let mut rule = ActionRule::new(doc.radius, doc.dim, doc.default)?;
        for e in doc.entries {
            rule.insert(e.code, e.value)?;
        }
        Ok(rule)
    }
}

impl From<&ActionRule> for RuleDoc {
    fn from(rule: &ActionRule) -> Self {
        RuleDoc {
            radius: rule.radius,
            dim: rule.dim,
            default: rule.default.clone(),
            entries: rule
                .table
                .iter()
                .map(|(c, v)| RuleEntry {
                    code: c.clone(),
                    value: v.clone(),
                })
                .collect(),
        }
    }
}

impl Serialize for ActionRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RuleDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ActionRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = RuleDoc::deserialize(d)?;
        ActionRule::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Per-vertex actions in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    n: usize,
    dim: usize,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(n: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * dim {
            return Err(Error::DimensionMismatch {
                expected: n * dim,
                got: values.len(),
            });
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue(format!("profile entry {x}")));
        }
        Ok(Profile { n, dim, values })
    }

    /// Scalar profile.
    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Profile::new(values.len(), 1, values)
    }

    pub fn constant(n: usize, value: &[f64]) -> Self {
        Profile {
            n,
            dim: value.len(),
            values: value.repeat(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, v: usize) -> &[f64] {
        &self.values[v * self.dim..(v + 1) * self.dim]
    }

    pub fn get_mut(&mut self, v: usize) -> &mut [f64] {
        &mut self.values[v * self.dim..(v + 1) * self.dim]
    }

    pub fn set(&mut self, v: usize, value: &[f64]) {
        self.get_mut(v).copy_from_slice(value);
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["vertex".to_string()];
        header.extend((0..self.dim).map(|k| format!("value_{k}")));
        out.write_record(&header)?;
        for v in 0..self.n {
            let mut row = vec![v.to_string()];
            row.extend(self.get(v).iter().map(|x| fmt_num(*x)));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`Profile::write_csv`]; rows may come in any order.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let dim = rdr.headers()?.len().saturating_sub(1);
        if dim == 0 {
            return Err(Error::parse(1, "profile CSV needs at least one value column"));
        }
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::parse(line, e.to_string()));
            let v = rec[0].trim().parse::<usize>().map_err(|e| Error::parse(line, e.to_string()))?;
            let vals = rec.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?;
            rows.push((v, vals));
        }
        rows.sort_by_key(|r| r.0);
        for (i, (v, _)) in rows.iter().enumerate() {
            if *v != i {
                return Err(Error::parse(i + 2, format!("expected vertex {i}, found {v}")));
            }
        }
        let n = rows.len();
        Profile::new(n, dim, rows.into_iter().flat_map(|r| r.1).collect())
    }
}

/// Twelve significant digits, shortest form.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.11e}");
    let v: f64 = s.parse().unwrap_or(x);
    format!("{v}")
}

/// Applies a rule at every vertex. Also returns how many vertices fell back
/// to the rule's default.
pub fn materialize_profile(g: &Graph, rule: &ActionRule) -> Result<(Profile, usize)> {
    let looked: Vec<(Vec<f64>, bool)> = (0..g.n())
        .into_par_iter()
        .map(|v| {
            let b = ball(g, v, rule.radius);
            rule.lookup(&b).map(|(x, seen)| (x.to_vec(), seen))
        })
        .collect::<Result<_>>()?;
    let unseen = looked.iter().filter(|(_, seen)| !seen).count();
    if unseen > 0 {
        log::debug!("{unseen} vertices used the rule default");
    }
    let values = looked.into_iter().flat_map(|(x, _)| x).collect();
    Ok((Profile::new(g.n(), rule.dim, values)?, unseen))
}

/// Expands per-class values (row-major, `dim` per class) to a profile.
pub fn lift_class_vector(p: &ClassPartition, dim: usize, values: &[f64]) -> Result<Profile> {
    if dim == 0 || values.len() != p.class_count() * dim {
        return Err(Error::DimensionMismatch {
            expected: p.class_count() * dim,
            got: values.len(),
        });
    }
    let mut out = Vec::with_capacity(p.n() * dim);
    for &c in p.classes() {
        out.extend_from_slice(&values[c * dim..(c + 1) * dim]);
    }
    Profile::new(p.n(), dim, out)
}

/// Reads the value at each class representative; fails if the profile is not
/// constant on classes.
pub fn class_values(p: &ClassPartition, prof: &Profile) -> Result<Vec<f64>> {
    if prof.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: prof.n(),
        });
    }
    for v in 0..p.n() {
        let rep = p.representatives()[p.class_of(v)];
        if prof.get(v) != prof.get(rep) {
            return Err(Error::ProfileNotClassConstant { class: p.class_of(v) });
        }
    }
    Ok(p.representatives().iter().flat_map(|&r| prof.get(r).to_vec()).collect())
}

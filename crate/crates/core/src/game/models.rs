use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use super::{CostModel, EdgeView, Lipschitz};
use crate::error::{Error, Result};
use crate::graph::{ball, Ball, Graph};
use crate::reduction::ActionRule;

/// Where the linear source term of a player's own cost comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// A scalar action rule evaluated on the player's ball.
    Rule(ActionRule),
    /// One value per vertex of a specific finite graph, indexed by host id.
    PerVertex(Vec<f64>),
}

impl Source {
    pub fn constant(c: f64) -> Result<Self> {
        Ok(Source::Rule(ActionRule::constant(vec![c])?))
    }

    fn validate(&self) -> Result<()> {
        match self {
            Source::Rule(r) if r.dim() != 1 => Err(Error::InvalidModel("source rule must be scalar".into())),
            Source::PerVertex(v) if v.iter().any(|x| !x.is_finite()) => {
                Err(Error::NonFiniteValue("source value".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn radius(&self) -> usize {
        match self {
            Source::Rule(r) => r.radius(),
            Source::PerVertex(_) => 0,
        }
    }

    fn prepare(&self, b: &Ball) -> Result<()> {
        match self {
            Source::Rule(r) => r.lookup(b).map(|_| ()),
            Source::PerVertex(v) if b.host_root() >= v.len() => Err(Error::VertexOutOfRange {
                vertex: b.host_root(),
                n: v.len(),
            }),
            Source::PerVertex(_) => Ok(()),
        }
    }

    /// Source value at the root of a prepared ball.
    pub fn value(&self, b: &Ball) -> f64 {
        match self {
            Source::Rule(r) => r.lookup(b).expect("ball was prepared").0[0],
            Source::PerVertex(v) => v[b.host_root()],
        }
    }

    /// Source value at every vertex of `g`.
    pub fn values_on(&self, g: &Graph) -> Result<Vec<f64>> {
        match self {
            Source::PerVertex(v) if v.len() != g.n() => Err(Error::DimensionMismatch {
                expected: g.n(),
                got: v.len(),
            }),
            Source::PerVertex(v) => Ok(v.clone()),
            Source::Rule(r) => (0..g.n())
                .map(|v| r.lookup(&ball(g, v, r.radius())).map(|(x, _)| x[0]))
                .collect(),
        }
    }
}

/// Linear-quadratic game: own cost `-s a`, interaction and pair potential
/// `(a - b)^2 / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LQModel {
    source: Source,
    reference: f64,
}

impl LQModel {
    pub fn new(source: Source) -> Result<Self> {
        source.validate()?;
        Ok(LQModel { source, reference: 0.0 })
    }

    pub fn with_reference(mut self, a: f64) -> Self {
        self.reference = a;
        self
    }

    pub fn source(&self) -> &Source {
        &self.source
    }
}

impl CostModel for LQModel {
    fn dim(&self) -> usize {
        1
    }

    fn radius(&self) -> usize {
        self.source.radius()
    }

    fn prepare(&self, b: &Ball) -> Result<()> {
        self.source.prepare(b)
    }

    fn is_local(&self) -> bool {
        matches!(self.source, Source::Rule(_))
    }

    fn own_cost(&self, b: &Ball, a: &[f64]) -> f64 {
        -self.source.value(b) * a[0]
    }

    fn own_cost_grad(&self, b: &Ball, _a: &[f64]) -> Vec<f64> {
        vec![-self.source.value(b)]
    }

    fn interaction(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
        0.5 * (a[0] - b[0]).powi(2)
    }

    fn interaction_grad(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        vec![a[0] - b[0]]
    }

    fn pair_potential(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
        self.interaction(e, a, b)
    }

    fn pair_potential_grad1(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        vec![a[0] - b[0]]
    }

    fn pair_potential_grad2(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        vec![b[0] - a[0]]
    }

    fn reference_action(&self) -> Vec<f64> {
        vec![self.reference]
    }

    fn lipschitz(&self) -> Option<Lipschitz> {
        Some(Lipschitz {
            own: 0.0,
            interaction: 1.0,
        })
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An even convex interaction function and its derivative.
#[derive(Clone)]
pub enum WFunction {
    /// `|s|^p / p`, p > 1.
    Power(f64),
    Plugin { name: String, w: ScalarFn, dw: ScalarFn },
}

impl fmt::Debug for WFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WFunction::Power(p) => write!(f, "Power({p})"),
            WFunction::Plugin { name, .. } => write!(f, "Plugin({name})"),
        }
    }
}

impl PartialEq for WFunction {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (WFunction::Power(p), WFunction::Power(q)) => p == q,
            (WFunction::Plugin { name: a, .. }, WFunction::Plugin { name: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl WFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidModel(format!("power exponent {p} must be finite and > 1")));
        }
        Ok(WFunction::Power(p))
    }

    /// A user-supplied pair, checked for evenness and a nondecreasing
    /// derivative on a grid over [-8, 8].
    pub fn plugin(
        name: impl Into<String>,
        w: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dw: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f = WFunction::Plugin {
            name: name.into(),
            w: Arc::new(w),
            dw: Arc::new(dw),
        };
        f.check_shape()?;
        Ok(f)
    }

    fn check_shape(&self) -> Result<()> {
        let grid: Vec<f64> = (0..=400).map(|i| -8.0 + 0.04 * i as f64).collect();
        let mut prev = f64::NEG_INFINITY;
        for &s in &grid {
            let (ws, wm) = (self.w(s), self.w(-s));
            if !ws.is_finite() || (ws - wm).abs() > 1e-12 * (1.0 + ws.abs()) {
                return Err(Error::InvalidModel(format!("W is not even at s = {s}")));
            }
            let d = self.dw(s);
            if !d.is_finite() || d < prev - 1e-12 * (1.0 + d.abs()) {
                return Err(Error::InvalidModel(format!("W' is not nondecreasing at s = {s}")));
            }
            prev = d;
        }
        Ok(())
    }

    pub fn w(&self, s: f64) -> f64 {
        match self {
            WFunction::Power(p) => s.abs().powf(*p) / p,
            WFunction::Plugin { w, .. } => w(s),
        }
    }

    pub fn dw(&self, s: f64) -> f64 {
        match self {
            WFunction::Power(p) if *p == 2.0 => s,
            WFunction::Power(p) if *p == 4.0 => s * s * s,
            WFunction::Power(p) => s.signum() * s.abs().powf(p - 1.0),
            WFunction::Plugin { dw, .. } => dw(s),
        }
    }

    pub fn name(&self) -> String {
        match self {
            WFunction::Power(p) => format!("power({p})"),
            WFunction::Plugin { name, .. } => name.clone(),
        }
    }
}

fn registry() -> &'static RwLock<HashMap<String, WFunction>> {
    static REGISTRY: OnceLock<RwLock<HashMap<String, WFunction>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut m = HashMap::new();
        let builtin = [
            WFunction::plugin("logcosh", |s: f64| s.cosh().ln(), f64::tanh),
            WFunction::plugin("cosh", |s: f64| s.cosh() - 1.0, f64::sinh),
            WFunction::plugin(
                "huber",
                |s: f64| if s.abs() <= 1.0 { 0.5 * s * s } else { s.abs() - 0.5 },
                |s: f64| s.clamp(-1.0, 1.0),
            ),
        ];
        for f in builtin {
            let f = f.expect("built-in interaction is valid");
            m.insert(f.name(), f);
        }
        RwLock::new(m)
    })
}

/// Makes a plug-in interaction available to model configs by name.
pub fn register_interaction(f: WFunction) -> Result<()> {
    if let WFunction::Power(_) = f {
        return Err(Error::InvalidModel("only plug-in interactions can be registered".into()));
    }
    registry().write().expect("registry lock").insert(f.name(), f);
    Ok(())
}

pub(crate) fn lookup_interaction(name: &str) -> Result<WFunction> {
    registry()
        .read()
        .expect("registry lock")
        .get(name)
        .cloned()
        .ok_or_else(|| Error::InvalidModel(format!("unknown interaction '{name}'")))
}

/// Game with own cost `-s a` and interaction `W(a - b)` for an even convex `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct WModel {
    source: Source,
    w: WFunction,
    reference: f64,
}

impl WModel {
    pub fn new(source: Source, w: WFunction) -> Result<Self> {
        source.validate()?;
        Ok(WModel {
            source,
            w,
            reference: 0.0,
        })
    }

    pub fn power(source: Source, p: f64) -> Result<Self> {
        WModel::new(source, WFunction::power(p)?)
    }

    pub fn with_reference(mut self, a: f64) -> Self {
        self.reference = a;
        self
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn interaction_fn(&self) -> &WFunction {
        &self.w
    }
}

impl CostModel for WModel {
    fn dim(&self) -> usize {
        1
    }

    fn radius(&self) -> usize {
        self.source.radius()
    }

    fn prepare(&self, b: &Ball) -> Result<()> {
        self.source.prepare(b)
    }

    fn is_local(&self) -> bool {
        matches!(self.source, Source::Rule(_))
    }

    fn own_cost(&self, b: &Ball, a: &[f64]) -> f64 {
        -self.source.value(b) * a[0]
    }

    fn own_cost_grad(&self, b: &Ball, _a: &[f64]) -> Vec<f64> {
        vec![-self.source.value(b)]
    }

    fn interaction(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
        self.w.w(a[0] - b[0])
    }

    fn interaction_grad(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        vec![self.w.dw(a[0] - b[0])]
    }

    fn pair_potential(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
        self.interaction(e, a, b)
    }

    fn pair_potential_grad1(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        vec![self.w.dw(a[0] - b[0])]
    }

    fn pair_potential_grad2(&self, _e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        vec![-self.w.dw(a[0] - b[0])]
    }

    fn reference_action(&self) -> Vec<f64> {
        vec![self.reference]
    }

    fn lipschitz(&self) -> Option<Lipschitz> {
        match self.w {
            WFunction::Power(p) if p == 2.0 => Some(Lipschitz {
                own: 0.0,
                interaction: 1.0,
            }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_family() {
        let w = WFunction::power(4.0).unwrap();
        assert_eq!(w.w(2.0), 4.0);
        assert_eq!(w.dw(2.0), 8.0);
        assert_eq!(w.dw(-2.0), -8.0);
        let w = WFunction::power(1.5).unwrap();
        assert!((w.dw(-4.0) + 2.0).abs() < 1e-15);
        assert!(WFunction::power(1.0).is_err());
        assert!(WFunction::power(f64::NAN).is_err());
    }

    #[test]
    fn plugin_shape_checks() {
        assert!(WFunction::plugin("odd", |s: f64| s, |_| 1.0).is_err());
        assert!(WFunction::plugin("concave", |s: f64| -s * s, |s: f64| -2.0 * s).is_err());
        assert!(lookup_interaction("logcosh").is_ok());
        assert!(lookup_interaction("nope").is_err());
        let quartic = WFunction::plugin("quartic_test", |s: f64| s.powi(4), |s: f64| 4.0 * s.powi(3)).unwrap();
        register_interaction(quartic).unwrap();
        assert_eq!(lookup_interaction("quartic_test").unwrap().w(2.0), 16.0);
        assert!(register_interaction(WFunction::Power(2.0)).is_err());
    }

    #[test]
    fn source_values() {
        let g = Graph::star(3);
        let s = Source::constant(2.0).unwrap();
        assert_eq!(s.values_on(&g).unwrap(), vec![2.0; 4]);
        let s = Source::PerVertex(vec![1.0, 2.0]);
        assert!(s.values_on(&g).is_err());
        let rule = ActionRule::new(0, 2, vec![0.0, 0.0]).unwrap();
        assert!(LQModel::new(Source::Rule(rule)).is_err());
    }
}

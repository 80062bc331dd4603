use serde::{Deserialize, Serialize};

use super::models::lookup_interaction;
use super::{CostModel, EdgeView, LQModel, Lipschitz, Source, WFunction, WModel};
use crate::error::{Error, Result};
use crate::graph::{Ball, Graph};
use crate::reduction::ActionRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelType {
    Lq,
    Wpower,
    Plugin,
}

/// JSON description of a built-in model.
///
/// The source is either `eta_rule` (a scalar action rule) or `eta` (one value
/// per vertex of the graph the model is used on). A `plugin` model names a
/// registered interaction in `w`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "type")]
    pub kind: ModelType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_rule: Option<ActionRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_action: Option<Vec<f64>>,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<BuiltinModel> {
        let source = match (&self.eta_rule, &self.eta) {
            (Some(r), None) => Source::Rule(r.clone()),
            (None, Some(v)) => Source::PerVertex(v.clone()),
            (None, None) => return Err(Error::InvalidModel("one of eta_rule or eta is required".into())),
            (Some(_), Some(_)) => return Err(Error::InvalidModel("eta_rule and eta are exclusive".into())),
        };
        let reference = match self.reference_action.as_deref() {
            None => 0.0,
            Some([a]) => *a,
            Some(other) => {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    got: other.len(),
                })
            }
        };
        let model = match self.kind {
            ModelType::Lq => {
                if self.p.is_some() || self.w.is_some() {
                    return Err(Error::InvalidModel("lq takes neither p nor w".into()));
                }
                BuiltinModel::Lq(LQModel::new(source)?.with_reference(reference))
            }
            ModelType::Wpower => {
                let p = self.p.ok_or_else(|| Error::InvalidModel("wpower needs p".into()))?;
                BuiltinModel::W(WModel::new(source, WFunction::power(p)?)?.with_reference(reference))
            }
            ModelType::Plugin => {
                let name = self.w.as_deref().ok_or_else(|| Error::InvalidModel("plugin needs w".into()))?;
                BuiltinModel::W(WModel::new(source, lookup_interaction(name)?)?.with_reference(reference))
            }
        };
        Ok(model)
    }
}

/// A model built from a [`ModelConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinModel {
    Lq(LQModel),
    W(WModel),
}

impl BuiltinModel {
    pub fn source(&self) -> &Source {
        match self {
            BuiltinModel::Lq(m) => m.source(),
            BuiltinModel::W(m) => m.source(),
        }
    }

    /// Source value at every vertex of `g`.
    pub fn source_values(&self, g: &Graph) -> Result<Vec<f64>> {
        self.source().values_on(g)
    }

    /// The model as a W-interaction model; LQ becomes the `p = 2` power case.
    pub fn as_w_model(&self) -> Result<WModel> {
        match self {
            BuiltinModel::W(m) => Ok(m.clone()),
            BuiltinModel::Lq(m) => {
                Ok(WModel::power(m.source().clone(), 2.0)?.with_reference(m.reference_action()[0]))
            }
        }
    }
}

macro_rules! delegate {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            BuiltinModel::Lq($m) => $e,
            BuiltinModel::W($m) => $e,
        }
    };
}

impl CostModel for BuiltinModel {
    fn dim(&self) -> usize {
        1
    }

    fn radius(&self) -> usize {
        delegate!(self, m => m.radius())
    }

    fn prepare(&self, b: &Ball) -> Result<()> {
        delegate!(self, m => m.prepare(b))
    }

    fn is_local(&self) -> bool {
        delegate!(self, m => m.is_local())
    }

    fn own_cost(&self, b: &Ball, a: &[f64]) -> f64 {
        delegate!(self, m => m.own_cost(b, a))
    }

    fn own_cost_grad(&self, b: &Ball, a: &[f64]) -> Vec<f64> {
        delegate!(self, m => m.own_cost_grad(b, a))
    }

    fn interaction(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
        delegate!(self, m => m.interaction(e, a, b))
    }

    fn interaction_grad(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        delegate!(self, m => m.interaction_grad(e, a, b))
    }

    fn pair_potential(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> f64 {
        delegate!(self, m => m.pair_potential(e, a, b))
    }

    fn pair_potential_grad1(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        delegate!(self, m => m.pair_potential_grad1(e, a, b))
    }

    fn pair_potential_grad2(&self, e: EdgeView<'_>, a: &[f64], b: &[f64]) -> Vec<f64> {
        delegate!(self, m => m.pair_potential_grad2(e, a, b))
    }

    fn reference_action(&self) -> Vec<f64> {
        delegate!(self, m => m.reference_action())
    }

    fn lipschitz(&self) -> Option<Lipschitz> {
        delegate!(self, m => m.lipschitz())
    }
}

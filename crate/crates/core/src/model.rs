use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scenario::Scenario;

/// A rational weight per vertex, indexed like the scenario it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Model(Vec<Rational>);

impl Model {
    pub fn new(weights: Vec<Rational>) -> Self {
        Model(weights)
    }

    pub fn constant(len: usize, value: Rational) -> Self {
        Model(vec![value; len])
    }

    /// 0/1 model supported on `support`.
    pub fn indicator(len: usize, support: &[usize]) -> Self {
        let mut w = vec![Rational::zero(); len];
        for &v in support {
            w[v] = Rational::one();
        }
        Model(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_weights(self) -> Vec<Rational> {
        self.0
    }

    pub fn weight(&self, v: usize) -> &Rational {
        &self.0[v]
    }

    /// p(W) for a vertex subset W.
    pub fn mass(&self, subset: &[usize]) -> Rational {
        subset.iter().map(|&v| &self.0[v]).sum()
    }

    pub fn in_unit_interval(&self) -> bool {
        let one = Rational::one();
        self.0.iter().all(|w| !w.is_negative() && *w <= one)
    }

    pub fn is_deterministic(&self) -> bool {
        self.0.iter().all(|w| w.is_zero() || w.is_one())
    }

    pub fn from_labeled(scenario: &Scenario, weights: &BTreeMap<String, Rational>) -> Result<Self> {
        if weights.len() != scenario.vertex_count() {
            return Err(Error::DomainMismatch(format!(
                "{} weights for {} vertices",
                weights.len(),
                scenario.vertex_count()
            )));
        }
        let mut out = vec![Rational::zero(); scenario.vertex_count()];
        for (label, w) in weights {
            let v = scenario
                .index_of(label)
                .ok_or_else(|| Error::DomainMismatch(format!("unknown vertex {label:?}")))?;
            out[v] = w.clone();
        }
        Ok(Model(out))
    }

    pub fn to_labeled(&self, scenario: &Scenario) -> BTreeMap<String, Rational> {
        scenario
            .vertices()
            .iter()
            .cloned()
            .zip(self.0.iter().cloned())
            .collect()
    }

    pub fn to_json(&self, scenario: &Scenario) -> ModelJson {
        ModelJson {
            weights: self.to_labeled(scenario),
        }
    }
}

/// Serialized form: `{"weights": {"label": "num/den", ...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub weights: BTreeMap<String, Rational>,
}

impl ModelJson {
    pub fn into_model(self, scenario: &Scenario) -> Result<Model> {
        Model::from_labeled(scenario, &self.weights)
    }
}

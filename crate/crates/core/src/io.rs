//! JSON entry points. Every parser validates fully and never panics on
//! malformed input.

use serde::Serialize;

use crate::embeddings::{Embedding, EmbeddingJson};
use crate::error::{Error, Result};
use crate::model::{Model, ModelJson};
use crate::products::{fr_product_min, EdgeOrigin, ProductJson, ProductScenario, Rule};
use crate::reductions::ReductionBudget;
use crate::scenario::{validate_scenario, RawScenario, Scenario};

/// Upper bound on accepted input size, in bytes.
pub const MAX_INPUT_BYTES: usize = 16 << 20;

fn check_size(input: &str) -> Result<()> {
    if input.len() > MAX_INPUT_BYTES {
        return Err(Error::Parse(format!("input of {} bytes exceeds {MAX_INPUT_BYTES}", input.len())));
    }
    Ok(())
}

pub fn parse_scenario(input: &str) -> Result<Scenario> {
    check_size(input)?;
    let raw: RawScenario = serde_json::from_str(input)?;
    validate_scenario(&raw)
}

pub fn parse_model(input: &str, scenario: &Scenario) -> Result<Model> {
    check_size(input)?;
    let json: ModelJson = serde_json::from_str(input)?;
    json.into_model(scenario)
}

pub fn parse_rule(input: &str) -> Result<Rule> {
    check_size(input)?;
    Ok(serde_json::from_str(input)?)
}

pub fn parse_embedding(input: &str, source: &Scenario) -> Result<Embedding> {
    check_size(input)?;
    let json: EmbeddingJson = serde_json::from_str(input)?;
    json.into_embedding(source)
}

/// Rebuilds the product from its factors and checks the stored vertices,
/// edges and origins against it.
pub fn parse_product(input: &str, edge_budget: usize, budget: ReductionBudget) -> Result<ProductScenario> {
    check_size(input)?;
    let json: ProductJson = serde_json::from_str(input)?;
    let factors = json
        .factors
        .iter()
        .map(validate_scenario)
        .collect::<Result<Vec<_>>>()?;
    let mut product = fr_product_min(&factors, edge_budget)?;
    if json.edge_origin.contains(&EdgeOrigin::Virtual) {
        product = product.complete(budget)?;
    }
    let rebuilt = product.to_json();
    let stored = validate_scenario(&RawScenario {
        vertices: json.vertices,
        edges: json.edges,
    })?
    .to_raw();
    if stored.vertices != rebuilt.vertices || stored.edges != rebuilt.edges {
        return Err(Error::InvalidProduct("stored edges differ from the product of the factors".into()));
    }
    if json.edge_origin != rebuilt.edge_origin {
        return Err(Error::InvalidProduct("edge origins differ from the product of the factors".into()));
    }
    Ok(product)
}

/// Pretty JSON with a trailing newline. Map keys are ordered, so equal
/// values always serialize to identical bytes.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

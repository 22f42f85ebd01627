//! Exact hypergraph contextuality.
//!
//! Scenarios are hypergraphs (outcomes as vertices, measurements as edges);
//! their probabilistic models form a polytope that every routine here handles
//! in exact rational arithmetic.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod io;
pub mod lp;
pub mod model;
pub mod polytope;
pub mod products;
pub mod rational;
pub mod reductions;
pub mod scenario;

pub use error::{Error, Result};
pub use model::{Model, ModelJson};
pub use rational::Rational;
pub use scenario::{build_party, validate_scenario, PartyScenario, RawScenario, Scenario};

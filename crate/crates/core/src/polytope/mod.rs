//! The polytope `G(H)` of probabilistic models and its classical and
//! consistent-exclusivity subfamilies, decided in exact arithmetic.

mod cliques;
pub(crate) mod dd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{EqualitySystem, LpResult, LpStatus, Row};
use crate::model::{Model, ModelJson};
use crate::rational::Rational;
use crate::scenario::Scenario;

pub use cliques::maximal_cliques;

pub const DEFAULT_VERTEX_BUDGET: usize = 64;
pub const DEFAULT_CLIQUE_BUDGET: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

/// `G(H) = {p ≥ 0 : p(e) = 1 for every edge e}` as an LP feasible region.
///
/// Phase 1 runs once on first use; every later optimization reuses it.
#[derive(Clone, Debug)]
pub struct ModelPolytope {
    system: EqualitySystem,
}

impl ModelPolytope {
    pub fn new(h: &Scenario) -> Self {
        Self::from_edges(h.vertex_count(), h.edges())
    }

    /// Polytope of an arbitrary edge family over `n` vertices. Vertices not
    /// covered by any edge are only bounded below.
    pub fn from_edges(n: usize, edges: &[Vec<usize>]) -> Self {
        let rows = edges.iter().map(|e| Row::indicator(e, Rational::one())).collect();
        ModelPolytope {
            system: EqualitySystem::new(n, rows),
        }
    }

    pub fn dimension_bound(&self) -> usize {
        self.system.num_vars()
    }

    pub fn is_nonempty(&self) -> bool {
        self.system.is_feasible()
    }

    pub fn optimize_weight(&self, subset: &[usize], direction: Direction) -> LpResult {
        let mut c = vec![Rational::zero(); self.system.num_vars()];
        for &v in subset {
            c[v] = Rational::one();
        }
        match direction {
            Direction::Min => self.system.minimize(&c),
            Direction::Max => self.system.maximize(&c),
        }
    }

    /// `(min p(W), max p(W))`, or `None` when the polytope is empty.
    /// An unbounded maximum is reported as `None` in the second slot.
    pub fn weight_range(&self, subset: &[usize]) -> Option<(Rational, Option<Rational>)> {
        let lo = self.optimize_weight(subset, Direction::Min);
        if lo.status == LpStatus::Infeasible {
            return None;
        }
        let hi = self.optimize_weight(subset, Direction::Max);
        Some((lo.optimum.expect("bounded below by 0"), hi.optimum))
    }

    /// Whether `p(W) = 1` on the whole (nonempty) polytope.
    pub fn is_constant_one(&self, subset: &[usize]) -> bool {
        match self.weight_range(subset) {
            Some((lo, Some(hi))) => lo.is_one() && hi.is_one(),
            _ => false,
        }
    }
}

pub fn is_model(h: &Scenario, p: &Model) -> Result<bool> {
    if p.len() != h.vertex_count() {
        return Err(Error::DomainMismatch(format!(
            "{} weights for {} vertices",
            p.len(),
            h.vertex_count()
        )));
    }
    Ok(p.in_unit_interval() && h.edges().iter().all(|e| p.mass(e).is_one()))
}

pub fn optimize_weight(h: &Scenario, subset: &[usize], direction: Direction) -> LpResult {
    ModelPolytope::new(h).optimize_weight(subset, direction)
}

pub fn has_model(h: &Scenario) -> bool {
    ModelPolytope::new(h).is_nonempty()
}

/// Extreme points of `G(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeVertexSet {
    pub vertices: Vec<Model>,
    pub complete: bool,
}

impl PolytopeVertexSet {
    pub fn to_json(&self, h: &Scenario) -> PolytopeVertexSetJson {
        PolytopeVertexSetJson {
            vertices: self.vertices.iter().map(|m| m.to_json(h)).collect(),
            complete: self.complete,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeVertexSetJson {
    pub vertices: Vec<ModelJson>,
    pub complete: bool,
}

pub fn enumerate_model_vertices(h: &Scenario, budget: usize) -> Result<PolytopeVertexSet> {
    if h.vertex_count() > budget {
        return Err(Error::BudgetExceeded {
            what: "vertex enumeration",
            size: h.vertex_count(),
            budget,
        });
    }
    let rows: Vec<Row> = h.edges().iter().map(|e| Row::indicator(e, Rational::one())).collect();
    let vertices = dd::enumerate_vertices(h.vertex_count(), &rows)
        .into_iter()
        .map(Model::new)
        .collect();
    Ok(PolytopeVertexSet {
        vertices,
        complete: true,
    })
}

/// Convex weights over `D(H)` reproducing `p`, if any.
pub fn classical_decomposition(h: &Scenario, p: &Model) -> Result<Option<Vec<(Model, Rational)>>> {
    let det = h.enumerate_deterministic_models();
    if det.is_empty() {
        return Err(Error::NoDeterministicModels);
    }
    if p.len() != h.vertex_count() {
        return Err(Error::DomainMismatch(format!(
            "{} weights for {} vertices",
            p.len(),
            h.vertex_count()
        )));
    }
    let mut rows: Vec<Row> = (0..h.vertex_count())
        .map(|v| Row {
            coeffs: det
                .iter()
                .enumerate()
                .filter(|(_, d)| d.weight(v).is_one())
                .map(|(k, _)| (k, Rational::one()))
                .collect(),
            rhs: p.weight(v).clone(),
        })
        .collect();
    rows.push(Row {
        coeffs: (0..det.len()).map(|k| (k, Rational::one())).collect(),
        rhs: Rational::one(),
    });
    let sys = EqualitySystem::new(det.len(), rows);
    let r = sys.minimize(&vec![Rational::zero(); det.len()]);
    Ok(match r.status {
        LpStatus::Optimal => Some(
            det.into_iter()
                .zip(r.primal.expect("optimal has primal"))
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        ),
        _ => None,
    })
}

pub fn is_classical_model(h: &Scenario, p: &Model) -> Result<bool> {
    Ok(classical_decomposition(h, p)?.is_some())
}

/// Consistent exclusivity: every set of pairwise orthogonal vertices carries
/// total weight at most 1. Maximal cliques of the orthogonality graph suffice.
pub fn ce1_check(h: &Scenario, p: &Model, clique_budget: usize) -> Result<bool> {
    if p.len() != h.vertex_count() {
        return Err(Error::DomainMismatch(format!(
            "{} weights for {} vertices",
            p.len(),
            h.vertex_count()
        )));
    }
    let cliques = maximal_cliques(&h.orthogonality_adjacency(), clique_budget)?;
    let one = Rational::one();
    Ok(cliques.iter().all(|c| p.mass(c) <= one))
}

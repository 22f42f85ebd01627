//! Zero, contraction and virtual-edge reductions, the VCZ canonical form, and
//! observational equivalence of scenarios.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::polytope::{enumerate_model_vertices, Direction, ModelPolytope, DEFAULT_VERTEX_BUDGET};
use crate::rational::Rational;
use crate::scenario::{RawScenario, Scenario};

pub const DEFAULT_SUBSET_BUDGET: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionBudget {
    /// Largest scenario (in vertices) whose model polytope is enumerated.
    pub vertices: usize,
    /// Largest number of candidate subsets visited while searching for virtual edges.
    pub subsets: usize,
}

impl Default for ReductionBudget {
    fn default() -> Self {
        ReductionBudget {
            vertices: DEFAULT_VERTEX_BUDGET,
            subsets: DEFAULT_SUBSET_BUDGET,
        }
    }
}

/// `{v : p(v) = 0 for every model p}`, one LP per undecided vertex.
pub fn zero_weighted_vertices(h: &Scenario) -> Result<Vec<usize>> {
    zero_weighted_in(&ModelPolytope::new(h), h.vertex_count())
}

fn zero_weighted_in(poly: &ModelPolytope, n: usize) -> Result<Vec<usize>> {
    if !poly.is_nonempty() {
        return Err(Error::EmptyModelSet);
    }
    let mut positive = vec![false; n];
    let mut zero = Vec::new();
    for v in 0..n {
        if positive[v] {
            continue;
        }
        let r = poly.optimize_weight(&[v], Direction::Max);
        let optimum = r.optimum.expect("nonempty polytope of a scenario is bounded");
        if optimum.is_zero() {
            zero.push(v);
        } else {
            // The witness certifies every vertex it weights positively.
            for (w, x) in r.primal.expect("optimal").iter().enumerate() {
                if x.is_positive() {
                    positive[w] = true;
                }
            }
        }
    }
    Ok(zero)
}

/// The maximal sets of indistinguishable non-zero-weighted vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractiblePartition {
    /// Each block sorted; blocks ordered by their least vertex.
    pub blocks: Vec<Vec<usize>>,
    pub zero_vertices: Vec<usize>,
}

/// Drops zero-weighted vertices and groups the rest by edge-incidence
/// signature: a set is contractible exactly when its members lie in the same
/// edges.
pub fn contractible_partition(h: &Scenario) -> Result<ContractiblePartition> {
    let zero_vertices = zero_weighted_vertices(h)?;
    Ok(partition_with_zeros(h, zero_vertices))
}

fn partition_with_zeros(h: &Scenario, zero_vertices: Vec<usize>) -> ContractiblePartition {
    let incidence = h.incidence_table();
    let mut is_zero = vec![false; h.vertex_count()];
    for &z in &zero_vertices {
        is_zero[z] = true;
    }
    let mut by_signature: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for v in (0..h.vertex_count()).filter(|&v| !is_zero[v]) {
        by_signature.entry(&incidence[v]).or_default().push(v);
    }
    let mut blocks: Vec<Vec<usize>> = by_signature.into_values().collect();
    blocks.sort();
    ContractiblePartition {
        blocks,
        zero_vertices,
    }
}

/// `W` can be contracted when every edge contains all of it or none of it.
pub fn is_contractible(h: &Scenario, w: &[usize]) -> bool {
    !w.is_empty()
        && h.edges().iter().all(|e| {
            let inside = w.iter().filter(|v| e.binary_search(v).is_ok()).count();
            inside == 0 || inside == w.len()
        })
}

/// Whether `p(e) = 1` for every model `p`.
pub fn is_virtual_edge(h: &Scenario, e: &[usize]) -> Result<bool> {
    if e.is_empty() {
        return Err(Error::EmptySubset);
    }
    let poly = ModelPolytope::new(h);
    if !poly.is_nonempty() {
        return Err(Error::EmptyModelSet);
    }
    Ok(poly.is_constant_one(e))
}

/// Every virtual edge, in lexicographic order.
///
/// Depth-first over subsets in increasing vertex order, tracking `p(S)` for
/// each extreme point `p` of `G(H)`. Weights are nonnegative, so once some
/// extreme point exceeds 1 every superset does too and the branch is cut. A
/// subset is virtual iff every extreme point gives exactly 1.
pub fn enumerate_virtual_edges(h: &Scenario, budget: ReductionBudget) -> Result<Vec<Vec<usize>>> {
    let points = enumerate_model_vertices(h, budget.vertices)?;
    if points.vertices.is_empty() {
        return Err(Error::EmptyModelSet);
    }
    virtual_edges_from_points(h.vertex_count(), &points.vertices, budget.subsets)
}

fn virtual_edges_from_points(n: usize, points: &[Model], budget: usize) -> Result<Vec<Vec<usize>>> {
    struct Search<'a> {
        n: usize,
        points: &'a [Model],
        budget: usize,
        visited: usize,
        out: Vec<Vec<usize>>,
    }

    impl Search<'_> {
        fn dfs(&mut self, set: &mut Vec<usize>, sums: &[Rational], from: usize) -> Result<()> {
            let one = Rational::one();
            for v in from..self.n {
                self.visited += 1;
                if self.visited > self.budget {
                    return Err(Error::BudgetExceeded {
                        what: "virtual edge search",
                        size: self.visited,
                        budget: self.budget,
                    });
                }
                let next: Vec<Rational> = sums
                    .iter()
                    .zip(self.points)
                    .map(|(s, p)| s + p.weight(v))
                    .collect();
                if next.iter().any(|s| *s > one) {
                    continue;
                }
                set.push(v);
                if next.iter().all(Rational::is_one) {
                    self.out.push(set.clone());
                }
                self.dfs(set, &next, v + 1)?;
                set.pop();
            }
            Ok(())
        }
    }

    let mut search = Search {
        n,
        points,
        budget,
        visited: 0,
        out: Vec::new(),
    };
    search.dfs(&mut Vec::new(), &vec![Rational::zero(); points.len()], 0)?;
    Ok(search.out)
}

/// `H̄`: the scenario with all of its virtual edges.
pub fn completion(h: &Scenario, budget: ReductionBudget) -> Result<Scenario> {
    Ok(h.with_extra_edges(&enumerate_virtual_edges(h, budget)?))
}

/// `H_{V∖{v}}` for a zero-weighted `v`.
pub fn zero_reduce(h: &Scenario, v: usize) -> Result<Scenario> {
    let poly = ModelPolytope::new(h);
    if !poly.is_nonempty() {
        return Err(Error::EmptyModelSet);
    }
    let max = poly.optimize_weight(&[v], Direction::Max).optimum;
    if max != Some(Rational::zero()) {
        return Err(Error::NotZeroWeighted(h.label(v).to_string()));
    }
    let rest: Vec<usize> = (0..h.vertex_count()).filter(|&w| w != v).collect();
    Ok(h.induced_subhypergraph(&rest)?.scenario)
}

/// The contraction `H_{V∖(W∖W')}` for contractible `W` and nonempty `W' ⊆ W`.
pub fn contract(h: &Scenario, w: &[usize], keep: &[usize]) -> Result<Scenario> {
    if !is_contractible(h, w) {
        return Err(Error::NotContractible(h.labels_of(w)));
    }
    if keep.is_empty() || keep.iter().any(|k| !w.contains(k)) {
        return Err(Error::NotContractible(h.labels_of(keep)));
    }
    let rest: Vec<usize> = (0..h.vertex_count())
        .filter(|v| !w.contains(v) || keep.contains(v))
        .collect();
    Ok(h.induced_subhypergraph(&rest)?.scenario)
}

/// `(V, E ∪ {e})` for a virtual edge `e`.
pub fn add_virtual_edge(h: &Scenario, e: &[usize]) -> Result<Scenario> {
    if !is_virtual_edge(h, e)? {
        return Err(Error::NotVirtual(h.labels_of(e)));
    }
    Ok(h.with_extra_edges(&[e.to_vec()]))
}

/// Canonical reduced representative of a scenario's VCZ class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VczForm {
    pub reduced: Scenario,
    /// Original label → representative label, or `None` for removed zero vertices.
    pub vertex_map: BTreeMap<String, Option<String>>,
    pub zero_vertices_removed: usize,
    pub vertices_contracted: usize,
    pub completion_edges_added: usize,
    pub completion_edges_removed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VczFormJson {
    pub reduced: RawScenario,
    pub vertex_map: BTreeMap<String, Option<String>>,
    pub zero_vertices_removed: usize,
    pub vertices_contracted: usize,
    pub completion_edges_added: usize,
    pub completion_edges_removed: usize,
}

impl VczForm {
    pub fn to_json(&self) -> VczFormJson {
        VczFormJson {
            reduced: self.reduced.to_raw(),
            vertex_map: self.vertex_map.clone(),
            zero_vertices_removed: self.zero_vertices_removed,
            vertices_contracted: self.vertices_contracted,
            completion_edges_added: self.completion_edges_added,
            completion_edges_removed: self.completion_edges_removed,
        }
    }
}

/// Zero-removal, contraction of each maximal indistinguishable block onto its
/// least label, completion, then greedy removal of edges in lexicographic
/// order while the removed edge stays virtual in what remains.
pub fn vcz_reduce(h: &Scenario, budget: ReductionBudget) -> Result<VczForm> {
    if h.vertex_count() > budget.vertices {
        return Err(Error::BudgetExceeded {
            what: "vertex enumeration",
            size: h.vertex_count(),
            budget: budget.vertices,
        });
    }
    let zero = zero_weighted_vertices(h)?;
    let partition = partition_with_zeros(h, zero.clone());
    let reps: Vec<usize> = partition.blocks.iter().map(|b| b[0]).collect();
    let mut vertex_map: BTreeMap<String, Option<String>> =
        zero.iter().map(|&z| (h.label(z).to_string(), None)).collect();
    for block in &partition.blocks {
        for &v in block {
            vertex_map.insert(h.label(v).to_string(), Some(h.label(block[0]).to_string()));
        }
    }
    let contracted = h.induced_subhypergraph(&reps)?;
    debug_assert!(!contracted.empty_induced_edge);
    let contracted = contracted.scenario;

    let completed = completion(&contracted, budget)?;
    let added = completed.edge_count() - contracted.edge_count();

    let n = completed.vertex_count();
    let mut kept: Vec<bool> = vec![true; completed.edge_count()];
    let mut removed = 0;
    for e in 0..completed.edge_count() {
        kept[e] = false;
        let rest: Vec<Vec<usize>> = (0..completed.edge_count())
            .filter(|&f| kept[f])
            .map(|f| completed.edges()[f].clone())
            .collect();
        let poly = ModelPolytope::from_edges(n, &rest);
        if poly.is_nonempty() && poly.is_constant_one(&completed.edges()[e]) {
            removed += 1;
        } else {
            kept[e] = true;
        }
    }
    let keep: Vec<usize> = (0..completed.edge_count()).filter(|&e| kept[e]).collect();
    let reduced = completed.with_edge_subset(&keep)?;

    Ok(VczForm {
        reduced,
        vertex_map,
        zero_vertices_removed: zero.len(),
        vertices_contracted: h.vertex_count() - zero.len() - reps.len(),
        completion_edges_added: added,
        completion_edges_removed: removed,
    })
}

/// Outcome of an observational-equivalence search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// `phi[v2] = v1` with `G(H2) = G(H1) ∘ phi`.
    Bijection(Vec<usize>),
    Refuted(String),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Bijection(_))
    }
}

/// Searches for `phi: V2 → V1` mapping the extreme points of `G(H1)` exactly
/// onto those of `G(H2)`. Candidate pairs must agree on the multiset of
/// values a vertex takes over the extreme points; partial assignments are
/// pruned by comparing projected point multisets.
pub fn observational_equivalence(h1: &Scenario, h2: &Scenario, budget: usize) -> Result<Equivalence> {
    let n = h1.vertex_count();
    if n != h2.vertex_count() {
        return Ok(Equivalence::Refuted(format!(
            "vertex counts differ: {} vs {}",
            n,
            h2.vertex_count()
        )));
    }
    let p1 = enumerate_model_vertices(h1, budget)?.vertices;
    let p2 = enumerate_model_vertices(h2, budget)?.vertices;
    if p1.len() != p2.len() {
        return Ok(Equivalence::Refuted(format!(
            "extreme point counts differ: {} vs {}",
            p1.len(),
            p2.len()
        )));
    }
    let column = |points: &[Model], v: usize| -> Vec<Rational> {
        let mut c: Vec<Rational> = points.iter().map(|p| p.weight(v).clone()).collect();
        c.sort();
        c
    };
    let sig1: Vec<Vec<Rational>> = (0..n).map(|v| column(&p1, v)).collect();
    let sig2: Vec<Vec<Rational>> = (0..n).map(|v| column(&p2, v)).collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|v2| (0..n).filter(|&v1| sig1[v1] == sig2[v2]).collect())
        .collect();
    if let Some(v2) = (0..n).find(|&v2| candidates[v2].is_empty()) {
        return Ok(Equivalence::Refuted(format!(
            "no vertex of the first scenario matches {:?}",
            h2.label(v2)
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v2| (candidates[v2].len(), v2));

    struct Search<'a> {
        p1: &'a [Model],
        p2: &'a [Model],
        order: Vec<usize>,
        candidates: Vec<Vec<usize>>,
        phi: Vec<Option<usize>>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn consistent(&self, depth: usize) -> bool {
            let assigned = &self.order[..depth];
            let mut left: HashMap<Vec<&Rational>, isize> = HashMap::new();
            for p in self.p1 {
                let key = assigned.iter().map(|&v2| p.weight(self.phi[v2].unwrap())).collect();
                *left.entry(key).or_default() += 1;
            }
            for q in self.p2 {
                let key: Vec<&Rational> = assigned.iter().map(|&v2| q.weight(v2)).collect();
                match left.get_mut(&key) {
                    Some(c) if *c > 0 => *c -= 1,
                    _ => return false,
                }
            }
            true
        }

        fn run(&mut self, depth: usize) -> bool {
            if depth == self.order.len() {
                return true;
            }
            let v2 = self.order[depth];
            for i in 0..self.candidates[v2].len() {
                let v1 = self.candidates[v2][i];
                if self.used[v1] {
                    continue;
                }
                self.phi[v2] = Some(v1);
                self.used[v1] = true;
                if self.consistent(depth + 1) && self.run(depth + 1) {
                    return true;
                }
                self.used[v1] = false;
                self.phi[v2] = None;
            }
            false
        }
    }

    let mut search = Search {
        p1: &p1,
        p2: &p2,
        order,
        candidates,
        phi: vec![None; n],
        used: vec![false; n],
    };
    if !search.run(0) {
        return Ok(Equivalence::Refuted("no bijection maps the model polytopes onto each other".into()));
    }
    let phi: Vec<usize> = search.phi.into_iter().map(|v| v.expect("complete")).collect();
    // Final exact check: the composed point set equals G(H2)'s.
    let mut composed: Vec<Model> = p1
        .iter()
        .map(|p| Model::new(phi.iter().map(|&v1| p.weight(v1).clone()).collect()))
        .collect();
    composed.sort();
    let mut target = p2.clone();
    target.sort();
    if composed != target {
        return Ok(Equivalence::Refuted("bijection failed final verification".into()));
    }
    Ok(Equivalence::Bijection(phi))
}

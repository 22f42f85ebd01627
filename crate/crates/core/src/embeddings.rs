//! Embeddings of scenarios into bipartite games, and exact verification that
//! an injection is a conditional interpretation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, ModelJson};
use crate::polytope::{enumerate_model_vertices, is_model, ModelPolytope};
use crate::products::{apply_rule, extended_chsh_rule, fr_product_bipartite, product_label, Rule};
use crate::rational::Rational;
use crate::scenario::{build_party, PartyScenario, RawScenario, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    Theorem41,
    GraphBipartite,
    GraphOddcycle,
}

/// An injection of a source scenario's vertices into a target game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub target: Scenario,
    /// `injection[v]` is the target vertex of source vertex `v`.
    pub injection: Vec<usize>,
    pub kind: ConstructionKind,
    /// Source edge index `e^v` per source vertex (clone construction only).
    pub edge_choice: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingJson {
    pub target: RawScenario,
    pub injection: BTreeMap<String, String>,
    pub kind: ConstructionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_choice: Option<BTreeMap<String, Vec<String>>>,
}

impl Embedding {
    pub fn to_json(&self, source: &Scenario) -> EmbeddingJson {
        EmbeddingJson {
            target: self.target.to_raw(),
            injection: self
                .injection
                .iter()
                .enumerate()
                .map(|(v, &t)| (source.label(v).to_string(), self.target.label(t).to_string()))
                .collect(),
            kind: self.kind,
            edge_choice: self.edge_choice.as_ref().map(|choice| {
                choice
                    .iter()
                    .enumerate()
                    .map(|(v, &e)| (source.label(v).to_string(), source.edge_labels(e)))
                    .collect()
            }),
        }
    }

    /// Checks that the injection is total, injective and lands in the target.
    pub fn validate(&self, source: &Scenario) -> Result<()> {
        if self.injection.len() != source.vertex_count() {
            return Err(Error::InvalidEmbedding(format!(
                "injection covers {} of {} source vertices",
                self.injection.len(),
                source.vertex_count()
            )));
        }
        let mut hit = vec![false; self.target.vertex_count()];
        for (v, &t) in self.injection.iter().enumerate() {
            if t >= hit.len() {
                return Err(Error::InvalidEmbedding(format!("{:?} maps outside the target", source.label(v))));
            }
            if std::mem::replace(&mut hit[t], true) {
                return Err(Error::InvalidEmbedding(format!(
                    "two vertices map to {:?}",
                    self.target.label(t)
                )));
            }
        }
        if let Some(choice) = &self.edge_choice {
            check_edge_choice(source, choice)?;
        }
        Ok(())
    }
}

impl EmbeddingJson {
    pub fn into_embedding(self, source: &Scenario) -> Result<Embedding> {
        let target = crate::scenario::validate_scenario(&self.target)?;
        let mut injection = vec![usize::MAX; source.vertex_count()];
        for (v, t) in &self.injection {
            let v = source.index_of(v).ok_or_else(|| Error::UnknownVertex(v.clone()))?;
            injection[v] = target.index_of(t).ok_or_else(|| Error::UnknownVertex(t.clone()))?;
        }
        if let Some(v) = injection.iter().position(|&t| t == usize::MAX) {
            return Err(Error::InvalidEmbedding(format!("{:?} is not mapped", source.label(v))));
        }
        let edge_choice = match self.edge_choice {
            None => None,
            Some(map) => {
                let mut choice = vec![usize::MAX; source.vertex_count()];
                for (v, e) in &map {
                    let v = source.index_of(v).ok_or_else(|| Error::UnknownVertex(v.clone()))?;
                    let ids = source.indices_of(e)?;
                    choice[v] = source
                        .edge_position(&ids)
                        .ok_or_else(|| Error::InvalidEmbedding(format!("{e:?} is not an edge")))?;
                }
                Some(choice)
            }
        };
        let emb = Embedding {
            target,
            injection,
            kind: self.kind,
            edge_choice,
        };
        emb.validate(source)?;
        Ok(emb)
    }
}

fn check_edge_choice(h: &Scenario, choice: &[usize]) -> Result<()> {
    if choice.len() != h.vertex_count() {
        return Err(Error::InvalidEmbedding(format!(
            "edge choice covers {} of {} vertices",
            choice.len(),
            h.vertex_count()
        )));
    }
    for (v, &e) in choice.iter().enumerate() {
        if e >= h.edge_count() || h.edges()[e].binary_search(&v).is_err() {
            return Err(Error::InvalidEmbedding(format!(
                "chosen edge of {:?} does not contain it",
                h.label(v)
            )));
        }
    }
    Ok(())
}

/// The clone factor: one vertex `v|e` per incidence, one edge per edge of `h`.
pub fn clone_factor(h: &Scenario) -> Result<PartyScenario> {
    let mut labels = Vec::new();
    let edges: Vec<Vec<String>> = h
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| e.iter().map(|&v| clone_label(h, v, i)).collect())
        .collect();
    for e in &edges {
        labels.extend(e.iter().cloned());
    }
    PartyScenario::try_from(Scenario::new(labels, edges)?)
}

fn clone_label(h: &Scenario, v: usize, e: usize) -> String {
    format!("{}|{}", h.label(v), e)
}

/// Winners of the standard rule on question `(e, e')`: pairs `(v, v')` with
/// `v = v'` or `{v, v'}` disjoint from `e ∩ e'`.
fn standard_winners(h: &Scenario, e: usize, f: usize) -> Vec<(usize, usize)> {
    let (a, b) = (&h.edges()[e], &h.edges()[f]);
    let shared = |v: &usize| a.binary_search(v).is_ok() && b.binary_search(v).is_ok();
    let mut out = Vec::new();
    for &v in a {
        for &w in b {
            if v == w || (!shared(&v) && !shared(&w)) {
                out.push((v, w));
            }
        }
    }
    out
}

/// Builds the two-player clone game of `h` and the injection
/// `v ↦ vv|e^v e^v`. Without an explicit choice, `e^v` is the least edge
/// containing `v`.
pub fn build_theorem41(h: &Scenario, edge_choice: Option<&[usize]>, edge_budget: usize) -> Result<Embedding> {
    if !ModelPolytope::new(h).is_nonempty() {
        return Err(Error::EmptyModelSet);
    }
    let choice: Vec<usize> = match edge_choice {
        Some(c) => {
            check_edge_choice(h, c)?;
            c.to_vec()
        }
        None => (0..h.vertex_count()).map(|v| h.incidence(v)[0]).collect(),
    };
    let factor = clone_factor(h)?.into_scenario();
    let product = fr_product_bipartite(&factor, &factor, edge_budget)?;
    // Factor edges are sorted by label, so recover each one's source edge
    // from the `|e` suffix of its clones.
    let factor_edge_of: Vec<usize> = (0..factor.edge_count())
        .map(|fe| {
            let label = factor.label(factor.edges()[fe][0]);
            label.rsplit_once('|').and_then(|(_, e)| e.parse().ok()).expect("clone label")
        })
        .collect();
    let mut winners: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (fe, &e) in factor_edge_of.iter().enumerate() {
        for (ff, &f) in factor_edge_of.iter().enumerate() {
            let labels = standard_winners(h, e, f)
                .into_iter()
                .map(|(v, w)| pair_label(h, v, e, w, f))
                .collect();
            winners.insert(format!("{fe},{ff}"), labels);
        }
    }
    let target = apply_rule(&product, &Rule(winners))?;
    let injection = (0..h.vertex_count())
        .map(|v| {
            let label = pair_label(h, v, choice[v], v, choice[v]);
            target.index_of(&label).expect("diagonal clone pair always wins")
        })
        .collect();
    Ok(Embedding {
        target,
        injection,
        kind: ConstructionKind::Theorem41,
        edge_choice: Some(choice),
    })
}

fn pair_label(h: &Scenario, v: usize, e: usize, w: usize, f: usize) -> String {
    product_label(&[&clone_label(h, v, e), &clone_label(h, w, f)])
}

/// Extends a model of `h` to the clone game:
/// `p(v)` on `vv|ee'`, `p(v)p(v')/(1 - p(e∩e'))` off the shared part when
/// that denominator is nonzero, and `0` otherwise.
pub fn extend_model(h: &Scenario, emb: &Embedding, p: &Model) -> Result<Model> {
    if !is_model(h, p)? {
        return Err(Error::NotAModel);
    }
    if emb.kind != ConstructionKind::Theorem41 {
        return Err(Error::InvalidEmbedding("extension formula applies to the clone construction".into()));
    }
    let mut values: Vec<Option<Rational>> = vec![None; emb.target.vertex_count()];
    let mut produced = 0;
    for e in 0..h.edge_count() {
        for f in 0..h.edge_count() {
            let shared: Vec<usize> = h.edges()[e]
                .iter()
                .copied()
                .filter(|v| h.edges()[f].binary_search(v).is_ok())
                .collect();
            let denom = Rational::one() - p.mass(&shared);
            for (v, w) in standard_winners(h, e, f) {
                let label = pair_label(h, v, e, w, f);
                let t = emb.target.index_of(&label).ok_or_else(|| {
                    Error::InvalidEmbedding(format!("target lacks clone pair {label:?}"))
                })?;
                let value = if v == w {
                    p.weight(v).clone()
                } else if denom.is_zero() {
                    Rational::zero()
                } else {
                    p.weight(v) * p.weight(w) / &denom
                };
                values[t] = Some(value);
                produced += 1;
            }
        }
    }
    if produced != emb.target.vertex_count() || values.iter().any(Option::is_none) {
        return Err(Error::InvalidEmbedding("target is not the clone game of the source".into()));
    }
    Ok(Model::new(values.into_iter().map(Option::unwrap).collect()))
}

/// Proper 2-coloring of a graph given as binary edges, colour 0 on the
/// least vertex of each component.
pub fn two_coloring(h: &Scenario) -> Option<Vec<u8>> {
    let n = h.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in h.edges() {
        if let [u, v] = e[..] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut color: Vec<Option<u8>> = vec![None; n];
    for s in 0..n {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for &w in &adj[u] {
                match color[w] {
                    None => {
                        color[w] = Some(1 - cu);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cu => return None,
                    _ => {}
                }
            }
        }
    }
    Some(color.into_iter().map(Option::unwrap).collect())
}

/// Smallest `m ≤ n` with `8mn ≥ size`, as balanced as possible.
pub fn oddcycle_dimensions(size: usize) -> (usize, usize) {
    let prod = size.div_ceil(8).max(1);
    let m = (1..=prod).take_while(|m| m * m <= prod).filter(|m| prod % m == 0).last().unwrap_or(1);
    (m, prod / m)
}

/// Embeds a connected graph (all edges binary) into a two-player game of
/// size linear in the number of vertices.
///
/// Bipartite graphs with colour classes `U_1, U_2` go into the product of
/// `M` one-outcome questions with one binary question, `M = max |U_i|`;
/// `U_i` lands on `0(i-1)|x0`. Other graphs go into the CHSH-like game on
/// `2m` and `2n` binary questions, filled in label order.
pub fn build_graph_embedding(h: &Scenario, edge_budget: usize) -> Result<Embedding> {
    if let Some(e) = h.edges().iter().position(|e| e.len() != 2) {
        return Err(Error::NonBinaryEdge(h.edge_labels(e)));
    }
    if !h.is_connected() {
        return Err(Error::Disconnected);
    }
    match two_coloring(h) {
        Some(color) => {
            let sides: [Vec<usize>; 2] = [0u8, 1].map(|c| (0..h.vertex_count()).filter(|&v| color[v] == c).collect());
            let m = sides[0].len().max(sides[1].len());
            let a = build_party(m, 1)?.into_scenario();
            let b = build_party(1, 2)?.into_scenario();
            let product = fr_product_bipartite(&a, &b, edge_budget)?;
            let target = apply_rule(&product, &Rule::full(&product))?;
            let mut injection = vec![0; h.vertex_count()];
            for (side, members) in sides.iter().enumerate() {
                for (x, &v) in members.iter().enumerate() {
                    let label = product_label(&[&format!("0|{x}"), &format!("{side}|0")]);
                    injection[v] = target.index_of(&label).expect("product vertex");
                }
            }
            Ok(Embedding {
                target,
                injection,
                kind: ConstructionKind::GraphBipartite,
                edge_choice: None,
            })
        }
        None => {
            let (m, n) = oddcycle_dimensions(h.vertex_count());
            let a = build_party(2 * m, 2)?.into_scenario();
            let b = build_party(2 * n, 2)?.into_scenario();
            let product = fr_product_bipartite(&a, &b, edge_budget)?;
            let target = apply_rule(&product, &extended_chsh_rule(&product)?)?;
            Ok(Embedding {
                target,
                injection: (0..h.vertex_count()).collect(),
                kind: ConstructionKind::GraphOddcycle,
                edge_choice: None,
            })
        }
    }
}

/// The explicit extension used as a witness for each construction.
pub fn extension_witness(h: &Scenario, emb: &Embedding, p: &Model) -> Result<Model> {
    match emb.kind {
        ConstructionKind::Theorem41 => extend_model(h, emb, p),
        ConstructionKind::GraphOddcycle => Ok(Model::constant(emb.target.vertex_count(), Rational::new(1, 2))),
        ConstructionKind::GraphBipartite => {
            if !is_model(h, p)? {
                return Err(Error::NotAModel);
            }
            // Each colour class of the target is constant; anchor on the
            // image of source vertex 0.
            let color = two_coloring(&emb.target)
                .ok_or_else(|| Error::InvalidEmbedding("target is not bipartite".into()))?;
            let anchor = color[emb.injection[0]];
            let q = p.weight(0);
            let other = Rational::one() - q;
            Ok(Model::new(
                color
                    .iter()
                    .map(|&c| if c == anchor { q.clone() } else { other.clone() })
                    .collect(),
            ))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Refuted(Counterexample),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// A target model whose pullback misses normalization on `edge`.
    Restriction { edge: usize, target_model: Model },
    /// An extreme source model with no extension of the expected form.
    Extension { source_model: Model },
}

/// Range of `p_t(φ(e))` over all target models, for one source edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCertificate {
    pub edge: usize,
    pub min: Rational,
    pub max: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCertificate {
    pub source_model: Model,
    pub target_model: Model,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub verdict: Verdict,
    pub restriction: Vec<EdgeCertificate>,
    pub extension: Vec<ExtensionCertificate>,
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }

    pub fn to_json(&self, h: &Scenario, emb: &Embedding) -> VerificationJson {
        let counterexample = match &self.verdict {
            Verdict::Verified => None,
            Verdict::Refuted(Counterexample::Restriction { edge, target_model }) => Some(CounterexampleJson {
                direction: "restriction".into(),
                edge: Some(h.edge_labels(*edge)),
                model: target_model.to_json(&emb.target),
            }),
            Verdict::Refuted(Counterexample::Extension { source_model }) => Some(CounterexampleJson {
                direction: "extension".into(),
                edge: None,
                model: source_model.to_json(h),
            }),
        };
        VerificationJson {
            verdict: if self.is_verified() { "Verified" } else { "Refuted" }.into(),
            method: "restriction: min and max of the pulled-back weight of every source edge over \
                     the target polytope; extension: explicit witness for every extreme source model, \
                     which suffices by convexity"
                .into(),
            restriction: self
                .restriction
                .iter()
                .map(|c| EdgeCertificateJson {
                    edge: h.edge_labels(c.edge),
                    min: c.min.clone(),
                    max: c.max.clone(),
                })
                .collect(),
            extension: self
                .extension
                .iter()
                .map(|c| ExtensionCertificateJson {
                    source: c.source_model.to_json(h),
                    target: c.target_model.to_json(&emb.target),
                })
                .collect(),
            counterexample,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub verdict: String,
    pub method: String,
    pub restriction: Vec<EdgeCertificateJson>,
    pub extension: Vec<ExtensionCertificateJson>,
    pub counterexample: Option<CounterexampleJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCertificateJson {
    pub edge: Vec<String>,
    pub min: Rational,
    pub max: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionCertificateJson {
    pub source: ModelJson,
    pub target: ModelJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleJson {
    pub direction: String,
    pub edge: Option<Vec<String>>,
    pub model: ModelJson,
}

/// Decides whether `emb` is a conditional interpretation of `h`.
///
/// Restriction: every target model pulls back to a model of `h` exactly when
/// each source edge's image has weight 1 throughout the target polytope,
/// which two LPs per edge decide. Extension: every extreme model of `h` gets
/// the construction's explicit witness, checked exactly; convex combinations
/// of witnesses then cover all of `G(h)`.
pub fn verify_conditional(h: &Scenario, emb: &Embedding, vertex_budget: usize) -> Result<Verification> {
    emb.validate(h)?;
    let points = enumerate_model_vertices(h, vertex_budget)?.vertices;
    let poly = ModelPolytope::new(&emb.target);
    let mut restriction = Vec::new();
    let mut verdict = Verdict::Verified;
    if poly.is_nonempty() {
        for (i, e) in h.edges().iter().enumerate() {
            let image: Vec<usize> = e.iter().map(|&v| emb.injection[v]).collect();
            let lo = poly.optimize_weight(&image, crate::polytope::Direction::Min);
            let hi = poly.optimize_weight(&image, crate::polytope::Direction::Max);
            let (min, max) = (lo.optimum.expect("bounded"), hi.optimum.expect("bounded"));
            if verdict == Verdict::Verified && !(min.is_one() && max.is_one()) {
                let witness = if min.is_one() { hi.primal } else { lo.primal };
                verdict = Verdict::Refuted(Counterexample::Restriction {
                    edge: i,
                    target_model: Model::new(witness.expect("optimal")),
                });
            }
            restriction.push(EdgeCertificate { edge: i, min, max });
        }
    }
    let mut extension = Vec::new();
    for p in points {
        let witness = match extension_witness(h, emb, &p) {
            Ok(w) => Some(w),
            Err(Error::InvalidEmbedding(_)) => None,
            Err(e) => return Err(e),
        };
        let ok = witness.as_ref().is_some_and(|w| {
            is_model(&emb.target, w).unwrap_or(false)
                && emb.injection.iter().enumerate().all(|(v, &t)| w.weight(t) == p.weight(v))
        });
        match (ok, witness) {
            (true, Some(w)) => extension.push(ExtensionCertificate {
                source_model: p,
                target_model: w,
            }),
            _ => {
                if verdict == Verdict::Verified {
                    verdict = Verdict::Refuted(Counterexample::Extension { source_model: p });
                }
            }
        }
    }
    Ok(Verification {
        verdict,
        restriction,
        extension,
    })
}

/// Pulls a target model back along the injection.
pub fn compose(emb: &Embedding, target_model: &Model) -> Model {
    Model::new(emb.injection.iter().map(|&t| target_model.weight(t).clone()).collect())
}

/// Label lookup table from the clone game back to its origin `(v, e, v', e')`.
pub fn clone_origins(h: &Scenario) -> HashMap<String, (usize, usize, usize, usize)> {
    let mut out = HashMap::new();
    for e in 0..h.edge_count() {
        for f in 0..h.edge_count() {
            for (v, w) in standard_winners(h, e, f) {
                out.insert(pair_label(h, v, e, w, f), (v, e, w, f));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{EqualitySystem, Row};
    use crate::products::DEFAULT_EDGE_BUDGET;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn delta() -> Scenario {
        Scenario::new(["a", "b", "c"], [["a", "b"], ["b", "c"], ["a", "c"]]).unwrap()
    }

    fn delta3() -> Scenario {
        Scenario::new(
            ["0", "1", "2", "3", "4", "5"],
            [vec!["0", "1", "2"], vec!["1", "3", "4"], vec!["2", "4", "5"]],
        )
        .unwrap()
    }

    #[test]
    fn delta3_clone_game() {
        let h = delta3();
        let factor = clone_factor(&h).unwrap();
        assert_eq!(factor.scenario().vertex_count(), 9);
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        assert_eq!(emb.target.vertex_count(), 39);
        let images: Vec<&str> = emb.injection.iter().map(|&t| emb.target.label(t)).collect();
        assert_eq!(images, ["00|00", "11|00", "22|00", "33|11", "44|11", "55|22"]);
        assert!(verify_conditional(&h, &emb, 64).unwrap().is_verified());
    }

    #[test]
    fn single_edge_clone_game() {
        let h = Scenario::new(["a", "b"], [["a", "b"]]).unwrap();
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        assert_eq!(emb.target.vertices(), ["aa|00", "bb|00"]);
        let points = enumerate_model_vertices(&emb.target, 64).unwrap().vertices;
        assert_eq!(points.len(), 2);
        let ext = extend_model(&h, &emb, &Model::indicator(2, &[0])).unwrap();
        assert!(ext.is_deterministic());
    }

    #[test]
    fn extension_formula() {
        let h = delta3();
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        let p = Model::new(vec![q(0, 1), q(1, 2), q(1, 2), q(1, 2), q(0, 1), q(1, 2)]);
        let ext = extend_model(&h, &emb, &p).unwrap();
        assert!(is_model(&emb.target, &ext).unwrap());
        assert_eq!(compose(&emb, &ext), p);
        // Off-diagonal on edges 0 and 1 (shared vertex 1, weight 1/2):
        // p(0)p(3)/(1 - 1/2) = 0 and p(2)p(3)/(1/2) = 1/2.
        let at = |l: &str| ext.weight(emb.target.index_of(l).unwrap()).clone();
        assert_eq!(at("03|01"), q(0, 1));
        assert_eq!(at("23|01"), q(1, 2));
        assert_eq!(at("11|01"), q(1, 2));
        assert!(matches!(
            extend_model(&h, &emb, &Model::constant(6, q(1, 2))),
            Err(Error::NotAModel)
        ));
    }

    #[test]
    fn fully_weighted_intersection() {
        // Vertex 1 carries all the weight of both edges' intersection.
        let h = delta3();
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        let p = Model::new(vec![q(0, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);
        assert!(is_model(&h, &p).unwrap());
        let ext = extend_model(&h, &emb, &p).unwrap();
        assert!(is_model(&emb.target, &ext).unwrap());
        assert_eq!(ext.weight(emb.target.index_of("23|01").unwrap()), &q(0, 1));
    }

    #[test]
    fn clone_weight_equality() {
        let h = delta3();
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        let t = &emb.target;
        let rows: Vec<Row> = t.edges().iter().map(|e| Row::indicator(e, Rational::one())).collect();
        let sys = EqualitySystem::new(t.vertex_count(), rows);
        let choice = emb.edge_choice.clone().unwrap();
        for v in 0..h.vertex_count() {
            for &e in &h.incidence(v) {
                for &f in &h.incidence(v) {
                    let mut c = vec![Rational::zero(); t.vertex_count()];
                    c[t.index_of(&pair_label(&h, v, e, v, f)).unwrap()] += Rational::one();
                    c[emb.injection[v]] -= Rational::one();
                    assert_eq!(sys.minimize(&c).optimum, Some(Rational::zero()));
                    assert_eq!(sys.maximize(&c).optimum, Some(Rational::zero()));
                }
            }
            assert!(h.edges()[choice[v]].contains(&v));
        }
    }

    #[test]
    fn graph_cases() {
        let path = Scenario::new(["a", "b", "c"], [["a", "b"], ["b", "c"]]).unwrap();
        let emb = build_graph_embedding(&path, DEFAULT_EDGE_BUDGET).unwrap();
        assert_eq!(emb.kind, ConstructionKind::GraphBipartite);
        let images: Vec<&str> = emb.injection.iter().map(|&t| emb.target.label(t)).collect();
        assert_eq!(images, ["00|00", "01|00", "00|10"]);
        assert!(verify_conditional(&path, &emb, 64).unwrap().is_verified());

        let tri = build_graph_embedding(&delta(), DEFAULT_EDGE_BUDGET).unwrap();
        assert_eq!(tri.kind, ConstructionKind::GraphOddcycle);
        assert_eq!(tri.target.vertex_count(), 8);
        let points = enumerate_model_vertices(&tri.target, 64).unwrap().vertices;
        assert_eq!(points, vec![Model::constant(8, q(1, 2))]);
        let report = verify_conditional(&delta(), &tri, 64).unwrap();
        assert!(report.is_verified());
        assert_eq!(report.extension.len(), 1);

        let edge = Scenario::new(["a", "b"], [["a", "b"]]).unwrap();
        let e = build_graph_embedding(&edge, DEFAULT_EDGE_BUDGET).unwrap();
        assert_eq!(e.target.vertex_count(), 2);

        let hyper = Scenario::new(["a", "b", "c"], [["a", "b", "c"]]).unwrap();
        assert!(matches!(build_graph_embedding(&hyper, 100), Err(Error::NonBinaryEdge(_))));
        let split = Scenario::new(["a", "b", "c", "d"], [["a", "b"], ["c", "d"]]).unwrap();
        assert_eq!(build_graph_embedding(&split, 100), Err(Error::Disconnected));
    }

    #[test]
    fn oddcycle_sizes() {
        assert_eq!(oddcycle_dimensions(3), (1, 1));
        assert_eq!(oddcycle_dimensions(8), (1, 1));
        assert_eq!(oddcycle_dimensions(9), (1, 2));
        assert_eq!(oddcycle_dimensions(25), (2, 2));
        assert_eq!(oddcycle_dimensions(41), (2, 3));
    }

    #[test]
    fn corrupted_injection_refuted() {
        let h = delta3();
        let mut emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        emb.injection.swap(0, 3);
        emb.edge_choice = None;
        let report = verify_conditional(&h, &emb, 64).unwrap();
        let Verdict::Refuted(Counterexample::Restriction { edge, target_model }) = report.verdict else {
            panic!("expected a restriction counterexample");
        };
        assert!(is_model(&emb.target, &target_model).unwrap());
        assert!(!compose(&emb, &target_model).mass(&h.edges()[edge]).is_one());
    }

    #[test]
    fn json_round_trip() {
        let h = delta3();
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        let json = serde_json::to_string(&emb.to_json(&h)).unwrap();
        let back: EmbeddingJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_embedding(&h).unwrap(), emb);
    }

    #[test]
    fn invalid_edge_choice() {
        let h = delta3();
        let bad = vec![1, 0, 0, 1, 1, 2];
        assert!(matches!(build_theorem41(&h, Some(&bad), DEFAULT_EDGE_BUDGET), Err(Error::InvalidEmbedding(_))));
        let empty = Scenario::new(["a", "b"], [vec!["a"], vec!["b"], vec!["a", "b"]]).unwrap();
        assert_eq!(build_theorem41(&empty, None, DEFAULT_EDGE_BUDGET), Err(Error::EmptyModelSet));
    }

    #[test]
    fn origins_cover_target() {
        let h = delta3();
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        let origins = clone_origins(&h);
        assert_eq!(origins.len(), emb.target.vertex_count());
        for l in emb.target.vertices() {
            assert!(origins.contains_key(l));
        }
    }
}

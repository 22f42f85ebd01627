//! Foulis-Randall products, questions, rules and games.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::rational::Rational;
use crate::reductions::{enumerate_virtual_edges, ReductionBudget};
use crate::scenario::{RawScenario, Scenario};

/// Generated (pre-merge) joint-measurement edges allowed per product.
pub const DEFAULT_EDGE_BUDGET: usize = 100_000;

/// Which family of edges produced a product edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeOrigin {
    /// A pure product of factor edges.
    Question,
    /// A joint measurement in which party `i` adapts to the others' outcomes.
    Party(usize),
    /// Added by completion.
    Virtual,
}

impl fmt::Display for EdgeOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeOrigin::Question => f.write_str("question"),
            EdgeOrigin::Party(i) => write!(f, "party:{i}"),
            EdgeOrigin::Virtual => f.write_str("virtual"),
        }
    }
}

impl FromStr for EdgeOrigin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "question" => Ok(EdgeOrigin::Question),
            "virtual" => Ok(EdgeOrigin::Virtual),
            _ => s
                .strip_prefix("party:")
                .and_then(|i| i.parse().ok())
                .map(EdgeOrigin::Party)
                .ok_or_else(|| Error::Parse(format!("unknown edge origin {s:?}"))),
        }
    }
}

impl Serialize for EdgeOrigin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgeOrigin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A product scenario together with the factor structure it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductScenario {
    scenario: Scenario,
    factors: Vec<Scenario>,
    tuples: Vec<Vec<usize>>,
    by_tuple: HashMap<Vec<usize>, usize>,
    edge_origin: Vec<EdgeOrigin>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductJson {
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<String>>,
    pub factors: Vec<RawScenario>,
    pub edge_origin: Vec<EdgeOrigin>,
}

/// A pure product edge `e_1 × ... × e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Question {
    /// One edge index per factor.
    pub factor_edges: Vec<usize>,
    /// Product vertices, sorted.
    pub vertices: Vec<usize>,
}

impl Question {
    /// Serialized id: factor-edge indices joined by commas.
    pub fn id(&self) -> String {
        question_id(&self.factor_edges)
    }
}

fn question_id(edges: &[usize]) -> String {
    edges.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Joins factor labels. `a|x` and `b|y` become `ab|xy` when every part is a
/// single character and `a,b|x,y` otherwise; labels without exactly one `|`
/// are joined as `(a,b)`.
pub fn product_label(labels: &[&str]) -> String {
    let split: Option<Vec<(&str, &str)>> = labels
        .iter()
        .map(|l| l.split_once('|').filter(|(_, q)| !q.contains('|')))
        .collect();
    match split {
        Some(parts) => {
            let single = parts
                .iter()
                .all(|(a, x)| a.chars().count() == 1 && x.chars().count() == 1);
            let sep = if single { "" } else { "," };
            let outcomes: Vec<&str> = parts.iter().map(|p| p.0).collect();
            let questions: Vec<&str> = parts.iter().map(|p| p.1).collect();
            format!("{}|{}", outcomes.join(sep), questions.join(sep))
        }
        None => format!("({})", labels.join(",")),
    }
}

/// Iterates over all tuples in `ranges[0] × ranges[1] × ...` in lexicographic order.
fn for_each_tuple<T: Copy>(ranges: &[&[T]], mut f: impl FnMut(&[T])) {
    if ranges.iter().any(|r| r.is_empty()) {
        return;
    }
    let mut pos = vec![0; ranges.len()];
    let mut cur: Vec<T> = ranges.iter().map(|r| r[0]).collect();
    loop {
        f(&cur);
        let mut k = ranges.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < ranges[k].len() {
                cur[k] = ranges[k][pos[k]];
                break;
            }
            pos[k] = 0;
            cur[k] = ranges[k][0];
        }
    }
}

fn check_factors(factors: &[Scenario]) -> Result<()> {
    if factors.len() < 2 {
        return Err(Error::InvalidProduct(format!(
            "a product needs at least two factors, got {}",
            factors.len()
        )));
    }
    Ok(())
}

/// Number of edges `joint_measurement_edges` would generate, saturating.
fn joint_edge_count(factors: &[Scenario], i: usize) -> usize {
    let base = factors[i].edge_count();
    let mut total: usize = 0;
    let others: Vec<&[Vec<usize>]> = factors
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, h)| h.edges())
        .collect();
    let choice_ranges: Vec<Vec<usize>> = others.iter().map(|e| (0..e.len()).collect()).collect();
    let refs: Vec<&[usize]> = choice_ranges.iter().map(Vec::as_slice).collect();
    for_each_tuple(&refs, |choice| {
        let contexts = choice
            .iter()
            .zip(&others)
            .try_fold(1usize, |acc, (&c, edges)| acc.checked_mul(edges[c].len()));
        let count = contexts
            .and_then(|c| u32::try_from(c).ok())
            .and_then(|c| base.checked_pow(c))
            .unwrap_or(usize::MAX);
        total = total.saturating_add(count);
    });
    total
}

/// Joint-measurement edges in which party `i` picks its measurement as a
/// function of the other parties' outcomes. Each edge is a sorted list of
/// vertex tuples (one factor vertex index per party); duplicates are merged.
///
/// For every choice of edges `(e_j)_{j≠i}` and every `f: ∏ e_j → E_i`, the
/// edge is `{(v_1..v_k) : v_j ∈ e_j, v_i ∈ f((v_j)_{j≠i})}`.
pub fn joint_measurement_edges(
    factors: &[Scenario],
    i: usize,
    budget: usize,
) -> Result<Vec<Vec<Vec<usize>>>> {
    check_factors(factors)?;
    if i >= factors.len() {
        return Err(Error::InvalidProduct(format!("no party {i}")));
    }
    let generated = joint_edge_count(factors, i);
    if generated > budget {
        return Err(Error::SizeBudgetExceeded { generated, budget });
    }
    let own = factors[i].edges();
    let others: Vec<usize> = (0..factors.len()).filter(|&j| j != i).collect();
    let choice_ranges: Vec<Vec<usize>> = others
        .iter()
        .map(|&j| (0..factors[j].edge_count()).collect())
        .collect();
    let refs: Vec<&[usize]> = choice_ranges.iter().map(Vec::as_slice).collect();
    let mut out: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
    for_each_tuple(&refs, |choice| {
        let edge_refs: Vec<&[usize]> = others
            .iter()
            .zip(choice)
            .map(|(&j, &c)| factors[j].edges()[c].as_slice())
            .collect();
        let mut contexts: Vec<Vec<usize>> = Vec::new();
        for_each_tuple(&edge_refs, |ctx| contexts.push(ctx.to_vec()));
        // Odometer over functions contexts → own edges.
        let mut f = vec![0usize; contexts.len()];
        loop {
            let mut edge: Vec<Vec<usize>> = Vec::new();
            for (ctx, &target) in contexts.iter().zip(&f) {
                for &vi in &own[target] {
                    let mut t = ctx.clone();
                    t.insert(i, vi);
                    edge.push(t);
                }
            }
            edge.sort();
            out.insert(edge);
            let mut k = f.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                f[k] += 1;
                if f[k] < own.len() {
                    break;
                }
                f[k] = 0;
            }
        }
    });
    Ok(out.into_iter().collect())
}

impl ProductScenario {
    fn assemble(factors: Vec<Scenario>, edges: BTreeMap<Vec<Vec<usize>>, EdgeOrigin>) -> Result<Self> {
        let ranges: Vec<Vec<usize>> = factors.iter().map(|h| (0..h.vertex_count()).collect()).collect();
        let refs: Vec<&[usize]> = ranges.iter().map(Vec::as_slice).collect();
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        for_each_tuple(&refs, |t| tuples.push(t.to_vec()));
        let labels: Vec<String> = tuples
            .iter()
            .map(|t| {
                let parts: Vec<&str> = t.iter().zip(&factors).map(|(&v, h)| h.label(v)).collect();
                product_label(&parts)
            })
            .collect();
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        let position: HashMap<&Vec<usize>, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let indexed: Vec<(Vec<usize>, EdgeOrigin)> = edges
            .iter()
            .map(|(e, o)| (e.iter().map(|t| position[t]).collect(), *o))
            .collect();
        let raw_edges: Vec<Vec<usize>> = indexed.iter().map(|(e, _)| e.clone()).collect();
        let scenario = Scenario::from_indexed(labels.clone(), &raw_edges)?;
        let final_index: Vec<usize> = labels
            .iter()
            .map(|l| scenario.index_of(l).expect("label present"))
            .collect();
        let mut ordered_tuples = vec![Vec::new(); tuples.len()];
        for (old, t) in tuples.into_iter().enumerate() {
            ordered_tuples[final_index[old]] = t;
        }
        let mut origin: Vec<Option<EdgeOrigin>> = vec![None; scenario.edge_count()];
        for (e, o) in indexed {
            let mut mapped: Vec<usize> = e.iter().map(|&v| final_index[v]).collect();
            mapped.sort_unstable();
            let pos = scenario.edge_position(&mapped).expect("edge present");
            origin[pos] = Some(origin[pos].map_or(o, |prev| prev.min(o)));
        }
        let by_tuple = ordered_tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(ProductScenario {
            scenario,
            factors,
            tuples: ordered_tuples,
            by_tuple,
            edge_origin: origin.into_iter().map(|o| o.expect("origin recorded")).collect(),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn factors(&self) -> &[Scenario] {
        &self.factors
    }

    pub fn party_count(&self) -> usize {
        self.factors.len()
    }

    /// Factor vertex indices of product vertex `v`.
    pub fn tuple(&self, v: usize) -> &[usize] {
        &self.tuples[v]
    }

    pub fn vertex_of(&self, tuple: &[usize]) -> Option<usize> {
        self.by_tuple.get(tuple).copied()
    }

    pub fn edge_origin(&self) -> &[EdgeOrigin] {
        &self.edge_origin
    }

    /// Adds every virtual edge of the product, tagged [`EdgeOrigin::Virtual`].
    pub fn complete(&self, budget: ReductionBudget) -> Result<ProductScenario> {
        let extra = enumerate_virtual_edges(&self.scenario, budget)?;
        let mut edges: BTreeMap<Vec<Vec<usize>>, EdgeOrigin> = BTreeMap::new();
        for (e, &o) in self.scenario.edges().iter().zip(&self.edge_origin) {
            edges.insert(self.tuples_of(e), o);
        }
        for e in extra {
            edges.entry(self.tuples_of(&e)).or_insert(EdgeOrigin::Virtual);
        }
        ProductScenario::assemble(self.factors.clone(), edges)
    }

    fn tuples_of(&self, e: &[usize]) -> Vec<Vec<usize>> {
        let mut t: Vec<Vec<usize>> = e.iter().map(|&v| self.tuples[v].clone()).collect();
        t.sort();
        t
    }

    pub fn to_json(&self) -> ProductJson {
        let raw = self.scenario.to_raw();
        ProductJson {
            vertices: raw.vertices,
            edges: raw.edges,
            factors: self.factors.iter().map(Scenario::to_raw).collect(),
            edge_origin: self.edge_origin.clone(),
        }
    }
}

/// Minimal Foulis-Randall product: all parties' joint-measurement edges.
pub fn fr_product_min(factors: &[Scenario], budget: usize) -> Result<ProductScenario> {
    check_factors(factors)?;
    let mut generated = 0usize;
    for i in 0..factors.len() {
        generated = generated.saturating_add(joint_edge_count(factors, i));
    }
    if generated > budget {
        return Err(Error::SizeBudgetExceeded { generated, budget });
    }
    // Few edges can still span a huge vertex set.
    let vertices = factors
        .iter()
        .try_fold(1usize, |acc, h| acc.checked_mul(h.vertex_count()))
        .unwrap_or(usize::MAX);
    if vertices > budget {
        return Err(Error::BudgetExceeded {
            what: "product vertices",
            size: vertices,
            budget,
        });
    }
    let mut edges: BTreeMap<Vec<Vec<usize>>, EdgeOrigin> = BTreeMap::new();
    for i in 0..factors.len() {
        for e in joint_measurement_edges(factors, i, budget)? {
            let origin = if is_rectangle(&e, factors.len()) {
                EdgeOrigin::Question
            } else {
                EdgeOrigin::Party(i)
            };
            let slot = edges.entry(e).or_insert(origin);
            *slot = (*slot).min(origin);
        }
    }
    ProductScenario::assemble(factors.to_vec(), edges)
}

/// Whether a set of tuples equals the product of its coordinate projections.
fn is_rectangle(edge: &[Vec<usize>], k: usize) -> bool {
    let size: usize = (0..k)
        .map(|j| edge.iter().map(|t| t[j]).collect::<BTreeSet<_>>().len())
        .product();
    size == edge.len()
}

pub fn fr_product_bipartite(a: &Scenario, b: &Scenario, budget: usize) -> Result<ProductScenario> {
    fr_product_min(&[a.clone(), b.clone()], budget)
}

/// Minimal product followed by completion.
pub fn fr_product_complete(
    factors: &[Scenario],
    edge_budget: usize,
    budget: ReductionBudget,
) -> Result<ProductScenario> {
    fr_product_min(factors, edge_budget)?.complete(budget)
}

/// Every question, ordered by factor-edge tuple.
pub fn questions(p: &ProductScenario) -> Vec<Question> {
    let ranges: Vec<Vec<usize>> = p.factors.iter().map(|h| (0..h.edge_count()).collect()).collect();
    let refs: Vec<&[usize]> = ranges.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    for_each_tuple(&refs, |choice| {
        let edge_refs: Vec<&[usize]> = choice
            .iter()
            .zip(&p.factors)
            .map(|(&c, h)| h.edges()[c].as_slice())
            .collect();
        let mut vertices = Vec::new();
        for_each_tuple(&edge_refs, |t| vertices.push(p.vertex_of(t).expect("product vertex")));
        vertices.sort_unstable();
        out.push(Question {
            factor_edges: choice.to_vec(),
            vertices,
        });
    });
    out
}

/// Winning outcomes per question, keyed by question id, as vertex labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rule(pub BTreeMap<String, Vec<String>>);

impl Rule {
    /// Keeps the vertices of each question accepted by `wins`, which sees
    /// the question's factor edges and the vertex's factor tuple.
    pub fn from_predicate(p: &ProductScenario, mut wins: impl FnMut(&[usize], &[usize]) -> bool) -> Rule {
        let mut map = BTreeMap::new();
        for q in questions(p) {
            let labels = q
                .vertices
                .iter()
                .filter(|&&v| wins(&q.factor_edges, p.tuple(v)))
                .map(|&v| p.scenario().label(v).to_string())
                .collect();
            map.insert(q.id(), labels);
        }
        Rule(map)
    }

    /// `r(e) = e` for every question.
    pub fn full(p: &ProductScenario) -> Rule {
        Rule::from_predicate(p, |_, _| true)
    }
}

/// `a ⊕ b = [x odd ∧ y odd]` on two factors labelled `a|x` with binary
/// outcomes: CHSH on `B_{2,2,2}`, and its extension to more questions.
pub fn extended_chsh_rule(p: &ProductScenario) -> Result<Rule> {
    if p.party_count() != 2 {
        return Err(Error::InvalidProduct("the CHSH rule needs exactly two parties".into()));
    }
    let parse = |h: &Scenario, v: usize| -> Result<(u64, u64)> {
        let label = h.label(v);
        label
            .split_once('|')
            .and_then(|(a, x)| Some((a.parse().ok()?, x.parse().ok()?)))
            .ok_or_else(|| Error::InvalidProduct(format!("label {label:?} is not of the form a|x")))
    };
    let mut coords = Vec::with_capacity(p.scenario().vertex_count());
    for v in 0..p.scenario().vertex_count() {
        let t = p.tuple(v);
        let (a, x) = parse(&p.factors[0], t[0])?;
        let (b, y) = parse(&p.factors[1], t[1])?;
        if a > 1 || b > 1 {
            return Err(Error::InvalidProduct("the CHSH rule needs binary outcomes".into()));
        }
        coords.push((a, x, b, y));
    }
    Ok(Rule::from_predicate(p, |_, t| {
        let v = p.vertex_of(t).expect("product vertex");
        let (a, x, b, y) = coords[v];
        (a ^ b) == (x & y & 1)
    }))
}

/// The game `P_{W_r}` with `W_r` the union of the winning sets.
pub fn apply_rule(p: &ProductScenario, r: &Rule) -> Result<Scenario> {
    let qs = questions(p);
    let ids: BTreeSet<String> = qs.iter().map(Question::id).collect();
    let keys: BTreeSet<String> = r.0.keys().cloned().collect();
    if ids != keys {
        let missing: Vec<&String> = ids.difference(&keys).collect();
        let extra: Vec<&String> = keys.difference(&ids).collect();
        return Err(Error::RuleDomainMismatch(format!("missing {missing:?}, unexpected {extra:?}")));
    }
    let mut winners = BTreeSet::new();
    for q in &qs {
        let id = q.id();
        let win = p.scenario().indices_of(&r.0[&id])?;
        if win.iter().any(|v| q.vertices.binary_search(v).is_err()) {
            return Err(Error::WinningSetNotSubset(id));
        }
        winners.extend(win);
    }
    let w: Vec<usize> = winners.into_iter().collect();
    Ok(p.scenario().induced_subhypergraph(&w)?.scenario)
}

/// A failed no-signaling equation: party `party`'s measurements `edges`
/// give different marginals to the other parties' joint outcome `context`
/// (one `(factor edge, factor vertex)` pair per other party, in party order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalingViolation {
    pub party: usize,
    pub edges: (usize, usize),
    pub context: Vec<(usize, usize)>,
    pub marginals: (Rational, Rational),
}

/// Checks that no party's measurement choice changes the others' marginals.
pub fn check_no_signaling(p: &ProductScenario, m: &Model) -> Result<Vec<SignalingViolation>> {
    if m.len() != p.scenario().vertex_count() {
        return Err(Error::DomainMismatch(format!(
            "{} weights for {} vertices",
            m.len(),
            p.scenario().vertex_count()
        )));
    }
    let k = p.party_count();
    let mut out = Vec::new();
    for i in 0..k {
        let own = p.factors[i].edges();
        let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
        let choice_ranges: Vec<Vec<usize>> = others
            .iter()
            .map(|&j| (0..p.factors[j].edge_count()).collect())
            .collect();
        let refs: Vec<&[usize]> = choice_ranges.iter().map(Vec::as_slice).collect();
        for_each_tuple(&refs, |choice| {
            let edge_refs: Vec<&[usize]> = others
                .iter()
                .zip(choice)
                .map(|(&j, &c)| p.factors[j].edges()[c].as_slice())
                .collect();
            for_each_tuple(&edge_refs, |ctx| {
                let marginal = |e: usize| -> Rational {
                    own[e]
                        .iter()
                        .map(|&vi| {
                            let mut t = ctx.to_vec();
                            t.insert(i, vi);
                            m.weight(p.vertex_of(&t).expect("product vertex")).clone()
                        })
                        .sum()
                };
                let marginals: Vec<Rational> = (0..own.len()).map(marginal).collect();
                for e1 in 0..own.len() {
                    for e2 in e1 + 1..own.len() {
                        if marginals[e1] != marginals[e2] {
                            out.push(SignalingViolation {
                                party: i,
                                edges: (e1, e2),
                                context: choice.iter().copied().zip(ctx.iter().copied()).collect(),
                                marginals: (marginals[e1].clone(), marginals[e2].clone()),
                            });
                        }
                    }
                }
            });
        });
    }
    Ok(out)
}

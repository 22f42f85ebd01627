//! Contextuality scenarios: hypergraphs whose edges are measurements and whose
//! vertices are outcomes.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;

/// Unvalidated scenario as it appears on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<String>>,
}

/// A hypergraph with no isolated vertex.
///
/// Vertices are kept in lexicographic label order and every edge is a sorted
/// list of vertex indices; the edge list itself is sorted and duplicate-free.
/// Since indices follow label order, sorting index lists sorts edges
/// lexicographically by their labels as well.
#[derive(Clone, PartialEq, Eq)]
pub struct Scenario {
    vertices: Vec<String>,
    edges: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

/// A pair of edges where the first is strictly contained in the second.
/// Every vertex of the difference is forced to weight zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedEdgeLint {
    pub inner: usize,
    pub outer: usize,
}

/// Result of restricting a scenario to a vertex subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Induced {
    pub scenario: Scenario,
    /// Some original edge missed the subset entirely. Such an edge cannot be
    /// normalized, so the restriction has no model that extends by zero.
    pub empty_induced_edge: bool,
}

pub fn validate_scenario(raw: &RawScenario) -> Result<Scenario> {
    Scenario::new(raw.vertices.iter().cloned(), raw.edges.iter().map(|e| e.iter().cloned()))
}

impl Scenario {
    pub fn new<V, E, L>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = L>,
        L: IntoIterator,
        L::Item: Into<String>,
    {
        let mut labels: Vec<String> = vertices.into_iter().map(Into::into).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0].clone()));
        }
        let index: HashMap<String, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let mut edge_set = BTreeSet::new();
        for edge in edges {
            let mut ids = Vec::new();
            for label in edge {
                let label = label.into();
                let id = *index
                    .get(&label)
                    .ok_or_else(|| Error::UnknownVertexInEdge(label.clone()))?;
                ids.push(id);
            }
            if ids.is_empty() {
                return Err(Error::EmptyEdge);
            }
            ids.sort_unstable();
            ids.dedup();
            edge_set.insert(ids);
        }
        let edges: Vec<Vec<usize>> = edge_set.into_iter().collect();
        let mut covered = vec![false; labels.len()];
        for e in &edges {
            for &v in e {
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::IsolatedVertex(labels[v].clone()));
        }
        Ok(Scenario {
            vertices: labels,
            edges,
            index,
        })
    }

    /// Builds from labels and edges given as positions in `labels`, which
    /// need not be sorted. Same validation as [`Scenario::new`].
    pub fn from_indexed(labels: Vec<String>, edges: &[Vec<usize>]) -> Result<Self> {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        let mut rank = vec![0; labels.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let mut sorted: Vec<String> = order.iter().map(|&i| labels[i].clone()).collect();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateLabel(w[0].clone()));
        }
        let mut edge_set = BTreeSet::new();
        let mut covered = vec![false; labels.len()];
        for e in edges {
            let mut ids = Vec::with_capacity(e.len());
            for &v in e {
                let r = *rank
                    .get(v)
                    .ok_or_else(|| Error::UnknownVertexInEdge(format!("#{v}")))?;
                covered[r] = true;
                ids.push(r);
            }
            if ids.is_empty() {
                return Err(Error::EmptyEdge);
            }
            ids.sort_unstable();
            ids.dedup();
            edge_set.insert(ids);
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::IsolatedVertex(sorted.swap_remove(v)));
        }
        let index = sorted.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Ok(Scenario {
            vertices: sorted,
            edges: edge_set.into_iter().collect(),
            index,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = labels
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| Error::UnknownVertex(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn edge_labels(&self, e: usize) -> Vec<String> {
        self.labels_of(&self.edges[e])
    }

    pub fn labels_of(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    pub fn edge_position(&self, edge: &[usize]) -> Option<usize> {
        self.edges.binary_search_by(|e| e.as_slice().cmp(edge)).ok()
    }

    /// Indices of the edges containing `v`, ascending.
    pub fn incidence(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].binary_search(&v).is_ok())
            .collect()
    }

    pub fn incidence_table(&self) -> Vec<Vec<usize>> {
        let mut table = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                table[v].push(i);
            }
        }
        table
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_raw(&self) -> RawScenario {
        RawScenario {
            vertices: self.vertices.clone(),
            edges: (0..self.edges.len()).map(|e| self.edge_labels(e)).collect(),
        }
    }

    /// Same vertices with additional edges (given as index lists).
    pub fn with_extra_edges(&self, extra: &[Vec<usize>]) -> Scenario {
        let mut set: BTreeSet<Vec<usize>> = self.edges.iter().cloned().collect();
        for e in extra {
            let mut e = e.clone();
            e.sort_unstable();
            e.dedup();
            assert!(!e.is_empty(), "empty extra edge");
            set.insert(e);
        }
        Scenario {
            vertices: self.vertices.clone(),
            edges: set.into_iter().collect(),
            index: self.index.clone(),
        }
    }

    /// Same vertices, only the edges selected by `keep`. Fails if a vertex
    /// would become isolated.
    pub fn with_edge_subset(&self, keep: &[usize]) -> Result<Scenario> {
        let edges: Vec<Vec<String>> = keep.iter().map(|&e| self.edge_labels(e)).collect();
        Scenario::new(self.vertices.iter().cloned(), edges)
    }

    /// Pairs of edges `(e1, e2)` with `e1` a strict subset of `e2`.
    pub fn nested_edges(&self) -> Vec<NestedEdgeLint> {
        let mut out = Vec::new();
        for (i, a) in self.edges.iter().enumerate() {
            for (j, b) in self.edges.iter().enumerate() {
                if i != j && a.len() < b.len() && a.iter().all(|v| b.binary_search(v).is_ok()) {
                    out.push(NestedEdgeLint { inner: i, outer: j });
                }
            }
        }
        out
    }

    /// Restriction `H_W = (W, {e ∩ W})`, with duplicate and empty induced edges
    /// dropped.
    pub fn induced_subhypergraph(&self, subset: &[usize]) -> Result<Induced> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut keep = vec![false; self.vertices.len()];
        for &v in subset {
            if v >= self.vertices.len() {
                return Err(Error::UnknownVertex(format!("#{v}")));
            }
            keep[v] = true;
        }
        let mut empty_induced_edge = false;
        let mut edges = Vec::new();
        for e in &self.edges {
            let part: Vec<&str> = e
                .iter()
                .filter(|&&v| keep[v])
                .map(|&v| self.vertices[v].as_str())
                .collect();
            if part.is_empty() {
                empty_induced_edge = true;
            } else {
                edges.push(part);
            }
        }
        let labels = (0..self.vertices.len())
            .filter(|&v| keep[v])
            .map(|v| self.vertices[v].as_str());
        Ok(Induced {
            scenario: Scenario::new(labels, edges)?,
            empty_induced_edge,
        })
    }

    pub fn induced_by_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Induced> {
        let ids = self.indices_of(labels)?;
        self.induced_subhypergraph(&ids)
    }

    /// Unordered pairs `(u, v)`, `u < v`, sharing an edge.
    pub fn orthogonality_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for e in &self.edges {
            for (i, &u) in e.iter().enumerate() {
                for &v in &e[i + 1..] {
                    out.insert((u, v));
                }
            }
        }
        out
    }

    pub fn orthogonality_adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.vertices.len()];
        for (u, v) in self.orthogonality_pairs() {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let incidence = self.incidence_table();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &incidence[v] {
                for &w in &self.edges[e] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Every 0/1 model with exactly one unit vertex per edge, by backtracking
    /// over the edges in order.
    pub fn enumerate_deterministic_models(&self) -> Vec<Model> {
        let mut assignment: Vec<Option<bool>> = vec![None; self.vertices.len()];
        let mut out = Vec::new();
        self.deterministic_search(0, &mut assignment, &mut out);
        out.sort();
        out
    }

    fn deterministic_search(
        &self,
        edge: usize,
        assignment: &mut Vec<Option<bool>>,
        out: &mut Vec<Model>,
    ) {
        if edge == self.edges.len() {
            let support: Vec<usize> = (0..assignment.len())
                .filter(|&v| assignment[v] == Some(true))
                .collect();
            out.push(Model::indicator(assignment.len(), &support));
            return;
        }
        let e = &self.edges[edge];
        let ones = e.iter().filter(|&&v| assignment[v] == Some(true)).count();
        let free: Vec<usize> = e.iter().copied().filter(|&v| assignment[v].is_none()).collect();
        match ones {
            0 => {
                for &chosen in &free {
                    for &v in &free {
                        assignment[v] = Some(v == chosen);
                    }
                    self.deterministic_search(edge + 1, assignment, out);
                }
                for &v in &free {
                    assignment[v] = None;
                }
            }
            1 => {
                for &v in &free {
                    assignment[v] = Some(false);
                }
                self.deterministic_search(edge + 1, assignment, out);
                for &v in &free {
                    assignment[v] = None;
                }
            }
            _ => {}
        }
    }
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("vertices", &self.vertices)
            .field(
                "edges",
                &(0..self.edges.len()).map(|e| self.edge_labels(e)).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// A single party's scenario: pairwise disjoint edges, one per question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyScenario(Scenario);

impl PartyScenario {
    pub fn scenario(&self) -> &Scenario {
        &self.0
    }

    pub fn into_scenario(self) -> Scenario {
        self.0
    }
}

impl TryFrom<Scenario> for PartyScenario {
    type Error = Error;

    fn try_from(s: Scenario) -> Result<Self> {
        let mut seen = vec![false; s.vertex_count()];
        for e in s.edges() {
            for &v in e {
                if seen[v] {
                    return Err(Error::InvalidProduct(format!(
                        "vertex {:?} lies in two measurements of a party scenario",
                        s.label(v)
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(PartyScenario(s))
    }
}

impl AsRef<Scenario> for PartyScenario {
    fn as_ref(&self) -> &Scenario {
        &self.0
    }
}

/// `m` disjoint measurements with `d` outcomes each, labelled `a|x`.
pub fn build_party(m: usize, d: usize) -> Result<PartyScenario> {
    if m == 0 || d == 0 {
        return Err(Error::ZeroCount);
    }
    let edges: Vec<Vec<String>> = (0..m)
        .map(|x| (0..d).map(|a| format!("{a}|{x}")).collect())
        .collect();
    let vertices = edges.iter().flatten().cloned().collect::<Vec<_>>();
    Ok(PartyScenario(Scenario::new(vertices, edges)?))
}

//! Golden fixtures: scenarios paired with exactly known answers.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelJson;
use crate::polytope::enumerate_model_vertices;
use crate::products::{apply_rule, extended_chsh_rule, fr_product_min, Rule, DEFAULT_EDGE_BUDGET};
use crate::reductions::{enumerate_virtual_edges, zero_weighted_vertices, ReductionBudget};
use crate::scenario::{build_party, validate_scenario, RawScenario, Scenario};

/// Largest party scenario a fixture may request.
pub const MAX_PARTY_VERTICES: usize = 4096;

/// A game built from party scenarios `B_{1,m,d}` and a named rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    /// `(m, d)` per party.
    pub parties: Vec<(usize, usize)>,
    /// `"chsh"` or `"full"`.
    pub rule: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extreme_points: Option<Vec<ModelJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extreme_point_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deterministic_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_vertices: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub virtual_edges: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<RawScenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameSpec>,
    pub expected: Expected,
}

impl Fixture {
    pub fn build(&self) -> Result<Scenario> {
        match (&self.scenario, &self.game) {
            (Some(raw), None) => validate_scenario(raw),
            (None, Some(game)) => {
                if let Some(&(m, d)) = game.parties.iter().find(|&&(m, d)| m.saturating_mul(d) > MAX_PARTY_VERTICES) {
                    return Err(Error::BudgetExceeded {
                        what: "party vertices",
                        size: m.saturating_mul(d),
                        budget: MAX_PARTY_VERTICES,
                    });
                }
                let factors = game
                    .parties
                    .iter()
                    .map(|&(m, d)| build_party(m, d).map(|p| p.into_scenario()))
                    .collect::<Result<Vec<_>>>()?;
                let product = fr_product_min(&factors, DEFAULT_EDGE_BUDGET)?;
                let rule = match game.rule.as_str() {
                    "chsh" => extended_chsh_rule(&product)?,
                    "full" => Rule::full(&product),
                    other => return Err(Error::Parse(format!("unknown rule {other:?}"))),
                };
                apply_rule(&product, &rule)
            }
            _ => Err(Error::Parse("a fixture needs exactly one of scenario or game".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub name: String,
    pub checks: Vec<CheckOutcome>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub fixtures: Vec<FixtureReport>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.fixtures.iter().all(FixtureReport::passed)
    }

    /// One line per check, `PASS`/`FAIL` first.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for f in &self.fixtures {
            for c in &f.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                out.push_str(&format!("{status}  {:<24} {}", f.name, c.check));
                if let Some(d) = &c.detail {
                    out.push_str(&format!("  ({d})"));
                }
                out.push('\n');
            }
        }
        out
    }

    /// The first failure as an error, if any.
    pub fn into_result(self) -> Result<CorpusReport> {
        for f in &self.fixtures {
            if let Some(c) = f.checks.iter().find(|c| !c.passed) {
                return Err(Error::FixtureMismatch(format!(
                    "{}: {}: {}",
                    f.name,
                    c.check,
                    c.detail.as_deref().unwrap_or("mismatch")
                )));
            }
        }
        Ok(self)
    }
}

fn compare<T: PartialEq + std::fmt::Debug>(check: &str, expected: &T, actual: &T) -> CheckOutcome {
    CheckOutcome {
        check: check.to_string(),
        passed: expected == actual,
        detail: (expected != actual).then(|| format!("expected {expected:?}, got {actual:?}")),
    }
}

fn failure(check: &str, e: &Error) -> CheckOutcome {
    CheckOutcome {
        check: check.to_string(),
        passed: false,
        detail: Some(e.to_string()),
    }
}

pub fn run_fixture(f: &Fixture, budget: ReductionBudget) -> FixtureReport {
    let mut checks = Vec::new();
    let h = match f.build() {
        Ok(h) => h,
        Err(e) => {
            checks.push(failure("build", &e));
            return FixtureReport {
                name: f.name.clone(),
                checks,
            };
        }
    };
    let x = &f.expected;
    if let Some(n) = x.vertex_count {
        checks.push(compare("vertex count", &n, &h.vertex_count()));
    }
    if let Some(n) = x.edge_count {
        checks.push(compare("edge count", &n, &h.edge_count()));
    }
    if x.extreme_points.is_some() || x.extreme_point_count.is_some() {
        match enumerate_model_vertices(&h, budget.vertices) {
            Ok(points) => {
                if let Some(n) = x.extreme_point_count {
                    checks.push(compare("extreme point count", &n, &points.vertices.len()));
                }
                if let Some(expected) = &x.extreme_points {
                    let want: Result<BTreeSet<_>> =
                        expected.iter().map(|m| m.clone().into_model(&h)).collect();
                    match want {
                        Ok(want) => {
                            let got: BTreeSet<_> = points.vertices.into_iter().collect();
                            let ok = want == got;
                            checks.push(CheckOutcome {
                                check: "extreme points".into(),
                                passed: ok,
                                detail: (!ok).then(|| {
                                    format!(
                                        "{} expected points missing, {} unexpected",
                                        want.difference(&got).count(),
                                        got.difference(&want).count()
                                    )
                                }),
                            });
                        }
                        Err(e) => checks.push(failure("extreme points", &e)),
                    }
                }
            }
            Err(e) => checks.push(failure("extreme points", &e)),
        }
    }
    if let Some(n) = x.deterministic_count {
        checks.push(compare("deterministic count", &n, &h.enumerate_deterministic_models().len()));
    }
    if let Some(expected) = &x.zero_vertices {
        match zero_weighted_vertices(&h) {
            Ok(z) => {
                let mut want = expected.clone();
                want.sort();
                checks.push(compare("zero vertices", &want, &h.labels_of(&z)));
            }
            Err(e) => checks.push(failure("zero vertices", &e)),
        }
    }
    if let Some(expected) = &x.virtual_edges {
        match enumerate_virtual_edges(&h, budget) {
            Ok(edges) => {
                let mut want: Vec<Vec<String>> = expected
                    .iter()
                    .map(|e| {
                        let mut e = e.clone();
                        e.sort();
                        e
                    })
                    .collect();
                want.sort();
                let mut got: Vec<Vec<String>> = edges.iter().map(|e| h.labels_of(e)).collect();
                got.sort();
                checks.push(compare("virtual edges", &want, &got));
            }
            Err(e) => checks.push(failure("virtual edges", &e)),
        }
    }
    FixtureReport {
        name: f.name.clone(),
        checks,
    }
}

/// Loads every `*.json` fixture of a directory, in file-name order.
pub fn load_fixtures(dir: &Path) -> Result<Vec<Fixture>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        })
        .collect()
}

pub fn run_corpus(dir: &Path, budget: ReductionBudget) -> Result<CorpusReport> {
    Ok(CorpusReport {
        fixtures: load_fixtures(dir)?.iter().map(|f| run_fixture(f, budget)).collect(),
    })
}

/// Directory of the fixtures shipped with this crate.
pub fn bundled_corpus_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_passes() {
        let report = run_corpus(bundled_corpus_dir(), ReductionBudget::default()).unwrap();
        assert!(report.fixtures.len() >= 6);
        assert!(report.passed(), "{}", report.table());
    }

    #[test]
    fn mismatch_is_reported() {
        let f = Fixture {
            name: "edge".into(),
            scenario: Some(RawScenario {
                vertices: vec!["a".into(), "b".into()],
                edges: vec![vec!["a".into(), "b".into()]],
            }),
            game: None,
            expected: Expected {
                extreme_point_count: Some(3),
                ..Expected::default()
            },
        };
        let report = CorpusReport {
            fixtures: vec![run_fixture(&f, ReductionBudget::default())],
        };
        assert!(!report.passed());
        assert!(report.table().starts_with("FAIL"));
        assert!(matches!(report.into_result(), Err(Error::FixtureMismatch(_))));
    }
}

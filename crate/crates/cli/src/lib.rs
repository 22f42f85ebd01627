//! Command-line front end. `run` does all the work so tests can drive it
//! without spawning a process.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use contextuality::corpus::{bundled_corpus_dir, run_corpus, MAX_PARTY_VERTICES};
use contextuality::embeddings::{build_graph_embedding, build_theorem41, verify_conditional, Embedding};
use contextuality::io::{parse_embedding, parse_model, parse_product, parse_rule, parse_scenario, to_json_string};
use contextuality::polytope::{
    ce1_check, enumerate_model_vertices, is_classical_model, is_model, DEFAULT_CLIQUE_BUDGET, DEFAULT_VERTEX_BUDGET,
};
use contextuality::products::{
    apply_rule, check_no_signaling, extended_chsh_rule, fr_product_complete, fr_product_min, Rule, DEFAULT_EDGE_BUDGET,
};
use contextuality::reductions::{observational_equivalence, vcz_reduce, Equivalence, ReductionBudget, DEFAULT_SUBSET_BUDGET};
use contextuality::{build_party, Error, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const BUDGET_ENV: &str = "CONTEXTUALITY_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "contextuality",
    version,
    about = "Exact tools for hypergraph contextuality scenarios, products and games",
    after_help = "Exit status: 0 on success, 1 on domain errors and refutations (a JSON \
                  object {\"error\", \"detail\"} is printed), 2 on usage errors.\n\
                  Budgets default to the library defaults; CONTEXTUALITY_BUDGET may override \
                  them with a bare vertex budget or a list such as \
                  \"vertices=80,edges=200000,subsets=1000000,cliques=50000\"."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write results here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Largest scenario (in vertices) whose polytope is enumerated.
    #[arg(long, global = true)]
    vertex_budget: Option<usize>,
    /// Most joint-measurement edges generated for a product.
    #[arg(long, global = true)]
    edge_budget: Option<usize>,
    /// Most subsets visited while searching for virtual edges.
    #[arg(long, global = true)]
    subset_budget: Option<usize>,
    /// Most maximal cliques listed for the exclusivity check.
    #[arg(long, global = true)]
    clique_budget: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Construction {
    Theorem41,
    Graph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BuiltinRule {
    Chsh,
    Full,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a scenario and print it in canonical form.
    Validate { scenario: PathBuf },
    /// List the extreme points of the model polytope, or test one model.
    Models {
        scenario: PathBuf,
        /// Test this model for membership in the probabilistic, classical and
        /// exclusivity families instead.
        #[arg(long)]
        check: Option<PathBuf>,
        /// List the deterministic models instead.
        #[arg(long, conflicts_with = "check")]
        deterministic: bool,
    },
    /// Reduce a scenario to its canonical form, or compare two scenarios.
    Reduce {
        scenario: PathBuf,
        /// Decide observational equivalence with this scenario instead.
        #[arg(long)]
        equivalent: Option<PathBuf>,
    },
    /// Build a Foulis-Randall product.
    Product {
        /// Factor scenario files.
        factors: Vec<PathBuf>,
        /// Party scenario with M questions of D outcomes, as `MxD`; repeatable.
        #[arg(long = "party", value_parser = parse_party)]
        parties: Vec<(usize, usize)>,
        /// Add every virtual edge.
        #[arg(long)]
        complete: bool,
    },
    /// Apply a rule to a product and print the resulting game.
    Game {
        product: PathBuf,
        /// Rule file mapping question ids to winning labels.
        #[arg(long, required_unless_present = "builtin", conflicts_with = "builtin")]
        rule: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<BuiltinRule>,
    },
    /// Embed a scenario into a two-player game.
    Embed {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Construction::Theorem41)]
        construction: Construction,
        /// Map from vertex label to the labels of its chosen edge.
        #[arg(long)]
        edge_choice: Option<PathBuf>,
    },
    /// Check that an embedding is a conditional interpretation.
    VerifyConditional { scenario: PathBuf, embedding: PathBuf },
    /// Check the no-signaling equations for a model of a product.
    CheckNs { product: PathBuf, model: PathBuf },
    /// Run the golden fixtures.
    Corpus {
        /// Fixture directory; defaults to the bundled corpus.
        dir: Option<PathBuf>,
    },
}

fn parse_party(s: &str) -> Result<(usize, usize), String> {
    let (m, d) = s.split_once('x').ok_or_else(|| format!("expected MxD, got {s:?}"))?;
    let m = m.parse().map_err(|_| format!("bad question count in {s:?}"))?;
    let d = d.parse().map_err(|_| format!("bad outcome count in {s:?}"))?;
    Ok((m, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub vertices: usize,
    pub edges: usize,
    pub subsets: usize,
    pub cliques: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            vertices: DEFAULT_VERTEX_BUDGET,
            edges: DEFAULT_EDGE_BUDGET,
            subsets: DEFAULT_SUBSET_BUDGET,
            cliques: DEFAULT_CLIQUE_BUDGET,
        }
    }
}

impl Budgets {
    /// Parses the environment override: a bare vertex budget, or
    /// comma-separated `key=value` pairs.
    pub fn from_env_value(value: &str) -> Result<Budgets, String> {
        let mut b = Budgets::default();
        let value = value.trim();
        if let Ok(n) = value.parse() {
            b.vertices = n;
            return Ok(b);
        }
        for part in value.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("{BUDGET_ENV}: expected key=value, got {part:?}"))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("{BUDGET_ENV}: bad number in {part:?}"))?;
            match k.trim() {
                "vertices" => b.vertices = v,
                "edges" => b.edges = v,
                "subsets" => b.subsets = v,
                "cliques" => b.cliques = v,
                other => return Err(format!("{BUDGET_ENV}: unknown budget {other:?}")),
            }
        }
        Ok(b)
    }

    fn reduction(&self) -> ReductionBudget {
        ReductionBudget {
            vertices: self.vertices,
            subsets: self.subsets,
        }
    }
}

/// Failure modes of a command.
enum Failure {
    Usage(String),
    Domain(Error),
    /// A completed check that came out negative; its report is still printed.
    Refuted(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    Ok(parse_scenario(&read(path)?)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn execute(cmd: &Command, budgets: &Budgets) -> Result<Value, Failure> {
    match cmd {
        Command::Validate { scenario } => {
            let h = load_scenario(scenario)?;
            let nested: Vec<Value> = h
                .nested_edges()
                .iter()
                .map(|n| {
                    json!({
                        "inner": h.edge_labels(n.inner),
                        "outer": h.edge_labels(n.outer),
                        "note": "every vertex of outer minus inner has weight 0 in every model",
                    })
                })
                .collect();
            Ok(json!({ "scenario": h.to_raw(), "nested_edges": nested }))
        }
        Command::Models {
            scenario,
            check,
            deterministic,
        } => {
            let h = load_scenario(scenario)?;
            if let Some(path) = check {
                let p = parse_model(&read(path)?, &h)?;
                let probabilistic = is_model(&h, &p)?;
                let classical = match is_classical_model(&h, &p) {
                    Ok(c) => Some(c),
                    Err(Error::NoDeterministicModels) => Some(false),
                    Err(e) => return Err(e.into()),
                };
                let ce1 = ce1_check(&h, &p, budgets.cliques)?;
                return Ok(json!({
                    "probabilistic": probabilistic,
                    "classical": classical.unwrap_or(false),
                    "consistent_exclusivity": ce1,
                }));
            }
            if *deterministic {
                let models: Vec<_> = h
                    .enumerate_deterministic_models()
                    .iter()
                    .map(|m| m.to_json(&h))
                    .collect();
                return Ok(to_value(&models));
            }
            Ok(to_value(&enumerate_model_vertices(&h, budgets.vertices)?.to_json(&h)))
        }
        Command::Reduce { scenario, equivalent } => {
            let h = load_scenario(scenario)?;
            match equivalent {
                Some(other) => {
                    let h2 = load_scenario(other)?;
                    match observational_equivalence(&h, &h2, budgets.vertices)? {
                        Equivalence::Bijection(phi) => {
                            let map: serde_json::Map<String, Value> = phi
                                .iter()
                                .enumerate()
                                .map(|(v2, &v1)| (h2.label(v2).to_string(), Value::from(h.label(v1))))
                                .collect();
                            Ok(json!({ "equivalent": true, "bijection": map }))
                        }
                        Equivalence::Refuted(reason) => {
                            Err(Failure::Refuted(json!({ "equivalent": false, "reason": reason })))
                        }
                    }
                }
                None => Ok(to_value(&vcz_reduce(&h, budgets.reduction())?.to_json())),
            }
        }
        Command::Product {
            factors,
            parties,
            complete,
        } => {
            let mut scenarios = factors
                .iter()
                .map(|p| load_scenario(p))
                .collect::<Result<Vec<_>, _>>()?;
            for &(m, d) in parties {
                if m.saturating_mul(d) > MAX_PARTY_VERTICES {
                    return Err(Error::BudgetExceeded {
                        what: "party vertices",
                        size: m.saturating_mul(d),
                        budget: MAX_PARTY_VERTICES,
                    }
                    .into());
                }
                scenarios.push(build_party(m, d)?.into_scenario());
            }
            if scenarios.len() < 2 {
                return Err(Failure::Usage("a product needs at least two factors".into()));
            }
            let p = if *complete {
                fr_product_complete(&scenarios, budgets.edges, budgets.reduction())?
            } else {
                fr_product_min(&scenarios, budgets.edges)?
            };
            Ok(to_value(&p.to_json()))
        }
        Command::Game { product, rule, builtin } => {
            let p = parse_product(&read(product)?, budgets.edges, budgets.reduction())?;
            let r = match (rule, builtin) {
                (Some(path), _) => parse_rule(&read(path)?)?,
                (None, Some(BuiltinRule::Chsh)) => extended_chsh_rule(&p)?,
                (None, Some(BuiltinRule::Full)) | (None, None) => Rule::full(&p),
            };
            Ok(to_value(&apply_rule(&p, &r)?.to_raw()))
        }
        Command::Embed {
            scenario,
            construction,
            edge_choice,
        } => {
            let h = load_scenario(scenario)?;
            let emb = match construction {
                Construction::Theorem41 => {
                    let choice = match edge_choice {
                        Some(path) => Some(parse_edge_choice(&h, &read(path)?)?),
                        None => None,
                    };
                    build_theorem41(&h, choice.as_deref(), budgets.edges)?
                }
                Construction::Graph => {
                    if edge_choice.is_some() {
                        return Err(Failure::Usage("--edge-choice applies to theorem41 only".into()));
                    }
                    build_graph_embedding(&h, budgets.edges)?
                }
            };
            Ok(to_value(&emb.to_json(&h)))
        }
        Command::VerifyConditional { scenario, embedding } => {
            let h = load_scenario(scenario)?;
            let emb: Embedding = parse_embedding(&read(embedding)?, &h)?;
            let report = verify_conditional(&h, &emb, budgets.vertices)?;
            let value = to_value(&report.to_json(&h, &emb));
            if report.is_verified() {
                Ok(value)
            } else {
                Err(Failure::Refuted(value))
            }
        }
        Command::CheckNs { product, model } => {
            let p = parse_product(&read(product)?, budgets.edges, budgets.reduction())?;
            let m = parse_model(&read(model)?, p.scenario())?;
            let violations = check_no_signaling(&p, &m)?;
            let value = json!({
                "no_signaling": violations.is_empty(),
                "violations": violations.iter().map(|v| {
                    let other: Vec<usize> = (0..p.party_count()).filter(|&j| j != v.party).collect();
                    json!({
                        "party": v.party,
                        "edges": [v.edges.0, v.edges.1],
                        "context": v.context.iter().zip(&other).map(|(&(e, x), &j)| {
                            json!({ "party": j, "edge": e, "outcome": p.factors()[j].label(x) })
                        }).collect::<Vec<_>>(),
                        "marginals": [v.marginals.0, v.marginals.1],
                    })
                }).collect::<Vec<_>>(),
            });
            if violations.is_empty() {
                Ok(value)
            } else {
                Err(Failure::Refuted(value))
            }
        }
        Command::Corpus { dir } => {
            let dir = dir.as_deref().unwrap_or_else(|| bundled_corpus_dir());
            if !dir.is_dir() {
                return Err(Failure::Usage(format!("{} is not a directory", dir.display())));
            }
            let report = run_corpus(dir, budgets.reduction())?;
            let value = to_value(&report);
            if report.passed() {
                Ok(value)
            } else {
                let first = report.into_result().err().expect("a failing check");
                Err(Failure::Refuted(json!({
                    "error": first.kind(),
                    "detail": first.to_string(),
                    "report": value,
                })))
            }
        }
    }
}

fn parse_edge_choice(h: &Scenario, text: &str) -> Result<Vec<usize>, Failure> {
    let map: std::collections::BTreeMap<String, Vec<String>> =
        serde_json::from_str(text).map_err(Error::from)?;
    let mut choice = vec![usize::MAX; h.vertex_count()];
    for (v, e) in &map {
        let v = h.index_of(v).ok_or_else(|| Error::UnknownVertex(v.clone()))?;
        let ids = h.indices_of(e)?;
        choice[v] = h
            .edge_position(&ids)
            .ok_or_else(|| Error::InvalidEmbedding(format!("{e:?} is not an edge")))?;
    }
    if let Some(v) = choice.iter().position(|&c| c == usize::MAX) {
        return Err(Error::InvalidEmbedding(format!("no edge chosen for {:?}", h.label(v))).into());
    }
    Ok(choice)
}

/// Flattens JSON into `path<TAB>value` lines, in document order.
fn render_table(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) if !map.is_empty() => {
                for (k, x) in map {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, x, out);
                }
            }
            Value::Array(items) if !items.is_empty() && items.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                    .collect();
                out.push_str(&format!("{prefix}\t{}\n", parts.join(" ")));
            }
            Value::String(s) => out.push_str(&format!("{prefix}\t{s}\n")),
            other => out.push_str(&format!("{prefix}\t{other}\n")),
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

fn render(value: &Value, format: Format, is_corpus: bool) -> String {
    match format {
        Format::Json => to_json_string(value),
        Format::Table if is_corpus => {
            let report = value.get("report").unwrap_or(value);
            serde_json::from_value::<contextuality::corpus::CorpusReport>(report.clone())
                .map(|r| r.table())
                .unwrap_or_else(|_| render_table(value))
        }
        Format::Table => render_table(value),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, env_budget: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut budgets = match env_budget {
        Some(v) => match Budgets::from_env_value(v) {
            Ok(b) => b,
            Err(msg) => {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_USAGE;
            }
        },
        None => Budgets::default(),
    };
    let g = &cli.global;
    budgets.vertices = g.vertex_budget.unwrap_or(budgets.vertices);
    budgets.edges = g.edge_budget.unwrap_or(budgets.edges);
    budgets.subsets = g.subset_budget.unwrap_or(budgets.subsets);
    budgets.cliques = g.clique_budget.unwrap_or(budgets.cliques);

    let is_corpus = matches!(cli.command, Command::Corpus { .. });
    let (value, code) = match execute(&cli.command, &budgets) {
        Ok(v) => (v, EXIT_OK),
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Domain(e)) => {
            let obj = json!({ "error": e.kind(), "detail": e.to_string() });
            let _ = stdout.write_all(to_json_string(&obj).as_bytes());
            return EXIT_DOMAIN;
        }
        Err(Failure::Refuted(v)) => (v, EXIT_DOMAIN),
    };
    let text = render(&value, g.format, is_corpus);
    match &g.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    code
}

//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on domain errors.
//! Results go to standard output, diagnostics to standard error.

use std::fs;
use std::io::Write;
use std::path::Path as FsPath;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::boundary::{complement, intersect_unions, monoid_class_of, subtract, union, CylinderUnion};
use crate::equivalence::{
    certificate_from_json, matrix_from_json, search_certificate_pointed, sign_report, verify_certificate,
    DetRequirement, SearchOutcome, Verification,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::graph::{parse_graph, Graph};
use crate::ktheory::{h0_of_graph, k0_of_graph, pointed_compare, K0Data};
use crate::matrix::IntMatrix;
use crate::monoid::{group_completion, monoid_equal, MonoidElement};
use crate::moves::{add_sources, attach_fan_approx, outsplit, OutPartition};

const DEFAULT_DEPTH: u64 = 8;
const DEFAULT_BOUND: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "diagk", version, about = "Exact K-theory, graph monoids and boundary-path cylinders of directed graphs")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Search depth for monoid equality.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    depth: u64,

    /// Word-length bound for certificate search.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    bound: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Args, Debug)]
struct GraphArg {
    /// Graph file, or one of the fixtures e_infinity, e_infinity_minus,
    /// graph_e, graph_f.
    #[arg(long)]
    graph: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// K₀ with vertex classes, unit class and K₁ rank.
    K0(GraphArg),
    /// Groupoid homology H₀ computed from the graph monoid presentation.
    H0(GraphArg),
    /// Rank of K₁.
    K1(GraphArg),
    /// Vertex classes: Regular, Sink or InfiniteEmitter.
    Classify(GraphArg),
    /// Graphviz rendering of the graph.
    Dot(GraphArg),
    /// Decide equality of two graph monoid elements, e.g. `v + 2*w + q{w: e0, e1}`.
    MonoidEq {
        #[command(flatten)]
        graph: GraphArg,
        left: String,
        right: String,
    },
    /// Boolean operations on unions of cylinders, e.g. `Z(v.e0 \ {e2})`.
    CylOp {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(value_enum)]
        op: CylOpKind,
        a: String,
        /// Second operand for intersect, subtract and union.
        b: Option<String>,
    },
    /// Apply a graph move.
    Move {
        #[command(flatten)]
        graph: GraphArg,
        #[command(subcommand)]
        kind: MoveKind,
    },
    /// Verify a certificate U·B·V = C between two stable matrices.
    CertVerify {
        /// Source graph (B is its stable matrix); omit when the certificate
        /// file carries `b` and `c`.
        #[arg(long)]
        graph: Option<String>,
        /// Target graph (C is its stable matrix).
        #[arg(long)]
        target: Option<String>,
        /// JSON file with `u`, `v`, optional `det_u`, `unit_src`, `unit_tgt`, `b`, `c`.
        #[arg(long)]
        cert: String,
    },
    /// Search for a certificate between two stable matrices.
    CertSearch {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        target: String,
        /// Required determinant of U: +1, -1 or either.
        #[arg(long, default_value = "either", allow_hyphen_values = true)]
        det: String,
        /// Also require U to carry the unit vector of the graph to that of the target.
        #[arg(long)]
        units: bool,
    },
    /// Compare two graphs, or `theorem-a` for the four shipped graphs.
    Report {
        /// `theorem-a` compares the shipped fixtures.
        preset: Option<String>,
        #[arg(long)]
        graph: Option<String>,
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CylOpKind {
    Intersect,
    Subtract,
    Union,
    Complement,
    Class,
}

#[derive(Subcommand, Debug)]
enum MoveKind {
    /// Outsplit along a partition `v = {t:c, ...} | {...}`.
    Outsplit { partition: String },
    /// Append sources, each emitting one edge to VERTEX.
    AddSources {
        vertex: String,
        #[arg(default_value_t = 1)]
        count: usize,
    },
    /// Attach COUNT sources to every vertex.
    Fan { count: usize },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain(e.to_string())
    }
}

type CmdResult = std::result::Result<String, Failure>;

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run`], writing to the given streams.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

/// Reads a graph from a file, falling back to a shipped fixture name.
pub fn load_graph(source: &str) -> Result<Graph> {
    let path = FsPath::new(source);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read `{source}`: {e}")))?;
        return parse_graph(&text);
    }
    match fixtures::source(source) {
        Some(text) => parse_graph(text),
        None => Err(Error::Parse(format!("cannot read `{source}`: no such file or fixture"))),
    }
}

fn render_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

fn only(format: Format, allowed: &[Format]) -> std::result::Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--format {format:?} is not supported by this command").to_lowercase()))
    }
}

fn execute(cli: &Cli) -> CmdResult {
    let fmt = cli.format;
    match &cli.command {
        Command::K0(a) => {
            only(fmt, &[Format::Json, Format::Text])?;
            let g = load_graph(&a.graph)?;
            Ok(k_output(&k0_of_graph(&g)?, fmt, "K0"))
        }
        Command::H0(a) => {
            only(fmt, &[Format::Json, Format::Text])?;
            let g = load_graph(&a.graph)?;
            Ok(k_output(&h0_of_graph(&g)?, fmt, "H0"))
        }
        Command::K1(a) => {
            only(fmt, &[Format::Json, Format::Text])?;
            let k = k0_of_graph(&load_graph(&a.graph)?)?;
            Ok(match fmt {
                Format::Text => format!("K1 = {}", if k.k1_rank == 0 { "0".to_string() } else { format!("ℤ^{}", k.k1_rank) }),
                _ => render_json(&json!({ "k1_rank": k.k1_rank })),
            })
        }
        Command::Classify(a) => {
            only(fmt, &[Format::Json, Format::Text])?;
            let g = load_graph(&a.graph)?;
            Ok(match fmt {
                Format::Text => g.vertices().map(|v| format!("{} {}\n", g.name(v), g.classify(v).as_str())).collect(),
                _ => {
                    let mut m = Map::new();
                    for v in g.vertices() {
                        m.insert(g.name(v).to_string(), json!(g.classify(v).as_str()));
                    }
                    render_json(&Value::Object(m))
                }
            })
        }
        Command::Dot(a) => {
            only(fmt, &[Format::Json, Format::Dot])?;
            Ok(load_graph(&a.graph)?.to_dot())
        }
        Command::MonoidEq { graph, left, right } => {
            only(fmt, &[Format::Json, Format::Text])?;
            let g = load_graph(&graph.graph)?;
            let x = MonoidElement::parse(&g, left)?;
            let y = MonoidElement::parse(&g, right)?;
            let verdict = monoid_equal(&g, &x, &y, cli.depth)?;
            Ok(match fmt {
                Format::Text => verdict.as_str().to_string(),
                _ => render_json(&json!({
                    "left": x.display(&g).to_string(),
                    "right": y.display(&g).to_string(),
                    "depth": cli.depth,
                    "result": verdict.as_str(),
                    "k0_left": group_completion(&g, &x)?.to_json(),
                    "k0_right": group_completion(&g, &y)?.to_json(),
                })),
            })
        }
        Command::CylOp { graph, op, a, b } => {
            only(fmt, &[Format::Json, Format::Text])?;
            let g = load_graph(&graph.graph)?;
            let ua = CylinderUnion::parse(&g, a)?;
            let second = || -> std::result::Result<CylinderUnion, Failure> {
                let text = b.as_deref().ok_or_else(|| Failure::Usage(format!("{op:?} needs two operands").to_lowercase()))?;
                Ok(CylinderUnion::parse(&g, text)?)
            };
            let (key, result) = match op {
                CylOpKind::Intersect => ("union", intersect_unions(&g, &ua, &second()?)?.display(&g).to_string()),
                CylOpKind::Subtract => ("union", subtract(&g, &ua, &second()?)?.display(&g).to_string()),
                CylOpKind::Union => ("union", union(&g, &ua, &second()?)?.display(&g).to_string()),
                CylOpKind::Complement => ("union", complement(&g, &ua)?.display(&g).to_string()),
                CylOpKind::Class => ("class", monoid_class_of(&g, &ua)?.display(&g).to_string()),
            };
            if !matches!(op, CylOpKind::Intersect | CylOpKind::Subtract | CylOpKind::Union) && b.is_some() {
                return Err(Failure::Usage(format!("{op:?} takes one operand").to_lowercase()));
            }
            Ok(match fmt {
                Format::Text => result,
                _ => render_json(&json!({ key: result })),
            })
        }
        Command::Move { graph, kind } => {
            let g = load_graph(&graph.graph)?;
            let h = match kind {
                MoveKind::Outsplit { partition } => outsplit(&g, &OutPartition::parse(&g, partition)?)?,
                MoveKind::AddSources { vertex, count } => add_sources(&g, g.vertex(vertex)?, *count)?,
                MoveKind::Fan { count } => attach_fan_approx(&g, *count)?,
            };
            Ok(match fmt {
                Format::Text => h.to_text(),
                Format::Dot => h.to_dot(),
                Format::Json => render_json(&json!({
                    "vertices": h.names(),
                    "graph": h.to_text(),
                })),
            })
        }
        Command::CertVerify { graph, target, cert } => {
            only(fmt, &[Format::Json, Format::Text])?;
            let text = fs::read_to_string(cert).map_err(|e| Failure::Domain(format!("cannot read `{cert}`: {e}")))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("`{cert}` is not JSON: {e}")))?;
            let c = certificate_from_json(&value)?;
            let (b_mat, c_mat) = match (graph, target) {
                (Some(gs), Some(ts)) => {
                    (load_graph(gs)?.stable_matrix().entries, load_graph(ts)?.stable_matrix().entries)
                }
                (None, None) => {
                    let get = |k: &str| -> std::result::Result<IntMatrix, Failure> {
                        let m = value
                            .get(k)
                            .ok_or_else(|| Failure::Usage(format!("give --graph and --target, or `{k}` in the certificate")))?;
                        Ok(matrix_from_json(m)?)
                    };
                    (get("b")?, get("c")?)
                }
                _ => return Err(Failure::Usage("--graph and --target must be given together".into())),
            };
            let verdict = verify_certificate(&b_mat, &c_mat, &c)?;
            Ok(match fmt {
                Format::Text => verdict.to_string(),
                _ => render_json(&match &verdict {
                    Verification::Valid => json!({ "result": "Valid" }),
                    Verification::Invalid(reason) => json!({ "result": "Invalid", "reason": reason }),
                }),
            })
        }
        Command::CertSearch { graph, target, det, units } => {
            only(fmt, &[Format::Json, Format::Text])?;
            let det = DetRequirement::parse(det).map_err(|e| Failure::Usage(e.to_string()))?;
            let (g, h) = (load_graph(graph)?, load_graph(target)?);
            let (b_mat, c_mat) = (g.stable_matrix().entries, h.stable_matrix().entries);
            let ones = |n: usize| vec![BigInt::one(); n];
            let (us, ut) = (ones(g.vertex_count()), ones(h.vertex_count()));
            let unit_pair = units.then_some((us.as_slice(), ut.as_slice()));
            let outcome = search_certificate_pointed(&b_mat, &c_mat, det, cli.bound, unit_pair)?;
            Ok(match (&outcome, fmt) {
                (SearchOutcome::Found { word_length, .. }, Format::Text) => format!("Found at word length {word_length}"),
                (SearchOutcome::NotFoundWithinBound, Format::Text) => "NotFoundWithinBound".to_string(),
                (SearchOutcome::Found { certificate, word_length }, _) => render_json(&json!({
                    "result": "Found",
                    "word_length": word_length,
                    "certificate": certificate.to_json(),
                })),
                (SearchOutcome::NotFoundWithinBound, _) => {
                    render_json(&json!({ "result": "NotFoundWithinBound", "bound": cli.bound }))
                }
            })
        }
        Command::Report { preset, graph, target } => {
            only(fmt, &[Format::Json, Format::Text])?;
            match (preset.as_deref(), graph, target) {
                (Some("theorem-a"), None, None) => fixture_report(cli.bound, fmt),
                (None, Some(gs), Some(ts)) => {
                    let r = sign_report(&load_graph(gs)?, &load_graph(ts)?, (gs, ts), cli.bound)?;
                    Ok(match fmt {
                        Format::Text => r.to_text(),
                        _ => render_json(&r.to_json()),
                    })
                }
                (Some(other), None, None) => Err(Failure::Usage(format!("unknown report `{other}`"))),
                _ => Err(Failure::Usage("use `report theorem-a` or `report --graph G --target H`".into())),
            }
        }
    }
}

fn k_output(k: &K0Data, fmt: Format, label: &str) -> String {
    match fmt {
        Format::Text => {
            let mut s = format!("{label} = {}\nunit = {}\nK1 rank = {}\n", k.group_string(), k.unit, k.k1_rank);
            for (n, c) in k.vertex_names.iter().zip(&k.classes) {
                s.push_str(&format!("[{n}] = {c}\n"));
            }
            s
        }
        _ => render_json(&k.to_json()),
    }
}

/// K-theory of the four shipped graphs, the sign identities in K₀ of
/// `graph_e`, and sign reports for the pairs that matter.
fn fixture_report(bound: usize, fmt: Format) -> CmdResult {
    let graphs = fixtures::all();
    let mut k0s = Map::new();
    let mut text = String::new();
    for (name, g) in &graphs {
        let k = k0_of_graph(g)?;
        text.push_str(&format!("K0({name}) = {}, unit {}, K1 rank {}\n", k.group_string(), k.unit, k.k1_rank));
        k0s.insert(name.to_string(), k.to_json());
    }

    let e = fixtures::graph_e();
    let ke = k0_of_graph(&e)?;
    let combo = |a: i64, b: i64| -> Result<String> {
        let vec = [BigInt::from(a), BigInt::from(b)];
        Ok(ke.class_of_vector(&vec)?.to_string())
    };
    let (first, second) = (combo(3, 5)?, combo(1, 3)?);
    text.push_str(&format!("in K0(graph_e): 3[v] + 5[w] = {first}, [v] + 3[w] = {second}, [1] = {}\n", ke.unit));

    let pairs = [
        ("e_infinity", "e_infinity"),
        ("e_infinity", "e_infinity_minus"),
        ("e_infinity", "graph_e"),
        ("graph_e", "graph_f"),
    ];
    let mut reports = Vec::new();
    for (a, b) in pairs {
        let (ga, gb) = (fixtures::by_name(a).expect("fixture"), fixtures::by_name(b).expect("fixture"));
        let r = sign_report(&ga, &gb, (a, b), bound)?;
        text.push_str(&format!("\n== {a} vs {b} ==\n"));
        text.push_str(&r.to_text());
        reports.push(r.to_json());
    }
    let summary = format!(
        "graph_e vs graph_f: {}; graph_e vs e_infinity: {}",
        pointed_compare(&ke, &k0_of_graph(&fixtures::graph_f())?),
        pointed_compare(&ke, &k0_of_graph(&fixtures::e_infinity())?),
    );
    text.push_str(&format!("\nsummary: {summary}\n"));
    Ok(match fmt {
        Format::Text => text,
        _ => render_json(&json!({
            "k0": Value::Object(k0s),
            "sign_identities": { "3v+5w": first, "v+3w": second, "unit": ke.unit.to_string() },
            "reports": reports,
            "summary": summary,
        })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("diagk").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn k0_of_fixture() {
        let (code, out, _) = call(&["k0", "--graph", "fixtures/e_infinity"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["free_rank"], 1);
        assert_eq!(v["unit"], json!([1]));
    }

    #[test]
    fn missing_file_is_a_domain_error() {
        let (code, out, err) = call(&["k0", "--graph", "missing-file"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("missing-file"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["k0"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["dot", "--graph", "graph_e", "--format", "text"]).0, 2);
    }

    #[test]
    fn fixture_report_mentions_the_flip() {
        let (code, out, _) = call(&["report", "theorem-a", "--format", "text", "--bound", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("IsoOnlyFlippingUnit"));
    }
}

//! `hevo` command-line front end. JSON reports go to stdout, diagnostics to
//! stderr.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hevo_core::algebra::principal_power;
use hevo_core::families::family_catalog;
use hevo_core::graph::export_window_dot;
use hevo_core::io::{element_from_json, expansion_to_json, serialize_structure, structure_from_value};
use hevo_core::nilpotency::{
    brute_force_nilpotent, classify, nilpotency_index, IndexVerdict, NilVerdict, NilpotentVerdict,
};
use hevo_core::operator::{apply_operator, frobenius_certificate, schur_certificate, OperatorKind, PositiveWeights};
use hevo_core::scalar::{parse_rational, Scalar, ScalarMode, DEFAULT_TOLERANCE};
use hevo_core::{Element, Error, EvolutionStructure, Expansion};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "hevo", version, about = "Analyze Hilbert evolution algebras given by weighted digraphs")]
struct Cli {
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Float coefficients at or below this magnitude (relative to the
    /// largest) are dropped from float-mode outputs.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// Spec file, `-` for stdin, or inline JSON.
    spec: Option<String>,
    /// Build a named family instead of reading a spec.
    #[arg(long, conflicts_with = "spec")]
    family: Option<String>,
    /// Family parameters as JSON (with --family).
    #[arg(long, requires = "family")]
    params: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nil / nilpotency classification with witnesses.
    Analyze {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 100)]
        budget: u64,
    },
    /// Right-nilpotency index.
    Index {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 100)]
        budget: u64,
    },
    /// Principal power v^n.
    Power {
        #[command(flatten)]
        spec: SpecArgs,
        /// Element as JSON `[[vertex, re, im], ...]`.
        #[arg(long)]
        element: String,
        #[arg(short = 'n', long = "n")]
        n: u64,
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Apply an adjacency operator.
    Apply {
        #[command(flatten)]
        spec: SpecArgs,
        /// omega | gamma | adj | adjT
        #[arg(long)]
        op: String,
        /// Vector as JSON `[[vertex, re, im], ...]`.
        #[arg(long)]
        vector: String,
        #[arg(long)]
        cutoff: Option<u64>,
    },
    /// Frobenius or Schur norm certificate.
    Bounds {
        #[command(flatten)]
        spec: SpecArgs,
        /// `alpha,beta,M1,M2` with constant positive alpha and beta.
        #[arg(long, conflicts_with = "frobenius", required_unless_present = "frobenius")]
        schur: Option<String>,
        #[arg(long)]
        frobenius: bool,
        #[arg(long, default_value_t = 100)]
        window: u64,
    },
    /// Sink-first ordering of a window.
    Triangularize {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        window: u64,
    },
    /// Graphviz DOT of the subgraph on 1..=window.
    ExportDot {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        window: u64,
    },
    /// Brute-force linear-algebra check (finite structures, n <= 12).
    Oracle {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Family catalogue.
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
}

#[derive(Subcommand, Debug)]
enum FamiliesAction {
    List,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Validation(_) | Error::InvalidParams(_) | Error::InvalidArgument(_) => {
                EXIT_VALIDATION
            }
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_VALIDATION, message: message.into() }
}

enum Output {
    Report { command: &'static str, inputs: Value, result: Value, budget: Value, code: i32 },
    Text(String),
}

fn parse_json_arg(what: &str, text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| validation(format!("{what}: {e}")))
}

fn read_spec_text(src: &str) -> Result<String, Failure> {
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| validation(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(src).map_err(|e| validation(format!("{src}: {e}")))
}

fn load(spec: &SpecArgs) -> Result<(EvolutionStructure, Value), Failure> {
    let value = match (&spec.spec, &spec.family) {
        (_, Some(name)) => {
            let params = match &spec.params {
                Some(p) => parse_json_arg("--params", p)?,
                None => json!({}),
            };
            json!({ "family": name, "params": params })
        }
        (Some(src), None) => parse_json_arg("spec", &read_spec_text(src)?)?,
        (None, None) => return Err(validation("no structure given: pass a spec file or --family NAME")),
    };
    let s = structure_from_value(&value)?;
    let echo = serialize_structure(&s).unwrap_or(value);
    Ok((s, echo))
}

fn load_element(text: &str, mode: ScalarMode) -> Result<Element, Failure> {
    Ok(element_from_json(&parse_json_arg("element", text)?, mode)?)
}

/// Drops float coefficients negligible relative to the largest one.
fn flush_small(e: &Element, tolerance: f64) -> Element {
    let max = e.iter().map(|(_, c)| c.abs_upper()).fold(0.0, f64::max);
    Element::from_terms(
        e.iter()
            .filter(|(_, c)| matches!(c, Scalar::Exact(_)) || c.abs_upper() > tolerance * max)
            .map(|(k, c)| (k, c.clone())),
    )
}

fn flush_expansion(x: Expansion, tolerance: f64) -> Expansion {
    match x {
        Expansion::Exact(e) => Expansion::Exact(flush_small(&e, tolerance)),
        Expansion::Approx(mut a) => {
            a.prefix = flush_small(&a.prefix, tolerance);
            Expansion::Approx(a)
        }
    }
}

fn parse_positive(text: &str) -> Result<num_rational::BigRational, Failure> {
    let text = text.trim();
    parse_rational(text)
        .ok()
        .or_else(|| text.parse::<f64>().ok().and_then(num_rational::BigRational::from_float))
        .ok_or_else(|| validation(format!("--schur: bad number {text:?}")))
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let tol = cli.tolerance;
    Ok(match &cli.command {
        Command::Analyze { spec, budget } => {
            let (s, echo) = load(spec)?;
            let report = classify(&s, *budget);
            let code = if report.is_decided() { EXIT_OK } else { EXIT_INCONCLUSIVE };
            Output::Report {
                command: "analyze",
                inputs: json!({ "spec": echo }),
                result: serde_json::to_value(&report).expect("report serializes"),
                budget: json!({ "budget": budget }),
                code,
            }
        }
        Command::Index { spec, budget } => {
            let (s, echo) = load(spec)?;
            let verdict = nilpotency_index(&s, *budget);
            let code = if verdict == IndexVerdict::Inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK };
            Output::Report {
                command: "index",
                inputs: json!({ "spec": echo }),
                result: serde_json::to_value(&verdict).expect("verdict serializes"),
                budget: json!({ "budget": budget }),
                code,
            }
        }
        Command::Power { spec, element, n, cutoff } => {
            let (s, echo) = load(spec)?;
            let v = load_element(element, s.mode())?;
            let p = flush_expansion(principal_power(&s, &v, *n, *cutoff)?, tol);
            Output::Report {
                command: "power",
                inputs: json!({ "spec": echo, "element": hevo_core::io::element_to_json(&v), "n": n }),
                result: json!({ "power": expansion_to_json(&p), "is_zero": p.is_zero() }),
                budget: json!({ "cutoff": cutoff }),
                code: EXIT_OK,
            }
        }
        Command::Apply { spec, op, vector, cutoff } => {
            let (s, echo) = load(spec)?;
            let kind: OperatorKind = op.parse()?;
            let v = load_element(vector, s.mode())?;
            let out = flush_expansion(apply_operator(&s, kind, &v, *cutoff)?, tol);
            Output::Report {
                command: "apply",
                inputs: json!({ "spec": echo, "op": kind, "vector": hevo_core::io::element_to_json(&v) }),
                result: expansion_to_json(&out),
                budget: json!({ "cutoff": cutoff }),
                code: EXIT_OK,
            }
        }
        Command::Bounds { spec, schur, frobenius: _, window } => {
            let (s, echo) = load(spec)?;
            let cert = match schur {
                Some(text) => {
                    let parts: Vec<&str> = text.split(',').collect();
                    if parts.len() != 4 {
                        return Err(validation("--schur expects alpha,beta,M1,M2"));
                    }
                    let nums = parts.iter().map(|p| parse_positive(p)).collect::<Result<Vec<_>, _>>()?;
                    if nums[..2].iter().any(|x| x <= &num_rational::BigRational::from_integer(0.into())) {
                        return Err(validation("--schur: alpha and beta must be positive"));
                    }
                    schur_certificate(
                        &s,
                        &PositiveWeights::Constant(nums[0].clone()),
                        &PositiveWeights::Constant(nums[1].clone()),
                        &nums[2],
                        &nums[3],
                        *window,
                    )
                }
                None => frobenius_certificate(&s, *window),
            };
            let mut result = cert.to_json();
            result["summary"] = json!(cert.describe());
            Output::Report {
                command: "bounds",
                inputs: json!({ "spec": echo, "schur": schur }),
                result,
                budget: json!({ "window": window }),
                code: EXIT_OK,
            }
        }
        Command::Triangularize { spec, window } => {
            let (s, echo) = load(spec)?;
            let t = hevo_core::nilpotency::triangularize_window(&s, *window);
            let result = serde_json::to_value(&t).expect("serializes");
            Output::Report {
                command: "triangularize",
                inputs: json!({ "spec": echo }),
                result,
                budget: json!({ "window": window }),
                code: EXIT_OK,
            }
        }
        Command::ExportDot { spec, window } => {
            let (s, _) = load(spec)?;
            Output::Text(export_window_dot(&s, *window))
        }
        Command::Oracle { spec } => {
            let (s, echo) = load(spec)?;
            let b = brute_force_nilpotent(&s, cli.seed)?;
            let report = classify(&s, 1);
            let classified_nilpotent = matches!(report.nilpotent, NilpotentVerdict::CertifiedYes { .. });
            let classified_nil = matches!(report.nil, NilVerdict::CertifiedYes);
            Output::Report {
                command: "oracle",
                inputs: json!({ "spec": echo }),
                result: json!({
                    "nilpotent": b.nilpotent,
                    "index": b.index,
                    "nil_sampled": b.nil_sampled,
                    "dims": b.dims,
                    "agrees_with_classify": classified_nilpotent == b.nilpotent && classified_nil == b.nil_sampled,
                }),
                budget: json!({ "samples": hevo_core::nilpotency::ORACLE_SAMPLES, "seed": cli.seed }),
                code: EXIT_OK,
            }
        }
        Command::Families { action: FamiliesAction::List } => Output::Report {
            command: "families list",
            inputs: json!({}),
            result: Value::Array(
                family_catalog().into_iter().map(|(name, about)| json!({ "name": name, "description": about })).collect(),
            ),
            budget: json!({}),
            code: EXIT_OK,
        },
    })
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok(Output::Text(text)) => {
            let _ = write!(out, "{text}");
            EXIT_OK
        }
        Ok(Output::Report { command, mut inputs, result, budget, code }) => {
            inputs["seed"] = json!(cli.seed);
            inputs["tolerance"] = json!(cli.tolerance);
            let generated_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let report = json!({
                "command": command,
                "inputs": inputs,
                "result": result,
                "budget": budget,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "generated_at": generated_at,
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use itlab::algebra::{build_algebra, AlgebraTable, Presentation};
use itlab::expr::Env;
use itlab::fuzz::{fuzz, FuzzConfig};
use itlab::ideal::{IdealContext, Quantity};
use itlab::io::{AlgebraFile, AnyPresentation, SCHEMA};
use itlab::linalg::Field;
use itlab::report::{ideal_summary, inspect, phi, PhiSide};
use itlab::suite::{gen_corpus, run_suite, SuiteConfig};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "itlab", version, about = "φ, ψ, trace ideals, corner and quotient algebras of bound quiver algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions, basis, radical, global dimension and selfinjectivity.
    Inspect {
        algebra: String,
        #[arg(long, default_value_t = 50)]
        bound: usize,
    },
    /// φ and ψ of a module expression.
    Phi {
        algebra: String,
        #[arg(long)]
        module: String,
        #[arg(long, value_enum, default_value_t = Side::L)]
        side: Side,
        #[arg(long, default_value_t = 200)]
        max_steps: usize,
    },
    /// Trace ideal of a vertex subset, its corner and quotient algebras, and the bound report.
    Ideal {
        algebra: String,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Runs the verification suite on a vertex subset.
    Verify {
        algebra: String,
        #[command(flatten)]
        suite: SuiteArgs,
        /// Include per-stage timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Runs the suite on seeded random algebras and vertex subsets.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        iterations: usize,
        /// Where failing cases are written; defaults to fuzz-counterexamples-<seed>.json.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    L,
    R,
}

#[derive(Args)]
struct SuiteArgs {
    /// Comma-separated vertex names.
    #[arg(long, value_delimiter = ',', required = true)]
    vertices: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    corpus_size: Option<usize>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Reference value for a bound formula, as `formula_id=value`.
    #[arg(long = "printed", value_parser = parse_printed)]
    printed: Vec<(String, usize)>,
    /// Check ids to skip.
    #[arg(long, value_delimiter = ',')]
    disable: Vec<String>,
}

fn parse_printed(s: &str) -> Result<(String, usize), String> {
    let (id, v) = s.split_once('=').ok_or("expected formula_id=value")?;
    let v = v.parse().map_err(|e| format!("bad value `{v}`: {e}"))?;
    Ok((id.to_string(), v))
}

impl SuiteArgs {
    fn config(&self) -> SuiteConfig {
        let d = SuiteConfig::default();
        SuiteConfig {
            seed: self.seed,
            corpus_size: self.corpus_size.unwrap_or(d.corpus_size),
            bound: self.bound.unwrap_or(d.bound),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            disabled: self.disable.clone(),
            printed: self.printed.iter().cloned().collect::<BTreeMap<_, _>>(),
            ..d
        }
    }
}

/// A report ready for output plus the exit code it implies.
struct Outcome {
    value: Value,
    code: u8,
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fuzz { seed, iterations, bundle } => run_fuzz(*seed, *iterations, bundle.clone()),
        Command::Inspect { algebra, .. }
        | Command::Phi { algebra, .. }
        | Command::Ideal { algebra, .. }
        | Command::Verify { algebra, .. } => load(algebra).and_then(|(p, len)| match p {
            AnyPresentation::Prime(p) => build(&p, len, algebra).and_then(|a| run_on(&a, &cli.command)),
            AnyPresentation::Rationals(p) => build(&p, len, algebra).and_then(|a| run_on(&a, &cli.command)),
        }),
    };
    match result {
        Ok(out) => match emit(&out.value, cli.format, cli.output.as_ref()) {
            Ok(()) => ExitCode::from(out.code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INPUT)
            }
        },
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load(path: &str) -> Result<(AnyPresentation, usize), InputError> {
    let file = AlgebraFile::read(path)?;
    if let Some(s) = &file.schema {
        if s != SCHEMA {
            return Err(InputError(format!("{path}: schema `{s}` is not {SCHEMA}")));
        }
    }
    Ok((file.presentation(path)?, file.max_path_len()))
}

fn build<F: Field>(p: &Presentation<F>, max_len: usize, path: &str) -> Result<Arc<AlgebraTable<F>>, InputError> {
    build_algebra(p, max_len).map_err(|e| InputError(format!("{path}: {e}")))
}

fn vertex_indices<F: Field>(alg: &AlgebraTable<F>, names: &[String]) -> Result<Vec<usize>, InputError> {
    names
        .iter()
        .map(|n| {
            alg.vertices()
                .iter()
                .position(|v| v == n.trim())
                .ok_or_else(|| InputError(format!("--vertices: unknown vertex `{n}`")))
        })
        .collect()
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn run_on<F: Field>(alg: &Arc<AlgebraTable<F>>, cmd: &Command) -> Result<Outcome, InputError> {
    match cmd {
        Command::Inspect { bound, .. } => {
            let r = inspect(alg, *bound);
            let code = if r.algebra.gld == Quantity::Unknown { EXIT_INCONCLUSIVE } else { EXIT_OK };
            Ok(Outcome { value: to_value(&r), code })
        }
        Command::Phi {
            module,
            side,
            max_steps,
            ..
        } => {
            let m = Env::new(alg).eval_str(module)?;
            let side = match side {
                Side::L => PhiSide::L,
                Side::R => PhiSide::R,
            };
            let r = phi(&m, module, side, *max_steps)?;
            let code = if r.report.certified { EXIT_OK } else { EXIT_INCONCLUSIVE };
            Ok(Outcome { value: to_value(&r), code })
        }
        Command::Ideal { suite, .. } => {
            let ctx = IdealContext::build(alg, &vertex_indices(alg, &suite.vertices)?)?;
            let r = ideal_summary(&ctx, &suite.config())?;
            let code = if r.has_failures() {
                EXIT_FAIL
            } else if r.has_unknowns() {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            Ok(Outcome { value: to_value(&r), code })
        }
        Command::Verify { suite, timings, .. } => {
            let ctx = IdealContext::build(alg, &vertex_indices(alg, &suite.vertices)?)?;
            let cfg = suite.config();
            let corpus = gen_corpus(&ctx, &cfg);
            let mut r = run_suite(&ctx, &corpus, &cfg);
            if !timings {
                r.timings_ms = None;
            }
            let code = if !r.passed() {
                EXIT_FAIL
            } else if !r.unknowns.is_empty() {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            Ok(Outcome { value: to_value(&r), code })
        }
        Command::Fuzz { .. } => unreachable!("fuzz takes no algebra"),
    }
}

fn run_fuzz(seed: u64, iterations: usize, bundle: Option<PathBuf>) -> Result<Outcome, InputError> {
    let cfg = FuzzConfig {
        seed,
        iterations,
        ..FuzzConfig::default()
    };
    let report = fuzz(&cfg);
    let mut value = to_value(&report);
    let code = if report.failing_cases > 0 {
        let failing: Vec<_> = report.cases.iter().filter(|c| c.failed()).collect();
        let path = bundle.unwrap_or_else(|| PathBuf::from(format!("fuzz-counterexamples-{seed}.json")));
        let body = serde_json::json!({"schema": SCHEMA, "seed": seed, "config": &report.config, "cases": failing});
        std::fs::write(&path, serde_json::to_string_pretty(&body)? + "\n")
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        value["bundle"] = Value::String(path.display().to_string());
        EXIT_FAIL
    } else if report.cases_with_unknowns > 0 {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    Ok(Outcome { value, code })
}

fn emit(value: &Value, format: Format, output: Option<&PathBuf>) -> std::io::Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("values serialize") + "\n",
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", value, &mut lines);
            lines.join("\n") + "\n"
        }
    };
    match output {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

/// One `path: value` line per scalar, so text and JSON carry the same numbers.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            if map.is_empty() {
                out.push(format!("{prefix}: {{}}"));
            }
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            out.push(format!("{prefix}: [{}]", items.join(", ")));
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => out.push(format!("{prefix}: {}", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

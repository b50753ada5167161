//! `polyfix` command-line front end.
//!
//! Exit status: 0 success, 1 negative verdict, 2 violation or regression
//! mismatch, 3 input error.

mod render;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polyfix::classify::{classify_all, Semantics};
use polyfix::dynamics::{
    fixed_point_theorem_check, fixed_points, kannan_theorem_check, orbit, prime_period_table,
    OrbitStructure, Outcome, TheoremVerdict,
};
use polyfix::error::Error;
use polyfix::instance::{validate_json, Instance};
use polyfix::oracle::{check_implications, fuzz, DistanceModel, FuzzConfig, FuzzStatus, Strength};
use polyfix::picard::{
    picard_iterate, uniqueness_check, BoundCoefficients, MapRegistry, Region, StopRule,
};
use polyfix::registry::{lookup, reproduce};

pub const SCHEMA: &str = "polyfix/1";

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "polyfix", version, about = "Classify self-maps of finite metric spaces by contraction type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Strict,
    PaperOrdering,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Strict => Semantics::Strict,
            SemanticsArg::PaperOrdering => Semantics::ListedOrder,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    Banach,
    Kannan,
    Perimetric,
    TotalPairwise,
    KannanPerimetric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Closure,
    Grid,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance JSON file.
    file: PathBuf,
    /// Polygon size.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "strict")]
    semantics: SemanticsArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Check the metric axioms of an instance's distance matrix.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Exact minimal coefficients for every class.
    Classify {
        #[command(flatten)]
        args: InstanceArgs,
        /// Exit 1 unless the map belongs to this class.
        #[arg(long, value_enum)]
        require: Option<ClassArg>,
    },
    /// Orbits, fixed points, prime periods and fixed-point verdicts.
    Dynamics {
        #[command(flatten)]
        args: InstanceArgs,
    },
    /// Evaluate every implication between the classes on one instance.
    Theorems {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check the implications on seeded random instances.
    Fuzz {
        #[arg(long, default_value_t = FuzzConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Space sizes, MIN..MAX inclusive.
        #[arg(long = "n", default_value = "3..8", value_parser = parse_range)]
        n_points: (usize, usize),
        /// Polygon sizes, MIN..MAX inclusive.
        #[arg(long, default_value = "3..5", value_parser = parse_range)]
        k: (usize, usize),
        #[arg(long, value_enum, default_value = "closure")]
        model: ModelArg,
        /// Largest edge weight before shortest-path closure.
        #[arg(long, default_value_t = 10)]
        max_weight: u32,
        #[arg(long, default_value_t = 2)]
        grid_dim: usize,
        #[arg(long, default_value_t = 10)]
        grid_side: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Picard iteration of a built-in map with a-priori error bounds.
    Iterate {
        #[arg(long)]
        map: String,
        /// Map parameter override, NAME=VALUE; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        /// Starting point, comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Perimetric coefficient for the bounds; estimated from the orbit when absent.
        #[arg(long)]
        lambda: Option<f64>,
        /// Kannan-type coefficient; enables the Kannan-type bounds.
        #[arg(long)]
        mu: Option<f64>,
        /// Search LO..HI (every axis) for other fixed points.
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
        unique_region: Option<(f64, f64)>,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: TraceFormat,
    },
    /// Recompute a built-in reference instance and compare every stored value.
    Repro {
        /// Instance id, `em_2_2` for all its sizes, or `all`.
        id: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok((parse(a)?, parse(b)?))
        }
        None => parse(s).map(|v| (v, v)),
    }
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once("..").ok_or("expected LO..HI")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    report: T,
}

fn emit_json<T: Serialize>(command: &str, report: T) {
    let env = Envelope {
        schema: SCHEMA,
        command,
        report,
    };
    println!("{}", serde_json::to_string_pretty(&env).expect("reports serialize"));
}

fn load(path: &PathBuf) -> Result<Instance, Error> {
    Instance::load(path)
}

#[derive(Serialize)]
struct DynamicsReport<'a> {
    k: usize,
    semantics: Semantics,
    fixed_points: Vec<String>,
    prime_periods: BTreeMap<usize, Vec<String>>,
    orbits: Vec<OrbitView>,
    verdicts: [&'a TheoremVerdict; 2],
}

#[derive(Serialize)]
struct OrbitView {
    start: String,
    tail: Vec<String>,
    cycle: Vec<String>,
}

impl OrbitView {
    fn new(instance: &Instance, o: &OrbitStructure) -> Self {
        let s = &instance.space;
        OrbitView {
            start: s.label(o.start).to_string(),
            tail: s.labels_of(&o.tail),
            cycle: s.labels_of(&o.cycle),
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Validate { file, format } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::InstanceFormat(format!("{}: {e}", file.display())))?;
            let report = validate_json(&text)?;
            match format {
                Format::Json => emit_json("validate", &report),
                Format::Text => render::validation(&report),
            }
            Ok(if report.is_valid() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Classify { args, require } => {
            let inst = load(&args.file)?;
            let report = classify_all(&inst.space, &inst.map, args.k, args.semantics.into())?;
            match args.format {
                Format::Json => emit_json("classify", &report),
                Format::Text => render::classification(&report),
            }
            let member = match require {
                None => true,
                Some(ClassArg::Banach) => report.banach.member,
                Some(ClassArg::Kannan) => report.kannan.member,
                Some(ClassArg::Perimetric) => report.perimetric.member,
                Some(ClassArg::TotalPairwise) => report.total_pairwise.member,
                Some(ClassArg::KannanPerimetric) => report.kannan_perimetric.member,
            };
            Ok(if member { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Dynamics { args } => {
            let inst = load(&args.file)?;
            let semantics = args.semantics.into();
            let perimetric = fixed_point_theorem_check(&inst.space, &inst.map, args.k, semantics)?;
            let kannan = kannan_theorem_check(&inst.space, &inst.map, args.k, semantics)?;
            let report = DynamicsReport {
                k: args.k,
                semantics,
                fixed_points: inst.space.labels_of(&fixed_points(&inst.map)),
                prime_periods: prime_period_table(&inst.map)
                    .into_iter()
                    .map(|(p, pts)| (p, inst.space.labels_of(&pts)))
                    .collect(),
                orbits: (0..inst.space.len())
                    .map(|s| OrbitView::new(&inst, &orbit(&inst.map, s).expect("in range")))
                    .collect(),
                verdicts: [&perimetric, &kannan],
            };
            match args.format {
                Format::Json => emit_json("dynamics", &report),
                Format::Text => render::dynamics(
                    &report.fixed_points,
                    &report.prime_periods,
                    &report.orbits.iter().map(|o| (&o.start, &o.tail, &o.cycle)).collect::<Vec<_>>(),
                    &report.verdicts,
                ),
            }
            let violated = report.verdicts.iter().any(|v| v.outcome == Outcome::Violated);
            Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
        }
        Command::Theorems { file, k, format } => {
            let inst = load(&file)?;
            let results = check_implications(&inst, k)?;
            #[derive(Serialize)]
            struct Report<'a> {
                k: usize,
                implications: &'a [polyfix::oracle::ImplicationResult],
            }
            match format {
                Format::Json => emit_json("theorems", Report { k, implications: &results }),
                Format::Text => render::implications(results.iter()),
            }
            let violated = results
                .iter()
                .any(|r| r.strength == Strength::Proven && !r.violations.is_empty());
            Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
        }
        Command::Fuzz {
            seed,
            trials,
            n_points,
            k,
            model,
            max_weight,
            grid_dim,
            grid_side,
            format,
        } => {
            let config = FuzzConfig {
                seed,
                trials,
                n_points,
                k,
                distance_model: match model {
                    ModelArg::Closure => DistanceModel::Closure { max_weight },
                    ModelArg::Grid => DistanceModel::Grid {
                        dim: grid_dim,
                        side: grid_side,
                    },
                },
            };
            let report = fuzz(&config)?;
            match format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"))
                }
                Format::Text => render::fuzz(&report),
            }
            Ok(match report.status {
                FuzzStatus::Pass => EXIT_OK,
                FuzzStatus::CoverageUnmet => EXIT_NEGATIVE,
                FuzzStatus::Violation => EXIT_VIOLATION,
            })
        }
        Command::Iterate {
            map,
            params,
            x0,
            k,
            tol,
            max_steps,
            lambda,
            mu,
            unique_region,
            grid,
            format,
        } => {
            let registry = MapRegistry::builtin();
            let params: BTreeMap<String, f64> = params.into_iter().collect();
            let oracle = registry.oracle(&map, &params).map_err(|e| match e {
                Error::UnknownMap(m) => Error::UnknownMap(format!(
                    "{m} (available: {})",
                    registry.names().collect::<Vec<_>>().join(", ")
                )),
                other => other,
            })?;
            let x0 = if x0.is_empty() { vec![0.0; oracle.dimension] } else { x0 };
            let trace = picard_iterate(
                &oracle,
                &x0,
                k,
                StopRule {
                    tolerance: tol,
                    max_steps,
                },
                BoundCoefficients { lambda, mu },
            )?;
            let uniqueness = unique_region
                .map(|(lo, hi)| {
                    uniqueness_check(&trace, &oracle, &Region::cube(oracle.dimension, lo, hi), grid, 1e-9)
                })
                .transpose()?;
            match format {
                TraceFormat::Csv => print!("{}", trace.to_csv()?),
                TraceFormat::Json => {
                    #[derive(Serialize)]
                    struct Report<'a> {
                        trace: &'a polyfix::picard::IterationTrace,
                        bound_violations: Vec<usize>,
                        kannan_bound_violations: Vec<usize>,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        uniqueness: Option<&'a polyfix::picard::UniquenessReport>,
                    }
                    emit_json(
                        "iterate",
                        Report {
                            trace: &trace,
                            bound_violations: trace.bound_violations(),
                            kannan_bound_violations: trace.kannan_bound_violations(),
                            uniqueness: uniqueness.as_ref(),
                        },
                    )
                }
                TraceFormat::Text => render::trace(&trace, uniqueness.as_ref()),
            }
            Ok(if trace.converged { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Repro { id, format } => {
            let reports = lookup(&id)?
                .iter()
                .map(reproduce)
                .collect::<Result<Vec<_>, _>>()?;
            match format {
                Format::Json => emit_json("repro", serde_json::json!({ "instances": &reports })),
                Format::Text => render::repro(&reports),
            }
            Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

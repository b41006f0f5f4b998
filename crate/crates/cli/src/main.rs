use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qrd::density::{analyze_pipeline, run_checks, CheckOutcome, Pipeline};
use qrd::diagrams::{quotient_diagram, render_ascii, render_overlap, OverlapDiagram};
use qrd::empirical::{self, EmpiricalReport, QCountReport};
use qrd::tuples::GeneratorSpec;
use qrd::{build_structure, DensityAnalysis, Dyadic, IndexSet, StandardTuple};

const DEFAULT_BOUND: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "qrd",
    version,
    about = "Exact and empirical densities of primes for which unions of arithmetic progressions are all residues or all non-residues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the full analysis.
    Analyze {
        #[command(flatten)]
        input: TupleArg,
        #[command(flatten)]
        out: FormatArg,
        /// Also run every internal cross-check and fail on a mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Print the exact density of Π₊ only.
    Density {
        #[command(flatten)]
        input: TupleArg,
        #[command(flatten)]
        out: FormatArg,
    },
    /// Estimate the density by sieving primes.
    Empirical {
        #[command(flatten)]
        input: TupleArg,
        #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = clap::value_parser!(u64).range(100..))]
        bound: u64,
        #[command(flatten)]
        out: FormatArg,
        /// Dump one CSV row per prime to stderr.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Count q_ε(p) for one prime.
    Qcount {
        #[command(flatten)]
        input: TupleArg,
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_epsilon)]
        epsilon: i8,
        #[command(flatten)]
        out: FormatArg,
    },
    /// Build a tuple from a gap sequence and print it with its analysis.
    Generate {
        /// Generator JSON, inline or a file path.
        #[arg(long)]
        spec: String,
        #[command(flatten)]
        out: FormatArg,
    },
    /// Draw the quotient diagram of a tuple, or a bare overlap diagram.
    Render {
        #[arg(long, conflicts_with_all = ["gaps", "s"], required_unless_present = "gaps")]
        tuple: Option<String>,
        /// Comma-separated gap sequence.
        #[arg(long, value_delimiter = ',', requires = "s")]
        gaps: Option<Vec<u64>>,
        #[arg(long)]
        s: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct TupleArg {
    /// Tuple JSON {"a":[..],"b":[..],"s":N}, inline or a file path.
    #[arg(long)]
    tuple: String,
}

#[derive(Args, Debug)]
struct FormatArg {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_epsilon(s: &str) -> std::result::Result<i8, String> {
    match s.trim() {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(format!("epsilon must be +1 or -1, got {other:?}")),
    }
}

fn read_source(src: &str) -> Result<String> {
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    std::fs::read_to_string(Path::new(src)).with_context(|| format!("reading {src}"))
}

fn load_tuple(src: &str) -> Result<StandardTuple> {
    Ok(StandardTuple::from_json(&read_source(src)?)?)
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn sets(xs: &[IndexSet]) -> String {
    if xs.is_empty() {
        "(none)".into()
    } else {
        xs.iter()
            .map(IndexSet::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "n/a".into(), |v| v.to_string())
}

fn dyadic_line(label: &str, d: Dyadic) -> String {
    format!("{label}: {d} = {}\n", d.to_decimal())
}

fn tuple_text(t: &StandardTuple) -> String {
    format!(
        "tuple: a=({}) b=({}) s={}\n",
        join(t.a()),
        join(t.b()),
        t.s()
    )
}

fn analysis_text(r: &DensityAnalysis) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "k: {}", r.k);
    let _ = writeln!(s, "sigma: ({})", join(&r.sigma));
    let _ = writeln!(s, "kmax: {}", sets(r.kmax.members()));
    for rep in r.lambda_prime.reps() {
        let _ = writeln!(
            s,
            "lambda_prime: I={} S={{{}}} Z={}",
            rep.i,
            join(&rep.s_values),
            rep.z
        );
    }
    if r.lambda_prime.is_empty() {
        let _ = writeln!(s, "lambda_prime: (none)");
    }
    let _ = writeln!(s, "sigma_set: {}", r.sigma_set);
    let _ = writeln!(s, "sigma_set_columns: {}", r.sigma_set_columns);
    let _ = writeln!(s, "sigma_sets_agree: {}", r.sigma_sets_agree);
    let _ = writeln!(s, "sigma_count: {}", r.sigma_count);
    let _ = writeln!(s, "classes: {}", sets(&r.classes));
    let _ = writeln!(s, "mu: {}", r.mu);
    let _ = writeln!(s, "m1: {}", sets(&r.m1));
    let _ = writeln!(s, "i0: {}", opt(r.i0));
    let _ = writeln!(s, "varpi0: {}", opt(r.varpi0));
    let _ = writeln!(s, "d: {}", r.d);
    let _ = writeln!(s, "epsilon: {}", opt(r.epsilon));
    let _ = writeln!(s, "condition39: {}", r.condition39);
    let _ = writeln!(s, "alpha: {}", opt(r.alpha));
    let _ = writeln!(s, "beta: {}", opt(r.beta));
    let _ = writeln!(s, "omega: {}", opt(r.omega));
    let _ = writeln!(s, "signature_rank: {}", r.signature_rank);
    let _ = writeln!(s, "blocks: {}", r.blocks);
    let _ = writeln!(s, "cells: {}", r.cells);
    let _ = writeln!(s, "formula_path: {}", r.formula_path);
    match r.formula_density {
        Some(f) => s.push_str(&dyadic_line("formula_density", f)),
        None => s.push_str("formula_density: n/a\n"),
    }
    let _ = writeln!(s, "formula_matches: {}", opt(r.formula_matches));
    s.push_str(&dyadic_line("density_plus", r.density_plus));
    s.push_str(&dyadic_line("density_minus", r.density_minus));
    s
}

fn checks_text(checks: &[CheckOutcome]) -> String {
    let mut s = String::new();
    for c in checks {
        let status = match c.passed {
            Some(true) => "ok",
            Some(false) => "FAILED",
            None => "skipped",
        };
        let _ = writeln!(s, "check {}: {status} ({})", c.name, c.detail);
    }
    s
}

fn empirical_text(r: &EmpiricalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "prime_bound: {}", r.prime_bound);
    let _ = writeln!(s, "primes_considered: {}", r.primes_considered);
    let _ = writeln!(s, "allowable_count: {}", r.allowable_count);
    let _ = writeln!(s, "pi_plus_count: {}", r.pi_plus_count);
    s.push_str(&dyadic_line("theoretical_density", r.theoretical_density));
    let _ = writeln!(
        s,
        "estimated_density: {} ~ {}",
        r.estimated_density,
        r.estimated_density.to_decimal(6)
    );
    let _ = writeln!(
        s,
        "absolute_error: {} ~ {}",
        r.absolute_error,
        r.absolute_error.to_decimal(6)
    );
    s
}

fn qcount_text(r: &QCountReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p: {}", r.p);
    let _ = writeln!(s, "epsilon: {:+}", r.epsilon);
    let _ = writeln!(s, "q_count: {}", r.q_count);
    let _ = writeln!(s, "b_max: {}", r.b_max);
    let _ = writeln!(s, "kappa: {}", r.kappa);
    let _ = writeln!(
        s,
        "predicted: {} ~ {}",
        r.predicted,
        r.predicted.to_decimal(3)
    );
    let _ = writeln!(s, "ratio: {} ~ {}", r.ratio, r.ratio.to_decimal(4));
    let _ = writeln!(s, "allowable: {}", r.allowable);
    let _ = writeln!(s, "in_pi_plus: {}", opt(r.in_pi_plus));
    s
}

/// Output text and whether any check failed.
fn run(cli: Cli) -> Result<(String, bool)> {
    match cli.command {
        Command::Analyze { input, out, check } => {
            let t = load_tuple(&input.tuple)?;
            let p = Pipeline::new(&t)?;
            let r = analyze_pipeline(&p)?;
            let checks = if check { Some(run_checks(&p)?) } else { None };
            let failed = checks.iter().flatten().any(CheckOutcome::failed);
            let text = match out.format {
                Format::Json => match &checks {
                    None => r.to_json() + "\n",
                    Some(c) => pretty(&json!({ "analysis": r, "checks": c })),
                },
                Format::Text => {
                    let mut s = tuple_text(&t) + &analysis_text(&r);
                    if let Some(c) = &checks {
                        s += &checks_text(c);
                    }
                    s
                }
            };
            Ok((text, failed))
        }
        Command::Density { input, out } => {
            let r = qrd::analyze(&load_tuple(&input.tuple)?)?;
            let text = match out.format {
                Format::Json => pretty(&json!({
                    "density_plus": r.density_plus,
                    "decimal": r.density_plus.to_decimal(),
                    "density_minus": r.density_minus,
                    "formula_path": r.formula_path,
                })),
                Format::Text => format!("{}\n{}\n", r.density_plus, r.density_plus.to_decimal()),
            };
            Ok((text, false))
        }
        Command::Empirical {
            input,
            bound,
            out,
            verbose,
        } => {
            let t = load_tuple(&input.tuple)?;
            if verbose {
                let rows = empirical::prime_rows(&t, bound)?;
                let mut err = std::io::stderr().lock();
                writeln!(err, "{}", empirical::PrimeRow::CSV_HEADER)?;
                for row in rows {
                    writeln!(err, "{}", row.to_csv())?;
                }
            }
            let r = empirical::empirical_density(&t, bound)?;
            let text = match out.format {
                Format::Json => pretty(&r),
                Format::Text => empirical_text(&r),
            };
            Ok((text, false))
        }
        Command::Qcount {
            input,
            prime,
            epsilon,
            out,
        } => {
            let t = load_tuple(&input.tuple)?;
            let r = empirical::q_epsilon_count(prime, &t, epsilon)?;
            let text = match out.format {
                Format::Json => pretty(&r),
                Format::Text => qcount_text(&r),
            };
            Ok((text, false))
        }
        Command::Generate { spec, out } => {
            let g = GeneratorSpec::from_json(&read_source(&spec)?)?;
            let t = g.generate()?;
            let r = qrd::analyze(&t)?;
            let text = match out.format {
                Format::Json => pretty(&json!({ "tuple": t, "analysis": r })),
                Format::Text => tuple_text(&t) + &analysis_text(&r),
            };
            Ok((text, false))
        }
        Command::Render { tuple, gaps, s } => {
            let text = match (tuple, gaps, s) {
                (Some(src), _, _) => {
                    let st = build_structure(&load_tuple(&src)?)?;
                    render_ascii(&quotient_diagram(&st))
                }
                (None, Some(gaps), Some(s)) => render_overlap(&OverlapDiagram::new(gaps, s)?),
                _ => bail!("render needs --tuple, or --gaps with --s"),
            };
            Ok((text, false))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, failed)) => {
            print!("{text}");
            if failed {
                eprintln!("error: at least one internal check failed");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let kind = match e.downcast_ref::<qrd::Error>() {
                Some(qrd::Error::Domain(_)) => "domain",
                Some(qrd::Error::InvalidTuple(_)) => "invalid-tuple",
                Some(qrd::Error::SizeLimit { .. }) => "size-limit",
                Some(qrd::Error::Resource(_)) => "resource",
                Some(qrd::Error::WrongPath(_)) => "wrong-path",
                Some(qrd::Error::Consistency(_)) => "consistency",
                None => "input",
            };
            eprintln!("error[{kind}]: {e:#}");
            ExitCode::from(1)
        }
    }
}

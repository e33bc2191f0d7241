//! `evoset`: exact analysis, bounds and verification reports for finite
//! Markov chains.
//!
//! Exit status: 0 on success, 1 when an analysis or check fails, 2 on input
//! or usage errors.

mod input;
mod report;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use evoset_core::evoset::{exact_step_check, simulate, tv_domination_check};
use evoset_core::exact::{mixing_curve, mixing_curve_from, DistanceKind};
use evoset_core::iso::{ConcaveFn, Isoperimetry};
use evoset_core::verify::{
    check_lemma_ineq, check_lemma_sinc, check_worst_case_lemma, default_suite, dominance_harness,
    HarnessOptions,
};
use serde_json::{json, Value};

use spec::ChainArgs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Analysis(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Analysis(_) => 1,
        }
    }

    pub fn analysis(e: impl std::fmt::Display) -> Self {
        Self::Analysis(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "evoset",
    version,
    about = "Mixing-time bounds for finite Markov chains, checked against exact computation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Lemma {
    Ineq,
    Sinc,
    WorstCase,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Default,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Tv,
    L2,
    Linf,
    Entropy,
}

impl From<Kind> for DistanceKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Tv => Self::Tv,
            Kind::L2 => Self::L2,
            Kind::Linf => Self::Linf,
            Kind::Entropy => Self::RelativeEntropy,
        }
    }
}

fn parse_fn(s: &str) -> Result<ConcaveFn, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = ConcaveFn::ALL.iter().map(|f| f.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectrum, gaps, exact mixing times, isoperimetric summary, every
    /// bound and the dominance checks, as JSON.
    Analyze {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.05, 0.01])]
        eps: Vec<f64>,
        /// Step cap for the exact mixing times.
        #[arg(long, default_value_t = 10_000)]
        t_max: usize,
        /// Evolving-set trials for the sampled checks (0 skips them).
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// C_f(r) profile as CSV (`r,C_f(r)`).
    Profile {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value = "sin_pi", value_parser = parse_fn)]
        f: ConcaveFn,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolving-set trajectories as CSV (`trial,t,measure`).
    SimulateEvoset {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also check TV domination and the exact per-set contraction; the
        /// verdicts go to this JSON file (or stderr when `-`).
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Grid or randomized checks of the inequalities the bounds rest on.
    Verify {
        #[arg(long, value_enum)]
        lemma: Lemma,
        /// Points per axis (default 200 for ineq, 300 for sinc).
        #[arg(long)]
        resolution: Option<usize>,
        /// Random profiles for the worst-case check.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact quantities against every applicable bound over a chain suite.
    Harness {
        #[arg(long, value_enum, default_value = "default")]
        suite: Suite,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.05, 0.01])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// JSON table (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Self-test: corrupt one exact value so the table must fail.
        #[arg(long, hide = true)]
        inject_corruption: bool,
    },
    /// Distance to stationarity per step as CSV (`t,distance`).
    MixingCurve {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, value_enum, default_value = "tv")]
        kind: Kind,
        #[arg(long, default_value_t = 100)]
        t_max: usize,
        /// Single start state (default: worst over all starts).
        #[arg(long)]
        start: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    let res = match out {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, bytes),
        _ => std::io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<(), csv::Error>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(CliError::analysis)?;
    Ok(buf)
}

/// Pretty JSON with keys sorted (serde_json maps are ordered by key).
fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s.into_bytes()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn verdict(passed: bool, what: &str) -> Result<(), CliError> {
    if passed {
        Ok(())
    } else {
        Err(CliError::Analysis(format!("{what} failed")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            chain,
            eps,
            t_max,
            trials,
            seed,
            out,
        } => {
            if eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
                return Err(CliError::Input("--eps values must be positive".into()));
            }
            let built = chain.build()?;
            let (value, passed) =
                report::analyze(&built, &chain.transform_names(), &eps, t_max, trials, seed)?;
            emit(out.as_ref(), &json_bytes(&value))?;
            verdict(passed, "dominance check")
        }
        Command::Profile { chain, f, out } => {
            let built = chain.build()?;
            let iso =
                Isoperimetry::new(&built.kernel).map_err(|e| CliError::Input(e.to_string()))?;
            let bytes = csv_bytes(|b| iso.c_f_profile(f).write_csv(b))?;
            emit(out.as_ref(), &bytes)
        }
        Command::SimulateEvoset {
            chain,
            trials,
            steps,
            seed,
            start,
            out,
            check,
        } => {
            let built = chain.build()?;
            let k = &built.kernel;
            if start >= k.n() {
                return Err(CliError::Input(format!(
                    "--start {start} out of range for {} states",
                    k.n()
                )));
            }
            let trace = simulate(k, start, steps, trials, seed)
                .map_err(|e| CliError::Input(e.to_string()))?;
            emit(out.as_ref(), &csv_bytes(|b| trace.write_csv(b))?)?;
            let Some(path) = check else { return Ok(()) };
            let curve =
                mixing_curve_from(k, start, DistanceKind::Tv, steps).map_err(CliError::analysis)?;
            let tv = tv_domination_check(&trace, &curve).map_err(CliError::analysis)?;
            let iso = Isoperimetry::new(k).map_err(CliError::analysis)?;
            let f = ConcaveFn::SinPi;
            let c = iso.c_f(f, true);
            let exact = exact_step_check(&iso, &trace, f, c).map_err(CliError::analysis)?;
            let tv_ok = tv.iter().all(|v| v.passed);
            let v = json!({
                "chain": built.name,
                "c_sin": c,
                "exact_step": to_value(&exact),
                "passed": tv_ok && exact.passed,
                "tv_domination": {
                    "passed": tv_ok,
                    "failures": tv.iter().filter(|v| !v.passed).map(to_value).collect::<Vec<_>>(),
                    "worst": tv.iter().max_by(|a, b| (a.excess - a.margin).total_cmp(&(b.excess - b.margin))).map(to_value),
                },
            });
            if path.as_os_str() == "-" {
                eprint!("{}", String::from_utf8_lossy(&json_bytes(&v)));
            } else {
                std::fs::write(&path, json_bytes(&v))
                    .map_err(|e| CliError::Input(e.to_string()))?;
            }
            verdict(tv_ok && exact.passed, "evolving-set check")
        }
        Command::Verify {
            lemma,
            resolution,
            trials,
            seed,
            out,
        } => {
            let (v, passed) = match lemma {
                Lemma::Ineq => {
                    let r = check_lemma_ineq(resolution.unwrap_or(200));
                    (to_value(&r), r.passed())
                }
                Lemma::Sinc => {
                    let r = check_lemma_sinc(resolution.unwrap_or(300));
                    (to_value(&r), r.passed())
                }
                Lemma::WorstCase => {
                    let r = check_worst_case_lemma(resolution.unwrap_or(trials), seed);
                    (to_value(&r), r.passed())
                }
            };
            emit(out.as_ref(), &json_bytes(&v))?;
            verdict(passed, "verification")
        }
        Command::Harness {
            suite: Suite::Default,
            eps,
            trials,
            steps,
            seed,
            out,
            csv,
            inject_corruption,
        } => {
            if eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
                return Err(CliError::Input("--eps values must be positive".into()));
            }
            let chains = default_suite().map_err(CliError::analysis)?;
            let opts = HarnessOptions {
                eps,
                evoset_trials: trials,
                evoset_horizon: steps,
                seed,
                inject_corruption,
            };
            let table = dominance_harness(&chains, &opts).map_err(CliError::analysis)?;
            let v: Value = serde_json::from_str(&table.to_json()).expect("harness JSON parses");
            emit(out.as_ref(), &json_bytes(&v))?;
            if let Some(path) = csv {
                let bytes = csv_bytes(|b| table.write_csv(b))?;
                std::fs::write(&path, bytes).map_err(|e| CliError::Input(e.to_string()))?;
            }
            let failures = table.failures().count();
            eprintln!("{} rows, {failures} failing", table.rows.len());
            if let Some(w) = table.witness() {
                eprintln!("witness: {w}");
            }
            verdict(table.passed(), "dominance harness")
        }
        Command::MixingCurve {
            chain,
            kind,
            t_max,
            start,
            out,
        } => {
            let built = chain.build()?;
            let k = &built.kernel;
            let curve = match start {
                Some(s) if s >= k.n() => {
                    return Err(CliError::Input(format!(
                        "--start {s} out of range for {} states",
                        k.n()
                    )))
                }
                Some(s) => mixing_curve_from(k, s, kind.into(), t_max),
                None => mixing_curve(k, kind.into(), t_max),
            }
            .map_err(CliError::analysis)?;
            emit(out.as_ref(), &csv_bytes(|b| curve.write_csv(b))?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

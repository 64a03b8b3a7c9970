//! Command-line front end for `etameasure`.
//!
//! [`run_command`] parses arguments, runs one subcommand, writes its report
//! to the given writer and returns the process exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use etameasure::io::{parse_state, state_to_json, ReportDocument, StateFile};
use etameasure::optimize::{DEFAULT_MAX_ITERS, DEFAULT_RESTARTS};
use etameasure::table1::check_against_reference;
use etameasure::{
    classify_with, eta_measure_with, maximize_eta, random_state, reproduce_table1, Classification,
    Error, MeasureOptions, PureState, SupportPattern, EPS_ZERO,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "etameasure",
    version,
    about = "Partial-entropy entanglement measure for qubit pure states"
)]
pub struct Cli {
    /// Entropy threshold in bits below which a cut counts as unentangled.
    #[arg(long, global = true, default_value_t = EPS_ZERO)]
    pub tolerance: f64,

    /// Output format. Defaults to json for `entropies` and `random`, text otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies of every reduced state, with eta and the separable partition.
    Entropies { state: PathBuf },
    /// The measure eta.
    Eta { state: PathBuf },
    /// Verdict, eta, partition and block factors.
    Classify { state: PathBuf },
    /// Maximize eta over the amplitudes on a support pattern.
    Maximize {
        /// Comma-separated bitstrings, e.g. 000,110,101.
        #[arg(long, value_delimiter = ',', required = true)]
        support: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Classify all 56 three-term patterns over three qubits.
    Table1 {
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Haar-random state file.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::DimensionMismatch(_) | Error::EmptyState => EXIT_BAD_INPUT,
            Error::NumericalFailure(_) | Error::FactorExtractionFailure(_) => EXIT_NUMERICAL,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs `argv` (program name first) and returns the exit code. Reports go to
/// `out`, diagnostics to `err`.
pub fn run_command<I, T>(argv: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok((code, report)) => {
            let _ = out.write_all(report.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command and returns its exit code and report.
pub fn execute(cli: &Cli) -> Result<(i32, String), Failure> {
    let opts = MeasureOptions {
        zero_tol: cli.tolerance,
        ..MeasureOptions::default()
    };
    if !(cli.tolerance.is_finite() && cli.tolerance >= 0.0) {
        return Err(Failure {
            code: EXIT_BAD_INPUT,
            message: format!(
                "tolerance must be a nonnegative number, got {}",
                cli.tolerance
            ),
        });
    }
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Entropies { state } => {
            let c = classify_with(&load_state(state)?, &opts)?;
            Ok((EXIT_OK, entropies_report(&c, fmt(Format::Json))))
        }
        Command::Eta { state } => {
            let eta = eta_measure_with(&load_state(state)?, &opts)?;
            let report = match fmt(Format::Text) {
                Format::Json => json(&serde_json::json!({ "eta": eta })),
                Format::Text => format!("{eta:.6}\n"),
            };
            Ok((EXIT_OK, report))
        }
        Command::Classify { state } => {
            let c = classify_with(&load_state(state)?, &opts)?;
            Ok((EXIT_OK, classify_report(&c, fmt(Format::Text))))
        }
        Command::Maximize {
            support,
            restarts,
            seed,
            max_iters,
        } => {
            let pattern = SupportPattern::from_bitstrings(support).map_err(|e| Failure {
                code: EXIT_BAD_INPUT,
                message: e.to_string(),
            })?;
            let r = maximize_eta(&pattern, *restarts, *max_iters, *seed)?;
            let doc = MaximizeDocument {
                best_eta: r.best_eta,
                converged: r.converged,
                restarts_used: r.restarts_used,
                state: StateFile::from_state(&r.best_state),
                history: r.history,
            };
            let report = match fmt(Format::Text) {
                Format::Json => json(&doc),
                Format::Text => {
                    let mut s = format!(
                        "best_eta: {:.6}\nconverged: {}\nrestarts_used: {}\n",
                        doc.best_eta, doc.converged, doc.restarts_used
                    );
                    s.push_str(&terms_text(&r.best_state));
                    s
                }
            };
            Ok((EXIT_OK, report))
        }
        Command::Table1 { trials, seed } => {
            let rows = reproduce_table1(*trials, *seed)?;
            let check = check_against_reference(&rows);
            let code = if check.matches_reference() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            };
            let report = match fmt(Format::Text) {
                Format::Json => json(&Table1Document {
                    rows: rows
                        .iter()
                        .map(|r| Table1RowRecord {
                            pattern: r.pattern_label.clone(),
                            support: r.support.bitstrings(),
                            case: r.case.to_string(),
                            partition: r.witness_partition.clone(),
                        })
                        .collect(),
                    case_i: check.case_i,
                    case_ii: check.case_ii,
                    mismatches: check.mismatches.clone(),
                }),
                Format::Text => {
                    let mut s = String::new();
                    for r in &rows {
                        let _ = write!(
                            s,
                            "|{}> {} Case {}",
                            r.pattern_label,
                            r.support.bitstrings().join(","),
                            r.case
                        );
                        if let Some(p) = &r.witness_partition {
                            let _ = write!(s, " {}", partition_text(p));
                        }
                        s.push('\n');
                    }
                    if !check.mismatches.is_empty() {
                        let _ = writeln!(s, "mismatches: {}", check.mismatches.join(","));
                    }
                    let _ = writeln!(s, "Case I: {}, Case II: {}", check.case_i, check.case_ii);
                    s
                }
            };
            Ok((code, report))
        }
        Command::Random { n, seed } => {
            let state = random_state(*n, *seed).map_err(|e| Failure {
                code: EXIT_BAD_INPUT,
                message: e.to_string(),
            })?;
            let report = match fmt(Format::Json) {
                Format::Json => format!("{}\n", state_to_json(&state)),
                Format::Text => format!("n: {n}\n{}", terms_text(&state)),
            };
            Ok((EXIT_OK, report))
        }
    }
}

#[derive(Serialize)]
struct MaximizeDocument {
    best_eta: f64,
    converged: bool,
    restarts_used: usize,
    state: StateFile,
    history: Vec<(usize, f64)>,
}

#[derive(Serialize)]
struct Table1RowRecord {
    pattern: String,
    support: Vec<String>,
    case: String,
    partition: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize)]
struct Table1Document {
    rows: Vec<Table1RowRecord>,
    case_i: usize,
    case_ii: usize,
    mismatches: Vec<String>,
}

#[derive(Serialize)]
struct BlockRecord {
    particles: Vec<usize>,
    state: StateFile,
}

#[derive(Serialize)]
struct ClassifyDocument {
    verdict: String,
    eta: f64,
    partition: Vec<Vec<usize>>,
    factors: Vec<BlockRecord>,
}

fn load_state(path: &Path) -> Result<PureState, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_BAD_INPUT,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_state(&text).map_err(|e| Failure {
        code: EXIT_BAD_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn json<T: Serialize>(value: &T) -> String {
    format!(
        "{}\n",
        serde_json::to_string_pretty(value).expect("report serializes")
    )
}

fn partition_text(p: &[Vec<usize>]) -> String {
    p.iter()
        .map(|b| {
            format!(
                "{{{}}}",
                b.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn terms_text(state: &PureState) -> String {
    state
        .to_terms()
        .iter()
        .map(|t| {
            format!(
                "{} {:+.12} {:+.12}i\n",
                t.bitstring, t.amplitude.re, t.amplitude.im
            )
        })
        .collect()
}

fn entropies_report(c: &Classification, format: Format) -> String {
    let doc = ReportDocument::from_classification(c);
    match format {
        Format::Json => json(&doc),
        Format::Text => {
            let mut s = format!("n: {}\n", doc.n);
            for e in &doc.entropies {
                let _ = writeln!(s, "S({}): {:.12}", e.kept, e.s);
            }
            let _ = writeln!(s, "eta: {:.12}", doc.eta);
            let _ = writeln!(s, "verdict: {}", doc.verdict);
            let _ = writeln!(s, "partition: {}", partition_text(&doc.partition));
            s
        }
    }
}

fn classify_report(c: &Classification, format: Format) -> String {
    match format {
        Format::Json => json(&ClassifyDocument {
            verdict: c.verdict.to_string(),
            eta: c.eta,
            partition: c.partition.clone(),
            factors: c
                .factors
                .iter()
                .map(|b| BlockRecord {
                    particles: b.particles.clone(),
                    state: StateFile::from_state(&b.factor),
                })
                .collect(),
        }),
        Format::Text => format!(
            "verdict: {}\neta: {:.6}\npartition: {}\n",
            c.verdict,
            c.eta,
            partition_text(&c.partition)
        ),
    }
}

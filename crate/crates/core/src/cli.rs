//! Command-line dispatcher. Output is JSON-lines (CSV for `sieve --format
//! csv`); every number is an integer or a `"p/q"` string.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::certificate::{self, Certificate, DiagnosticsReport};
use crate::geometry::{classify_packing, GeometryError, LatticeBasis};
use crate::search::{search_dimension, SearchConfig, SearchError};
use crate::sieve::{run_sieve, summarize, SieveRecord, Stage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Read when `search` is given no `--budget`.
pub const SEARCH_BUDGET_ENV: &str = "APLL_SEARCH_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "apll", version, about = "Almost perfect Lee code tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the dimension sieve on 1..=max.
    Sieve {
        #[arg(long)]
        max: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Last stage to apply; stages are cumulative.
        #[arg(long, default_value = "all")]
        stage: Stage,
    },
    /// Check the defining equations and necessary conditions of a certificate file.
    Verify { file: PathBuf },
    /// Full diagnostic battery, including the partition profile.
    Analyze { file: PathBuf },
    /// Exhaustive certificate search over every abelian group of order n^2+n+1.
    Search {
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        budget: Option<u64>,
        /// Keep one certificate per orbit under power automorphisms.
        #[arg(long)]
        dedupe: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Packing and covering report for a lattice basis file.
    Lattice {
        file: PathBuf,
        #[arg(long)]
        r: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::input(format!("write failed: {e}"))
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command. Reports
/// go to `out`, diagnostics to `err`; the return value is the exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            let _ = if help {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return if help { EXIT_OK } else { EXIT_INPUT };
        }
    };
    let result = match cli.command {
        Command::Sieve { max, format, stage } => sieve(out, err, max, format, stage),
        Command::Verify { file } => verify(out, &file),
        Command::Analyze { file } => analyze(out, &file),
        Command::Search {
            n,
            budget,
            dedupe,
            jobs,
        } => search(out, n, budget, dedupe, jobs),
        Command::Lattice { file, r } => lattice(out, &file, r),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn line(out: &mut dyn Write, value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn sieve(out: &mut dyn Write, err: &mut dyn Write, max: u64, format: Format, stage: Stage) -> Outcome {
    if max == 0 {
        return Err(Failure::input("--max must be at least 1"));
    }
    let records = run_sieve(max, stage);
    let summary = json!({ "summary": summarize(&records, stage) });
    match format {
        Format::Json => {
            for r in &records {
                line(out, r)?;
            }
            line(out, &summary)?;
        }
        Format::Csv => {
            writeln!(out, "{}", SieveRecord::csv_header())?;
            for r in &records {
                writeln!(out, "{}", r.csv_row())?;
            }
            line(err, &summary)?;
        }
    }
    Ok(EXIT_OK)
}

fn load_certificate(path: &Path) -> Result<Certificate, Failure> {
    read(path)?
        .parse()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit_report(out: &mut dyn Write, report: &DiagnosticsReport) -> io::Result<()> {
    for e in report.entries() {
        line(out, e)?;
    }
    Ok(())
}

fn emit_summary(out: &mut dyn Write, report: &DiagnosticsReport) -> Outcome {
    let passed = report.passed();
    let failures: Vec<&str> = report.failures().filter(|e| !e.advisory).map(|e| e.check).collect();
    line(out, &json!({ "summary": { "passed": passed, "failures": failures } }))?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn verify(out: &mut dyn Write, path: &Path) -> Outcome {
    let c = load_certificate(path)?;
    let mut report = certificate::verify_certificate(&c);
    report.extend(certificate::necessary_conditions(&c));
    emit_report(out, &report)?;
    emit_summary(out, &report)
}

fn analyze(out: &mut dyn Write, path: &Path) -> Outcome {
    let c = load_certificate(path)?;
    let analysis = certificate::analyze(&c).map_err(|e| Failure::input(e.to_string()))?;
    emit_report(out, &analysis.report)?;
    if let Some(p) = &analysis.profile {
        line(out, &json!({ "profile": p }))?;
    }
    emit_summary(out, &analysis.report)
}

fn search(out: &mut dyn Write, n: u64, budget: Option<u64>, dedupe: bool, jobs: Option<usize>) -> Outcome {
    let budget = match budget {
        Some(b) => Some(b),
        None => match std::env::var(SEARCH_BUDGET_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Failure::input(format!("{SEARCH_BUDGET_ENV}: not an integer: {v:?}")))?,
            ),
            Err(_) => None,
        },
    };
    let cfg = SearchConfig {
        n,
        work_budget: budget,
        dedupe_by_automorphism: dedupe,
        parallel_width: jobs,
        pruning: true,
    };
    let outcomes = search_dimension(&cfg).map_err(|e| match e {
        SearchError::BudgetRequired(_) => Failure::input(format!("{e}; pass --budget or set {SEARCH_BUDGET_ENV}")),
        _ => Failure::input(e.to_string()),
    })?;
    let mut exhausted = true;
    for o in &outcomes {
        for c in &o.certificates {
            write!(out, "{c}")?;
        }
        let mut summary = json!({
            "group": o.group.invariant_factors(),
            "certificates": o.certificates.len(),
            "exhausted": o.exhausted,
            "nodes_visited": o.nodes_visited,
        });
        if dedupe {
            summary["dedupe"] = json!("power_automorphism_orbits");
        }
        line(out, &json!({ "summary": summary }))?;
        exhausted &= o.exhausted;
    }
    Ok(if exhausted { EXIT_OK } else { EXIT_BUDGET })
}

fn lattice(out: &mut dyn Write, path: &Path, r: u64) -> Outcome {
    let basis: LatticeBasis = read(path)?
        .parse()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    match classify_packing(&basis, r) {
        Ok(report) => {
            line(out, &report)?;
            Ok(EXIT_OK)
        }
        Err(e @ GeometryError::BudgetExceeded { .. }) => Err(Failure {
            code: EXIT_BUDGET,
            message: e.to_string(),
        }),
        Err(e) => Err(Failure::input(e.to_string())),
    }
}

//! Batch front end: one subcommand per verification suite.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
//! input error, 3 the time budget was exceeded.

pub mod config;
pub mod report;
pub mod suites;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};
use config::{split_config, Common};
use report::{Record, Report, Verdict};
use suites::{Ctx, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Subcommand)]
pub enum Command {
    /// Defining relations reduce to zero under the rewriting engine.
    Relations,
    /// Truncated Fock representation: norms, CCR, Weyl and von Neumann checks.
    Rep,
    /// Laplace-transform representation of resolvents.
    Laplace,
    /// Quasifree state values against the Fock vacuum.
    Quasifree,
    /// Dirac states on a constraint set.
    Dirac,
    /// Interaction cocycles, Dyson series and commutator tails.
    Cocycle,
    /// Oscillator lattice: ground states, superadditivity, sandwich bounds.
    Lattice,
    /// Symplectic bases and regularity decompositions.
    Decompose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Relations => "relations",
            Command::Rep => "rep",
            Command::Laplace => "laplace",
            Command::Quasifree => "quasifree",
            Command::Dirac => "dirac",
            Command::Cocycle => "cocycle",
            Command::Lattice => "lattice",
            Command::Decompose => "decompose",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        <Command as ValueEnum>::value_variants()
            .iter()
            .copied()
            .find(|c| c.name() == name)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "resalg",
    version,
    about = "Resolvent algebra verification suites"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file; omitted keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for report.json, report.txt and CSV series.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub tolerance_scale: Option<f64>,
}

/// Command-line values that take precedence over the config document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub tolerance_scale: Option<f64>,
}

fn parse<T: DeserializeOwned>(doc: Value) -> Result<(Common, T)> {
    split_config(doc)
}

fn build(command: Command, doc: Value) -> Result<(Common, Suite)> {
    macro_rules! go {
        ($f:path) => {{
            let (c, s) = parse(doc)?;
            (c, $f(s)?)
        }};
    }
    Ok(match command {
        Command::Relations => go!(suites::relations),
        Command::Rep => go!(suites::rep),
        Command::Laplace => go!(suites::laplace),
        Command::Quasifree => go!(suites::quasifree),
        Command::Dirac => go!(suites::dirac),
        Command::Cocycle => go!(suites::cocycle),
        Command::Lattice => go!(suites::lattice),
        Command::Decompose => go!(suites::decompose),
    })
}

/// Runs one suite from a config document. Configuration problems are errors;
/// failed checks are reported in the returned records.
pub fn run_config(command: Command, doc: Value, ov: &Overrides) -> Result<Report> {
    let (common, suite) = build(command, doc)?;
    if let Some(name) = &common.command {
        if name != command.name() {
            return Err(Error::InvalidArgument(format!(
                "config is for '{name}', not '{}'",
                command.name()
            )));
        }
    }
    let seed = ov.seed.or(common.seed);
    if suite.randomized && seed.is_none() {
        return Err(Error::InvalidArgument(format!(
            "'{}' draws random instances and needs a seed",
            command.name()
        )));
    }
    let tol_scale = ov.tolerance_scale.or(common.tolerance_scale).unwrap_or(1.0);
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        return Err(Error::InvalidArgument(
            "tolerance_scale must be positive".into(),
        ));
    }
    let threads = ov.threads.or(common.threads).unwrap_or(1).max(1);
    let budget = common.time_budget_s.map(Duration::from_secs_f64);
    let ctx = Ctx { seed, tol_scale };
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let records: Vec<Record> = pool.install(|| {
        suite
            .jobs
            .par_iter()
            .enumerate()
            .map(|(k, job)| {
                if budget.is_some_and(|b| start.elapsed() > b) {
                    let mut r = Record::new(format!("job/{k}"), Value::Null)
                        .note("time budget exceeded before start");
                    r.budget_exceeded = true;
                    return r;
                }
                job(&ctx)
            })
            .collect()
    });
    let series = (suite.series)(&records);
    let mut report = Report::new(command.name(), seed, tol_scale, records, series);
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    if budget.is_some_and(|b| start.elapsed() > b) {
        report.budget_exceeded = true;
    }
    Ok(report)
}

pub fn exit_code(report: &Report) -> i32 {
    if report.budget_exceeded {
        EXIT_BUDGET
    } else if report.has_failures() {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

fn load(path: Option<&PathBuf>) -> Result<Value> {
    match path {
        None => Ok(Value::Object(Default::default())),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        }
    }
}

/// Parses arguments, runs the suite, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let ov = Overrides {
        seed: cli.seed,
        threads: cli.threads,
        tolerance_scale: cli.tolerance_scale,
    };
    let result = load(cli.config.as_ref()).and_then(|doc| {
        let out = doc.get("out").and_then(Value::as_str).map(PathBuf::from);
        run_config(cli.command, doc, &ov).map(|r| (r, out))
    });
    let (report, cfg_out) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    print!("{}", report.text_table());
    if let Some(dir) = cli.out.or(cfg_out) {
        if let Err(e) = report.write(&dir) {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    }
    let failed: Vec<&str> = report
        .records
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| r.name.as_str())
        .collect();
    if !failed.is_empty() {
        eprintln!("failed: {}", failed.join(", "));
    }
    exit_code(&report)
}

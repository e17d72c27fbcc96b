//! `pro2eq`: classify finitely presented groups up to proper 2-equivalence.
//!
//! JSON results go to stdout and human-readable text to stderr. Exit codes:
//! 0 equivalent or determined, 1 inequivalent, 2 unknown or inconclusive,
//! 3 invalid input, 4 configuration or I/O failure, 5 resource limit.

mod cache;
mod commands;
mod config;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pro2eq_core::ENGINE_VERSION;

use commands::{split_pair, Context};
use config::{Config, ConfigFile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(e: impl ToString) -> Self {
        CliError {
            code: 3,
            message: e.to_string(),
        }
    }

    pub fn config(e: impl ToString) -> Self {
        CliError {
            code: 4,
            message: e.to_string(),
        }
    }

    pub fn io(e: impl ToString) -> Self {
        CliError {
            code: 4,
            message: e.to_string(),
        }
    }

    pub fn limit(e: impl ToString) -> Self {
        CliError {
            code: 5,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(name = "pro2eq", version = ENGINE_VERSION, about = "Proper 2-equivalence classifier for finitely presented groups")]
struct Cli {
    /// Disable the quarantined rules; affected verdicts degrade to UNKNOWN.
    #[arg(long, global = true)]
    strict_paper: bool,
    /// Tower stages examined by window checks.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Element budget for Cayley balls.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Minimum gap between the sweep radius and the outer radius.
    #[arg(long, global = true)]
    margin: Option<usize>,
    /// Result cache directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Print the derivation to stderr.
    #[arg(long, global = true)]
    explain: bool,
    /// Compact JSON on stdout and nothing on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Process one entry per line of FILE in parallel.
    #[arg(long, global = true, value_name = "FILE")]
    batch: Option<PathBuf>,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Annotation file for opaque groups.
    #[arg(long, global = true, value_name = "FILE")]
    annotations: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class label with derivation.
    Classify { expr: Option<String> },
    /// Verdict for a pair of groups.
    Compare { a: Option<String>, b: Option<String> },
    /// Invariant report with trace.
    Invariants { expr: Option<String> },
    /// Empirical end count from Cayley balls.
    Ends {
        expr: String,
        /// Largest removed ball radius.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Outer ball radius.
        #[arg(long = "R", default_value_t = 8)]
        radius: usize,
        /// Write the sweep table as TSV.
        #[arg(long, value_name = "FILE")]
        tsv: Option<PathBuf>,
        /// Write the ball as a DOT graph.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Tower analysis.
    #[command(subcommand)]
    Tower(TowerCommand),
}

#[derive(Subcommand)]
enum TowerCommand {
    /// Mittag-Leffler condition.
    Ml { file: PathBuf },
    /// Pro-triviality.
    Protrivial { file: PathBuf },
    /// Pro-group type of a telescopic tower.
    Type { file: PathBuf },
    /// Pro-isomorphism of two telescopic towers.
    Proiso { a: PathBuf, b: PathBuf },
}

fn config(cli: &Cli) -> Result<Config, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut c = Config::merge(file);
    if let Ok(dir) = std::env::var("PRO2EQ_CACHE") {
        if !dir.is_empty() {
            c.cache = Some(PathBuf::from(dir));
        }
    }
    if let Some(p) = &cli.cache {
        c.cache = Some(p.clone());
    }
    if let Some(p) = &cli.annotations {
        c.annotations = Some(p.clone());
    }
    c.depth = cli.depth.unwrap_or(c.depth);
    c.budget = cli.budget.unwrap_or(c.budget);
    c.margin = cli.margin.unwrap_or(c.margin);
    c.strict_paper |= cli.strict_paper;
    Ok(c)
}

fn missing(what: &str) -> CliError {
    CliError::input(format!("missing {what} (or use --batch FILE)"))
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let ctx = Context::new(config(&cli)?, cli.explain, cli.json)?;
    let batch = cli.batch.as_deref();
    match (&cli.command, batch) {
        (Command::Classify { expr: None }, Some(f)) => ctx.batch(f, |c, l| c.classify(l)),
        (Command::Classify { expr: Some(e) }, None) => ctx.classify(e),
        (Command::Classify { .. }, _) => Err(missing("expression")),
        (Command::Compare { a: None, b: None }, Some(f)) => ctx.batch(f, |c, l| {
            let (a, b) = split_pair(l)?;
            c.compare(a, b)
        }),
        (Command::Compare { a: Some(a), b: Some(b) }, None) => ctx.compare(a, b),
        (Command::Compare { .. }, _) => Err(missing("two expressions")),
        (Command::Invariants { expr: None }, Some(f)) => ctx.batch(f, |c, l| c.invariants(l)),
        (Command::Invariants { expr: Some(e) }, None) => ctx.invariants(e),
        (Command::Invariants { .. }, _) => Err(missing("expression")),
        (_, Some(_)) => Err(CliError::input("--batch applies to classify, compare and invariants")),
        (Command::Ends { expr, k, radius, tsv, dot }, None) => {
            ctx.ends(expr, *k, *radius, tsv.as_deref(), dot.as_deref())
        }
        (Command::Tower(t), None) => match t {
            TowerCommand::Ml { file } => ctx.tower_ml(file),
            TowerCommand::Protrivial { file } => ctx.tower_protrivial(file),
            TowerCommand::Type { file } => ctx.tower_type(file),
            TowerCommand::Proiso { a, b } => ctx.tower_proiso(a, b),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            let _ = std::io::stderr().write_all(out.stderr.as_bytes());
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

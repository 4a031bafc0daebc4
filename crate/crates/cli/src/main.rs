//! `rulesynth`: apply, sample and synthesize interpretation grammars.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O or other failure |
//! | 2 | bad command line |
//! | 3 | malformed grammar, config, lexicon or data file |
//! | 4 | no rule matches the input |
//! | 5 | evaluation budget or depth exceeded |
//! | 6 | arithmetic overflow |
//! | 7 | external proposer could not be started |
//! | 8 | request cannot be satisfied (bad sizes, unknown split, small pools) |
//!
//! Every invocation emits one JSON manifest line, to `--manifest` if given
//! and to stderr otherwise. Log verbosity comes from `RULESYNTH_LOG`.

mod commands;
mod external;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rulesynth::config::ConfigError;
use rulesynth::episodes::EpisodeError;
use rulesynth::metagrammar::MetaError;
use rulesynth::numeric::LexiconError;
use rulesynth::synthesis::SynthError;
use rulesynth::{EvalError, ParseError};

#[derive(Debug, Parser, Serialize)]
#[command(name = "rulesynth", version, about = "Interpretation grammar toolkit")]
pub struct Cli {
    /// Append the run manifest to this file instead of printing it on stderr.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Evaluate a grammar on one input.
    Apply(ApplyArgs),
    /// Print a shipped grammar.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
    },
    /// Draw grammars from a meta-grammar.
    Sample(SampleArgs),
    /// Generate a support/query episode.
    Episode(EpisodeArgs),
    /// Build, load or split the SCAN dataset.
    Scan {
        #[command(subcommand)]
        action: ScanAction,
    },
    /// Search for a grammar consistent with a support set.
    Synth(SynthArgs),
    /// Number-word episodes: evaluate a target grammar or synthesize one.
    Numbers(NumbersArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum FixtureName {
    Scan,
    ScanFigureOrder,
    NumbersA,
    NumbersB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum DomainArg {
    Miniscan,
    Scanlike,
    Scan,
    Number,
}

#[derive(Debug, Args, Serialize)]
pub struct ApplyArgs {
    pub grammar: PathBuf,
    /// Input words (a single quoted argument is split on whitespace).
    #[arg(required = true)]
    pub input: Vec<String>,
    /// Treat the grammar as a number grammar and report number-grammar
    /// syntax errors. Grammars that parse as number grammars are treated
    /// as such without it.
    #[arg(long)]
    pub numeric: bool,
    /// Surface-word lexicon used to translate the input (number grammars).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = rulesynth::grammar::DEFAULT_EVAL_BUDGET)]
    pub eval_budget: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub domain: DomainArg,
    /// Meta-grammar parameters (`key = value` lines).
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Write grammars here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EpisodeArgs {
    #[arg(value_enum)]
    pub domain: DomainArg,
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Support examples (compositional ones for the number domain).
    #[arg(long, default_value_t = 30)]
    pub n_support: usize,
    #[arg(long, default_value_t = 10)]
    pub n_query: usize,
    /// Longest input, in words (sequence domains).
    #[arg(long, default_value_t = 9)]
    pub max_len: usize,
    /// Use the test-time integer distribution (number domain).
    #[arg(long)]
    pub test_distribution: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum ScanAction {
    /// Write all 20,910 commands with their canonical translations.
    Build {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read an `IN: ... OUT: ...` file, normalize action names, report counts.
    Load {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write train.txt and test.txt for a split.
    Split {
        /// simple, length, add-jump or add-around-right.
        name: String,
        /// Dataset file; built from the canonical grammar when absent.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ProposerKind {
    Prior,
    Enum,
    Mcmc,
    External,
}

#[derive(Debug, Args, Serialize)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Wall-clock budget for the whole search.
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    /// Proposal budget; when given, the wall-clock budget is ignored.
    #[arg(long)]
    pub budget_proposals: Option<usize>,
    /// Prefilter probe count; 0 checks every example.
    #[arg(long, default_value_t = 4)]
    pub prefilter: usize,
    #[arg(long, default_value_t = rulesynth::grammar::DEFAULT_EVAL_BUDGET)]
    pub eval_budget: usize,
    /// Candidates checked concurrently.
    #[arg(long, default_value_t = 64)]
    pub batch_width: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ProposerArgs {
    #[arg(long, value_enum, default_value = "prior")]
    pub proposer: ProposerKind,
    /// Command producing blank-line-delimited grammars on stdout. It gets
    /// the support set in episode format on stdin.
    #[arg(long)]
    pub external_cmd: Option<String>,
    /// File of blank-line-delimited grammars (`-` for stdin).
    #[arg(long)]
    pub external_file: Option<PathBuf>,
    /// Meta-grammar parameters for the prior, enumeration and MCMC proposers.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// MCMC weight per satisfied support example.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Episode file to solve.
    #[arg(
        long,
        conflicts_with = "scan_split",
        required_unless_present = "scan_split"
    )]
    pub episode: Option<PathBuf>,
    /// Solve a SCAN split instead: support drawn from train, query = test.
    #[arg(long)]
    pub scan_split: Option<String>,
    /// SCAN dataset file; built from the canonical grammar when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Resample the support and retry until a consistent grammar is found.
    #[arg(long)]
    pub ransac: bool,
    #[arg(long, default_value_t = 100)]
    pub subset_size: usize,
    /// Per-subset wall-clock budget in RANSAC mode.
    #[arg(long, default_value_t = 20.0)]
    pub subset_seconds: f64,
    /// Per-subset proposal budget in RANSAC mode (overrides seconds).
    #[arg(long)]
    pub subset_proposals: Option<usize>,
    /// Select SCAN support uniformly instead of with the length and
    /// "opposite"/"around" heuristics.
    #[arg(long)]
    pub no_heuristics: bool,
    #[command(flatten)]
    pub proposer: ProposerArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Directory for best.grammar and report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum NumbersMode {
    Evaluate,
    Synth,
}

#[derive(Debug, Args, Serialize)]
pub struct NumbersArgs {
    /// Target number grammar; sampled from the meta-grammar when absent.
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    /// Surface-word lexicon; the grammar file is then written in surface words.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "evaluate")]
    pub mode: NumbersMode,
    #[arg(long, default_value_t = 30)]
    pub n_compositional: usize,
    #[arg(long, default_value_t = 50)]
    pub n_query: usize,
    /// Use the training-time integer distribution instead of the test one.
    #[arg(long)]
    pub train_distribution: bool,
    /// Integers checked by the invert/evaluate round trip.
    #[arg(long, default_value_t = 100)]
    pub roundtrip: usize,
    #[command(flatten)]
    pub proposer: ProposerArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// The external proposer command could not be started.
#[derive(Debug, thiserror::Error)]
#[error("cannot start external proposer {command:?}: {source}")]
pub struct SpawnError {
    pub command: String,
    #[source]
    pub source: std::io::Error,
}

/// A domain-level failure the command reports with a specific exit code.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct RequestError {
    pub message: String,
}

pub fn request_error(message: impl Into<String>) -> anyhow::Error {
    RequestError {
        message: message.into(),
    }
    .into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return match e {
                EvalError::NoMatch { .. } => 4,
                EvalError::BudgetExceeded { .. } => 5,
                EvalError::Overflow => 6,
            };
        }
        if cause.is::<ParseError>() || cause.is::<ConfigError>() || cause.is::<LexiconError>() {
            return 3;
        }
        if cause.is::<SpawnError>() {
            return 7;
        }
        if cause.is::<RequestError>() || cause.is::<MetaError>() {
            return 8;
        }
        if let Some(e) = cause.downcast_ref::<EpisodeError>() {
            return match e {
                EpisodeError::Format { .. } => 3,
                EpisodeError::Io { .. } => 1,
                _ => 8,
            };
        }
        if let Some(e) = cause.downcast_ref::<SynthError>() {
            return match e {
                SynthError::Episode(EpisodeError::Io { .. }) => 1,
                _ => 8,
            };
        }
    }
    1
}

fn unix_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'static str,
    config: &'a Command,
    seed: Option<u64>,
    version: &'static str,
    started_at: f64,
    finished_at: f64,
    exit_code: u8,
    result: Value,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Apply(_) => "apply",
        Command::Fixture { .. } => "fixture",
        Command::Sample(_) => "sample",
        Command::Episode(_) => "episode",
        Command::Scan { .. } => "scan",
        Command::Synth(_) => "synth",
        Command::Numbers(_) => "numbers",
    }
}

fn command_seed(c: &Command) -> Option<u64> {
    match c {
        Command::Sample(a) => Some(a.seed),
        Command::Episode(a) => Some(a.seed),
        Command::Scan {
            action: ScanAction::Split { seed, .. },
        } => Some(*seed),
        Command::Synth(a) => Some(a.budget.seed),
        Command::Numbers(a) => Some(a.budget.seed),
        _ => None,
    }
}

fn emit_manifest(cli: &Cli, manifest: &RunManifest<'_>) -> anyhow::Result<()> {
    let line = serde_json::to_string(manifest)?;
    match &cli.manifest {
        Some(path) => {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{line}")?;
        }
        None => eprintln!("{line}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RULESYNTH_LOG"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let started_at = unix_seconds();
    let outcome = commands::run(&cli.command);
    let (code, result) = match outcome {
        Ok(result) => (0, result),
        Err(err) => {
            eprintln!("error: {err:#}");
            (exit_code(&err), json!({ "error": format!("{err:#}") }))
        }
    };
    let manifest = RunManifest {
        command: command_name(&cli.command),
        config: &cli.command,
        seed: command_seed(&cli.command),
        version: env!("CARGO_PKG_VERSION"),
        started_at,
        finished_at: unix_seconds(),
        exit_code: code,
        result,
    };
    if let Err(err) = emit_manifest(&cli, &manifest) {
        eprintln!("error: cannot write manifest: {err:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

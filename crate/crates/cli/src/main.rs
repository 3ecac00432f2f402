mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use solsim::bugdb::{Category, Split};
use solsim::tokenizer::Level;
use solsim::ErrorKind;

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nmodel format: SMEMB v1\nmatrix format: SMMAT v1"
);

/// Errors raised by the command line itself rather than the library.
#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
}

#[derive(Parser)]
#[command(name = "solsim", version, long_version = LONG_VERSION, about = "Structural embeddings and similarity search for Solidity")]
struct Cli {
    /// TOML project config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Similarity threshold in [0, 1].
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Exit with status 1 when the command reports findings.
    #[arg(long, global = true)]
    fail_on_findings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Copy the sources of a manifest into a corpus directory.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse one file and summarize it, optionally exporting XML.
    Parse {
        file: PathBuf,
        #[arg(long)]
        xml: Option<PathBuf>,
    },
    /// Print the token stream of every element of one file.
    Tokenize {
        file: PathBuf,
        #[arg(long)]
        level: Level,
        /// Statement tokens without structural context.
        #[arg(long)]
        basic: bool,
        /// Skip normalization.
        #[arg(long)]
        raw: bool,
    },
    /// Train a token model on one level of the corpus.
    Train {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        level: Level,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        /// Train on basic statement streams.
        #[arg(long)]
        basic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the embedding matrix of one level of the corpus.
    Embed {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        level: Level,
        #[arg(long)]
        basic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise similarity queries.
    Sim {
        #[command(subcommand)]
        command: SimCommand,
    },
    /// Manage the bug database.
    Bugdb {
        #[arg(long, global = true)]
        db: Option<PathBuf>,
        #[command(subcommand)]
        command: BugdbCommand,
    },
    /// Clone pairs within one matrix.
    Clones {
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Level of the configured matrix to use when --matrix is absent.
        #[arg(long, default_value = "contract")]
        level: Level,
        /// Restrict to a random sample of N contracts.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        exclude_same_creator: bool,
        #[command(flatten)]
        out: Output,
        /// Where to write the clone statistics JSON.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Corpus statements matching known bugs.
    Bugs {
        /// Statement matrix; defaults to the configured one in the bug matrix's mode.
        #[arg(long)]
        statements: Option<PathBuf>,
        #[arg(long)]
        bugs: PathBuf,
        /// Corpus and bug database, for clone-type grading.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        db: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Check each statement of one contract against the bug matrix.
    Validate {
        file: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        bugs: PathBuf,
        #[arg(long)]
        db: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Bug detection with and without structural context.
    Ablation {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long, default_value = "detection")]
        split: Split,
        /// Directory for `structural.tsv` and `basic.tsv`.
        #[arg(long)]
        findings_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Confusion matrix of a findings file against labels.
    Metrics {
        #[arg(long)]
        findings: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render a findings file.
    Report {
        findings: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum SimCommand {
    /// Pairs of rows of two matrices clearing the threshold.
    Pair {
        queries: PathBuf,
        targets: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BugdbCommand {
    /// Record the statement at a line span of a contract.
    Add {
        #[arg(long)]
        contract: PathBuf,
        /// `A-B` or a single line.
        #[arg(long)]
        lines: String,
        #[arg(long)]
        category: Category,
        #[arg(long, default_value = "detection")]
        split: Split,
    },
    /// Add the built-in exemplar bugs.
    Seed,
    /// List the records.
    List,
    /// Embed one split into a bug matrix.
    Build {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "detection")]
        split: Split,
        #[arg(long)]
        basic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

fn classify(e: &anyhow::Error) -> (&'static str, u8) {
    if let Some(u) = e.downcast_ref::<UsageError>() {
        return match u {
            UsageError::Usage(_) => ("usage", 2),
            UsageError::Config(_) => ("config", 2),
        };
    }
    match e.downcast_ref::<solsim::Error>().map(|e| (e, e.kind())) {
        Some((_, ErrorKind::Config)) => ("config", 2),
        Some((_, ErrorKind::Version)) => ("version", 2),
        Some((solsim::Error::Parse { .. }, _)) => ("parse", 3),
        Some((_, ErrorKind::Input)) => ("input", 3),
        Some((_, ErrorKind::Io)) | None => ("io", 3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(found) => ExitCode::from(found as u8),
        Err(e) => {
            let (prefix, code) = classify(&e);
            // Library errors already carry their cause in the message.
            if e.downcast_ref::<solsim::Error>().is_some() {
                eprintln!("error[{prefix}]: {e}");
            } else {
                eprintln!("error[{prefix}]: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

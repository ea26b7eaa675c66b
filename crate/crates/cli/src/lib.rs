//! `refswap` command line: validate, stats, eval, mine, balance and
//! swap subcommands over the toolkit's file formats.
//!
//! Contract: results go to the output sink (stdout or `--output`),
//! diagnostics to stderr, nothing partial on failure. Exit codes:
//! 0 success, 1 validation failure, 2 usage error, 3 I/O error.

mod commands;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "refswap",
    version,
    about = "Dual-reference gender evaluation toolkit for translation output"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a corpus against the format's invariants.
    Validate(ValidateArgs),
    /// Per-category/form/speaker counts of a corpus.
    Stats(StatsArgs),
    /// Score hypotheses against the correct and wrong reference sets.
    Eval(EvalArgs),
    /// Mine gender-marked candidates from a parallel corpus.
    Mine(MineArgs),
    /// Balanced per-cell sampling of mined candidates.
    Balance(BalanceArgs),
    /// Generate wrong references by morphological gender swapping.
    Swap(SwapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Markdown tables.
    #[value(alias = "markdown")]
    Md,
    /// Tab-separated rows.
    Tsv,
    /// Structured JSON at full precision.
    #[value(alias = "structured")]
    Json,
}

#[derive(Debug, Args)]
struct CorpusInput {
    /// Corpus TSV file.
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus identifier; defaults to the corpus file stem.
    #[arg(long)]
    language_pair: Option<String>,
    /// Column remapping, e.g. `REF-C=REF,REF-W=WRONG-REF`.
    #[arg(long)]
    columns: Option<String>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    corpus: CorpusInput,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusInput,
    #[arg(long, value_enum, default_value_t = OutputFormat::Md)]
    format: OutputFormat,
    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusInput,
    /// Hypotheses: one translation per line, aligned with the corpus.
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Md)]
    format: OutputFormat,
    /// Evaluate even if validation reports errors, excluding the
    /// offending records.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Parallel corpus TSV with header `SRC TGT` or `TALK SRC TGT`.
    #[arg(long)]
    pairs: PathBuf,
    /// Rules TSV; defaults to the built-in rules for --language-pair.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Language pair for built-in rules and wordlists (en-it, en-fr).
    #[arg(long)]
    language_pair: Option<String>,
    /// Occupation wordlist (one entry per line); overrides built-in.
    #[arg(long)]
    occupations: Option<PathBuf>,
    /// Feminine adjective wordlist; overrides built-in.
    #[arg(long)]
    adjectives_f: Option<PathBuf>,
    /// Masculine adjective wordlist; overrides built-in.
    #[arg(long)]
    adjectives_m: Option<PathBuf>,
    /// Speaker metadata TSV with header `TALK SPEAKER`.
    #[arg(long)]
    speakers: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BalanceArgs {
    /// Candidates TSV produced by `mine`.
    #[arg(long)]
    candidates: PathBuf,
    /// Per-cell quota: `40` or `1F=40,1M=40,2F=38,2M=40`.
    #[arg(long)]
    quota: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SwapArgs {
    /// Candidates TSV; the SPANS column marks the tokens to swap.
    #[arg(long)]
    input: PathBuf,
    /// Target language of the references (it, fr).
    #[arg(long)]
    language: String,
    /// Exception lexicon TSV; replaces the built-in lexicon.
    #[arg(long)]
    exceptions: Option<PathBuf>,
    /// Suffix rules TSV; replaces the built-in lexicon.
    #[arg(long)]
    suffix_rules: Option<PathBuf>,
    /// Route rows that cannot be swapped to this file instead of
    /// failing.
    #[arg(long)]
    review: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid data: corpus errors, alignment failures, swap failures.
    Validation(String),
    /// Bad flags or flag values.
    Usage(String),
    /// Unreadable or unwritable files.
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

/// Everything a command wants written, produced only on full success.
/// `exit_code` lets a command emit its complete result and still fail
/// the process (validate with errors found).
struct Outputs {
    primary: String,
    extra_files: Vec<(PathBuf, String)>,
    exit_code: i32,
}

impl Outputs {
    fn primary(text: String) -> Self {
        Outputs {
            primary: text,
            extra_files: Vec::new(),
            exit_code: 0,
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Parse arguments, dispatch, write outputs. Never panics on bad
/// input; the return value is the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (result, output_path) = match cli.command {
        Command::Validate(args) => (commands::validate(&args), None),
        Command::Stats(args) => {
            let path = args.output.clone();
            (commands::stats(&args), path)
        }
        Command::Eval(args) => {
            let path = args.output.clone();
            (commands::eval(&args), path)
        }
        Command::Mine(args) => {
            let path = args.output.clone();
            (commands::mine(&args), path)
        }
        Command::Balance(args) => {
            let path = args.output.clone();
            (commands::balance(&args), path)
        }
        Command::Swap(args) => {
            let path = args.output.clone();
            (commands::swap(&args), path)
        }
    };
    match result {
        Ok(outputs) => {
            for (path, contents) in &outputs.extra_files {
                if let Err(e) = write_file(path, contents) {
                    eprintln!("refswap: {}", e.message());
                    return e.exit_code();
                }
            }
            match output_path {
                Some(path) => {
                    if let Err(e) = write_file(&path, &outputs.primary) {
                        eprintln!("refswap: {}", e.message());
                        return e.exit_code();
                    }
                }
                None => print!("{}", outputs.primary),
            }
            outputs.exit_code
        }
        Err(e) => {
            eprintln!("refswap: {}", e.message());
            e.exit_code()
        }
    }
}

//! `schemata`: run, translate and check program schemes from the shell.

mod commands;
mod limits;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses shared by every command.
pub mod exit {
    pub const ACCEPTED: u8 = 0;
    pub const REJECTED: u8 = 1;
    /// Resource limits hit, or the answer depends on the choice of 0 and max.
    pub const UNDECIDED: u8 = 2;
    pub const USAGE: u8 = 3;
    pub const ORACLE_DISAGREES: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(
    name = "schemata",
    version,
    about = "Nondeterministic program schemes over finite structures"
)]
pub struct Cli {
    #[command(flatten)]
    pub limits: LimitFlags,
    #[command(subcommand)]
    pub command: Command,
}

/// Engine budget. Unset flags fall back to `SCHEMATA_LIMITS`, then to the
/// built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct LimitFlags {
    /// Worker threads (1 runs the sequential reference engine).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Stored configurations per (0, max) pair.
    #[arg(long, global = true)]
    pub max_states: Option<usize>,
    /// Guesses along one run.
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Cached nested-test results.
    #[arg(long, global = true)]
    pub memo: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SemanticsArg {
    Standard,
    PassedArrays,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    OmegaB,
    OmegaA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LintAs {
    /// Report against the partitioned-net signature.
    OmegaB,
    /// Report against the general-net signature.
    OmegaA,
    /// Just check that the document parses.
    Any,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a scheme accepts a structure.
    Run {
        scheme: std::path::PathBuf,
        structure: std::path::PathBuf,
        /// Print an accepting run.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "standard")]
        semantics: SemanticsArg,
        /// File listing the universe in successor order (successor schemes).
        #[arg(long, value_name = "ORDERING")]
        succ: Option<std::path::PathBuf>,
        /// Values of free variables, e.g. `x=3,y=0`.
        #[arg(long, value_name = "BINDINGS")]
        free: Option<String>,
    },
    /// Compile a level-1 npsb scheme and a structure into a partitioned net.
    Translate {
        scheme: std::path::PathBuf,
        structure: std::path::PathBuf,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
        /// Elements read as 0 and max, e.g. `0,1`. Defaults to the first and
        /// last element.
        #[arg(long, value_name = "ZERO,MAX")]
        pair: Option<String>,
        #[arg(long, value_name = "BINDINGS")]
        free: Option<String>,
        /// Also compare engine and net verdicts on every (0, max) pair.
        #[arg(long)]
        verify: bool,
        /// Write Graphviz instead of a structure document.
        #[arg(long)]
        dot: bool,
    },
    /// Decide a net reachability problem.
    Solve {
        net: std::path::PathBuf,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Cross-check with a bounded explicit marking search.
        #[arg(long)]
        oracle: bool,
        /// Per-place token cap for the oracle.
        #[arg(long, default_value_t = 6)]
        token_cap: u32,
    },
    /// Run the seeded property suites.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to one suite; repeatable.
        #[arg(long = "suite", value_name = "SUITE")]
        suites: Vec<String>,
        /// Cases per suite instead of each suite's default.
        #[arg(long)]
        count: Option<usize>,
        /// Write the report here as well as to stdout.
        #[arg(short, long)]
        output: Option<std::path::PathBuf>,
    },
    /// Pretty-print a scheme in canonical form.
    Fmt {
        scheme: std::path::PathBuf,
        /// Exit 1 instead of printing when the file is not canonical.
        #[arg(long)]
        check: bool,
    },
    /// Check a structure document, optionally against a net signature.
    Lint {
        structure: std::path::PathBuf,
        #[arg(long = "as", value_enum, default_value = "any")]
        kind: LintAs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::USAGE)
        }
    }
}

//! Command-line frontend: validation, exploration, property checks, proof
//! tables, SR-pair decisions and generators.
//!
//! Exit codes: 0 the property holds, 1 refuted (witness printed), 2 unknown
//! because a budget cut the search short, 3 input error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "cfsm", version, about = "Verify communicating finite state machine protocols")]
struct Cli {
    /// Worker threads for exploration and consistency checks.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Where the protocol comes from.
#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Protocol file.
    pub file: Option<PathBuf>,
    /// Built-in fixture instead of a file.
    #[arg(long, conflicts_with = "file")]
    pub fixture: Option<String>,
}

/// Exploration limits and scheduling.
#[derive(Args, Debug, Clone)]
pub struct Limits {
    /// Maximum number of global states.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_states: usize,
    /// Per-channel length cap.
    #[arg(long, default_value_t = 64)]
    pub max_channel: usize,
    /// Cap on the total length of all channels.
    #[arg(long)]
    pub max_total: Option<usize>,
    /// Priority scheduling: `cyclic:<channel>`, `smooth:<file>` or
    /// `chain:<node,...>`.
    #[arg(long)]
    pub flow: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report structural problems and the protocol's class.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Explore the global state space.
    Explore {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
        /// Write the state graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check a property by exploration.
    Check {
        #[command(subcommand)]
        property: Property,
    },
    /// Proof tables of channel expressions.
    Proof {
        #[command(subcommand)]
        action: ProofAction,
    },
    /// Decisions for SR-machine pairs.
    Sr {
        #[command(subcommand)]
        action: SrAction,
    },
    /// Generators.
    Gen {
        #[command(subcommand)]
        action: GenAction,
    },
    /// Print the state graph in DOT format.
    Dot {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Subcommand, Debug)]
pub enum Property {
    /// No reachable deadlock.
    Deadlock {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
    /// The composite state, e.g. `(03,13)`, is stable.
    Stable {
        state: String,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
    /// The message `<sym>@<channel>` can arrive at a state of the
    /// channel's receiver.
    Arrival {
        state: String,
        message: String,
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
    /// Never both channels of a two-node protocol nonempty.
    HalfDuplex {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
    /// The channels are bounded within the budget.
    Bounded {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
    /// Every arriving message has a reception edge and every reception edge
    /// is used.
    WellFormed {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Subcommand, Debug)]
pub enum ProofAction {
    /// Check a proof table, extending it first when it is partial.
    Check {
        #[command(flatten)]
        input: Input,
        /// Proof file, or the name of a fixture companion file.
        #[arg(long)]
        proof: String,
    },
    /// Extend a partial proof table and print the full table.
    Extend {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        proof: String,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SrAction {
    /// Decide affinity, deadlock-freedom and boundedness of an SR pair.
    Affine {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenAction {
    /// Translate a tag system file into its simulating protocol.
    Tag {
        file: PathBuf,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in fixture and its companion files into a directory.
    Fixture {
        name: String,
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(report::INPUT_ERROR);
        }
    }
    let result = match cli.command {
        Command::Validate { input } => commands::validate(&input),
        Command::Explore { input, limits, dot } => commands::explore(&input, &limits, dot.as_deref()),
        Command::Check { property } => commands::check(&property),
        Command::Proof { action } => commands::proof(&action),
        Command::Sr { action } => commands::sr(&action),
        Command::Gen { action } => commands::gen(&action),
        Command::Dot { input, limits } => commands::dot(&input, &limits),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(report::INPUT_ERROR)
        }
    }
}

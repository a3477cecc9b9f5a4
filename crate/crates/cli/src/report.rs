//! Line-record output and verdict styling.

use std::io::{IsTerminal, Write};

use cfsm::explore::Verdict;

pub const INPUT_ERROR: u8 = 3;

/// Overall result of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Refuted,
    Unknown,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Holds => 0,
            Outcome::Refuted => 1,
            Outcome::Unknown => 2,
        }
    }

    fn word(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Refuted => "refuted",
            Outcome::Unknown => "unknown",
        }
    }
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Yes => Outcome::Holds,
            Verdict::No => Outcome::Refuted,
            Verdict::Unknown => Outcome::Unknown,
        }
    }
}

/// Whether verdicts are colored: only on a terminal and unless
/// `CFSM_COLOR=0`.
fn styled() -> bool {
    std::env::var("CFSM_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

/// Writes `key value` records to standard output.
pub struct Report {
    out: std::io::StdoutLock<'static>,
}

impl Report {
    pub fn new() -> Self {
        Report {
            out: std::io::stdout().lock(),
        }
    }

    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        // A closed pipe is not worth a panic.
        let _ = writeln!(self.out, "{key} {value}");
    }

    /// Prints the verdict record and returns the outcome.
    pub fn verdict(&mut self, outcome: Outcome) -> Outcome {
        let w = outcome.word();
        if styled() {
            let color = match outcome {
                Outcome::Holds => 32,
                Outcome::Refuted => 31,
                Outcome::Unknown => 33,
            };
            self.line("verdict", format!("\x1b[{color}m{w}\x1b[0m"));
        } else {
            self.line("verdict", w);
        }
        outcome
    }

    pub fn raw(&mut self, text: &str) {
        let _ = self.out.write_all(text.as_bytes());
    }
}

//! Regular languages and recognizable relations over channel alphabets.
//!
//! Channel contents are words over a finite [`Alphabet`]. A set of contents
//! for one channel is a [`Dfa`]; a set of content vectors for several
//! channels is a [`RecRel`], a per-channel automaton paired with an explicit
//! set of accepting state vectors.

mod alphabet;
mod dfa;
mod nfa;
mod recrel;
mod regex;

pub use alphabet::{Alphabet, Sym};
pub use dfa::Dfa;
pub use nfa::Nfa;
pub use recrel::{LengthCap, RecRel, DEFAULT_VECTOR_CAP};
pub use regex::{parse_regex, parse_relation, Regex};

use thiserror::Error;

/// Errors raised by the language algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    /// The expression text does not follow the grammar.
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    /// A symbol in the expression is not part of the alphabet.
    #[error("symbol `{name}` at offset {pos} is not in the alphabet")]
    UnknownSymbol { name: String, pos: usize },
    /// The same symbol name was declared twice in one alphabet.
    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),
    /// Binary operation on automata over different alphabets.
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    /// Binary operation on relations over different channel lists.
    #[error("channel list mismatch: {0}")]
    ChannelMismatch(String),
    /// A relation's acceptance set grew past the configured cap.
    #[error("acceptance set exceeds {cap} vectors")]
    TooLarge { cap: usize },
}

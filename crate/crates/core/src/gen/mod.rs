//! Generators and built-in fixtures.

mod affinize;
mod fixtures;
mod random;
mod tag;

use thiserror::Error;

pub use affinize::{affinize, affinize_bounded, affinize_deadlock, Affinize};
pub use fixtures::{fixture, fixture_file, fixture_files, fixture_names, fixture_source};
pub use random::{mirrored_pair, random_cyclic, random_sr_machine, random_tag, sr_pair, CyclicShape, SrShape};
pub use tag::{symbol_stem, tag_to_protocol, TagOutcome, TagRun, TagSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("unknown fixture `{name}` (available: {available})")]
    UnknownFixture { name: String, available: String },
    #[error("fixture {0}")]
    Fixture(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

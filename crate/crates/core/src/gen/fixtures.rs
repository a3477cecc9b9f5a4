use crate::model::{parse_protocol, Protocol};

use super::GenError;

struct Fixture {
    name: &'static str,
    protocol: &'static str,
    files: &'static [(&'static str, &'static str)],
}

const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "access",
        protocol: include_str!("../../fixtures/access.cfsm"),
        files: &[],
    },
    Fixture {
        name: "altbit-demons",
        protocol: include_str!("../../fixtures/altbit-demons.cfsm"),
        files: &[("fig2_6.proof", include_str!("../../fixtures/fig2_6.proof"))],
    },
    Fixture {
        name: "flowctl2",
        protocol: include_str!("../../fixtures/flowctl2.cfsm"),
        files: &[
            ("fig8_3.proof", include_str!("../../fixtures/fig8_3.proof")),
            ("fig8_2.states", include_str!("../../fixtures/fig8_2.states")),
        ],
    },
    Fixture {
        name: "altbit-turns",
        protocol: include_str!("../../fixtures/altbit-turns.cfsm"),
        files: &[("fig8_7.proof", include_str!("../../fixtures/fig8_7.proof"))],
    },
    Fixture {
        name: "counter",
        protocol: include_str!("../../fixtures/counter.cfsm"),
        files: &[],
    },
];

/// Names of the built-in fixtures.
pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

fn find(name: &str) -> Result<&'static Fixture, GenError> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| GenError::UnknownFixture {
            name: name.to_string(),
            available: fixture_names().join(", "),
        })
}

/// The protocol text of a built-in fixture.
pub fn fixture_source(name: &str) -> Result<&'static str, GenError> {
    Ok(find(name)?.protocol)
}

/// A built-in fixture protocol.
pub fn fixture(name: &str) -> Result<Protocol, GenError> {
    let f = find(name)?;
    parse_protocol(f.protocol).map_err(|e| GenError::Fixture(format!("{}: {e}", f.name)))
}

/// Companion files (proof tables, golden data) of a fixture, by file name.
pub fn fixture_files(name: &str) -> Result<&'static [(&'static str, &'static str)], GenError> {
    Ok(find(name)?.files)
}

/// Looks a companion file up across all fixtures.
pub fn fixture_file(file: &str) -> Option<&'static str> {
    FIXTURES
        .iter()
        .flat_map(|f| f.files.iter())
        .find(|(n, _)| *n == file)
        .map(|(_, t)| *t)
}

//! Communicating finite-state machines: languages, exploration, flow
//! control, proof tables and generators.

pub mod lang;
pub mod model;
pub mod explore;
pub mod flowctl;
pub mod gen;
pub mod proofs;
pub mod sr;

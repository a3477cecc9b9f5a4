//! Proof tables: per-composite-state channel expressions, their
//! consistency checks, automatic extension from partial tables, and the
//! reachability certificates they support.

mod file;
mod recognizable;
mod regular;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::explore::GlobalState;
use crate::lang::{Dfa, LangError, LengthCap, RecRel, Sym};
use crate::model::{Action, ChannelId, CompositeState, ModelError, Protocol, StateId};

pub use file::{format_recognizable, format_regular, parse_proof, ProofTable};
pub use recognizable::{
    check_recognizable_consistency, extend_feedback, extend_recognizable, prove_no_arrival,
    prove_unreachable, receive_words,
};
pub use regular::{check_regular_consistency, extend_regular, h_graph, prove_deadlock_free, prove_not_stable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("the protocol is not cyclic")]
    NotCyclic,
    #[error("table has no entry for {0} and no `default empty`")]
    Partial(String),
    #[error("index sets: {0}")]
    Hypothesis(String),
    #[error("node {node} has {degree} input channels; at most one is supported")]
    InDegree { node: String, degree: usize },
    #[error("declared states miss the product-graph cycle {}", cycle.join(" -> "))]
    NotFeedback { cycle: Vec<String> },
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("table is not consistent: {0}")]
    Inconsistent(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which composite states a table declares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclaredOn {
    /// Every composite state (missing ones may default to empty).
    Full,
    /// The product of per-node state sets `V_j`.
    Product(Vec<BTreeSet<StateId>>),
    /// An explicit set of composite states.
    Feedback(BTreeSet<CompositeState>),
}

/// Regular sets of contents of one designated channel, read as
/// assertions about states whose other channels are empty.
#[derive(Clone, Debug)]
pub struct RegularTable {
    pub channel: ChannelId,
    pub entries: BTreeMap<CompositeState, Dfa>,
    pub declared_on: DeclaredOn,
    pub default_empty: bool,
}

/// Recognizable relations over all channels, one per composite state.
#[derive(Clone, Debug)]
pub struct RecognizableTable {
    pub entries: BTreeMap<CompositeState, RecRel>,
    pub declared_on: DeclaredOn,
    pub default_empty: bool,
}

/// A disjunction of per-channel length caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub clauses: Vec<Vec<LengthCap>>,
}

impl Restriction {
    /// Rejects an empty clause list.
    pub fn new(clauses: Vec<Vec<LengthCap>>) -> Result<Self, ProofError> {
        if clauses.is_empty() {
            return Err(ProofError::Hypothesis("a restriction needs at least one clause".into()));
        }
        Ok(Restriction { clauses })
    }

    /// No caps at all.
    pub fn unbounded(channels: usize) -> Self {
        Restriction {
            clauses: vec![vec![None; channels]],
        }
    }

    pub fn holds(&self, contents: &[Vec<Sym>]) -> bool {
        self.clauses.iter().any(|c| {
            c.iter()
                .zip(contents)
                .all(|(cap, w)| cap.is_none_or(|n| w.len() <= n))
        })
    }
}

/// What went wrong at one obligation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObligationKind {
    Receive,
    Send,
    /// A matched send/receive on another channel (regular tables only).
    Hop,
}

/// A failed inclusion with a content vector that escapes the target entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ObligationKind,
    pub from: CompositeState,
    pub to: CompositeState,
    pub action: Option<Action>,
    /// Contents reachable at `to` but outside its entry.
    pub witness: Vec<Vec<Sym>>,
}

impl Violation {
    pub fn describe(&self, p: &Protocol) -> String {
        let step = match (&self.kind, &self.action) {
            (ObligationKind::Hop, _) | (_, None) => "hop".to_string(),
            (_, Some(a)) => p.action_name(a),
        };
        let contents: Vec<String> = self
            .witness
            .iter()
            .enumerate()
            .map(|(c, w)| format!("{}={}", p.channels[c].name, p.word_name(c, w)))
            .collect();
        format!(
            "{} {step} {}: contents ({}) fall outside the entry",
            p.composite_name(&self.from),
            p.composite_name(&self.to),
            contents.join(", ")
        )
    }
}

/// Verdict of a consistency check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent { obligations: usize },
    Violated(Violation),
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent { .. })
    }
}

/// A completed table together with its consistency verdict. An extension
/// that is not consistent means no consistent completion exists.
#[derive(Clone, Debug)]
pub struct Extension<T> {
    pub table: T,
    pub consistency: Consistency,
}

/// Outcome of asking a table for a certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Certified(String),
    Inapplicable(String),
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified(_))
    }
}

/// Mixed-radix numbering of composite states.
#[derive(Clone, Debug)]
pub(crate) struct Space {
    radix: Vec<usize>,
}

impl Space {
    pub(crate) fn new(p: &Protocol) -> Self {
        Space {
            radix: p.machines.iter().map(|m| m.num_states()).collect(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.radix.iter().product()
    }

    pub(crate) fn decode(&self, mut i: usize) -> CompositeState {
        let mut out = vec![0; self.radix.len()];
        for j in (0..self.radix.len()).rev() {
            out[j] = (i % self.radix[j]) as StateId;
            i /= self.radix[j];
        }
        out
    }

    pub(crate) fn encode(&self, s: &[StateId]) -> usize {
        s.iter().zip(&self.radix).fold(0, |acc, (&q, &r)| acc * r + q as usize)
    }

    /// Index of `s` with coordinate `j` replaced by `q`.
    pub(crate) fn with(&self, s: &[StateId], j: usize, q: StateId) -> usize {
        let mut t = s.to_vec();
        t[j] = q;
        self.encode(&t)
    }

    /// Indices of all composite states whose coordinate `j` is `q`.
    pub(crate) fn fiber(&self, j: usize, q: StateId) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.decode(i)[j] == q)
    }
}

/// Evaluates independent obligations in parallel and reports the failure
/// with the smallest index, so results do not depend on scheduling.
pub(crate) fn first_failure<O: Sync>(
    obligations: &[O],
    eval: impl Fn(&O) -> Result<Option<Violation>, ProofError> + Sync,
) -> Result<Consistency, ProofError> {
    let found = obligations
        .par_iter()
        .map(&eval)
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        None => Ok(Consistency::Consistent {
            obligations: obligations.len(),
        }),
        Some(Ok(Some(v))) => Ok(Consistency::Violated(v)),
        Some(Ok(None)) => unreachable!("filtered above"),
        Some(Err(e)) => Err(e),
    }
}

/// Checks that every `V_j` holds the start state and is closed under send
/// targets.
pub(crate) fn check_index_sets(p: &Protocol, v: &[BTreeSet<StateId>]) -> Result<(), ProofError> {
    if v.len() != p.machines.len() {
        return Err(ProofError::Hypothesis(format!(
            "{} index sets for {} nodes",
            v.len(),
            p.machines.len()
        )));
    }
    for (j, (m, vj)) in p.machines.iter().zip(v).enumerate() {
        if !vj.contains(&m.start) {
            return Err(ProofError::Hypothesis(format!(
                "V for node {} lacks the start state {}",
                p.nodes[j], m.states[m.start as usize]
            )));
        }
        for t in &m.transitions {
            if t.action.dir == crate::model::Dir::Send && !vj.contains(&t.to) {
                return Err(ProofError::Hypothesis(format!(
                    "V for node {} lacks {}, the target of {} from {}",
                    p.nodes[j],
                    m.states[t.to as usize],
                    p.action_name(&t.action),
                    m.states[t.from as usize]
                )));
            }
        }
    }
    Ok(())
}

/// Composite states in which no node can send; a node with no transitions
/// counts as receiving.
pub fn all_receive_composites(p: &Protocol) -> Vec<CompositeState> {
    let space = Space::new(p);
    (0..space.len())
        .map(|i| space.decode(i))
        .filter(|s| {
            s.iter()
                .enumerate()
                .all(|(j, &q)| p.machines[j].is_receive_state(q))
        })
        .collect()
}

/// Whether `g` satisfies the recognizable table (membership of its contents).
pub fn table_admits(t: &RecognizableTable, g: &GlobalState) -> Result<bool, ProofError> {
    match t.entries.get(g.composite()) {
        Some(r) => Ok(r.member(&g.contents())?),
        None if t.default_empty => Ok(false),
        None => Err(ProofError::Partial(format!("{:?}", g.composite()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::fixture;

    #[test]
    fn space_round_trip() {
        let p = fixture("altbit-turns").unwrap();
        let s = Space::new(&p);
        assert_eq!(s.len(), 1764);
        for i in [0, 1, 57, 1763] {
            assert_eq!(s.encode(&s.decode(i)), i);
        }
        assert_eq!(s.fiber(0, 3).count(), 1764 / 6);
    }

    #[test]
    fn restriction_membership() {
        let r = Restriction::new(vec![vec![Some(1), None], vec![None, Some(0)]]).unwrap();
        assert!(r.holds(&[vec![0], vec![1, 1]]));
        assert!(r.holds(&[vec![0, 0], vec![]]));
        assert!(!r.holds(&[vec![0, 0], vec![1]]));
        assert!(Restriction::new(vec![]).is_err());
    }
}

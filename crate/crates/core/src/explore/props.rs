use std::collections::BTreeSet;

use super::{StateGraph, Verdict};
use crate::lang::Sym;
use crate::model::{ChannelId, CompositeState, Dir, NodeId, Protocol, StateId};

/// Stable composite states: those `S` with `(S, C⁰)` in the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stable {
    pub states: BTreeSet<CompositeState>,
    pub definitive: bool,
}

pub fn stable_states(sg: &StateGraph) -> Stable {
    let states = sg
        .states()
        .filter(|g| g.channels_empty())
        .map(|g| g.composite().to_vec())
        .collect();
    Stable {
        states,
        definitive: sg.exhausted,
    }
}

/// Reachable deadlocked states (all machines in receive states, channels
/// empty). A nonempty list is definitive regardless of the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deadlocks {
    pub states: Vec<usize>,
    pub definitive: bool,
}

pub fn deadlocks(sg: &StateGraph, p: &Protocol) -> Deadlocks {
    let states: Vec<usize> = (0..sg.len())
        .filter(|&i| {
            let g = sg.state(i);
            g.channels_empty()
                && g.composite()
                    .iter()
                    .enumerate()
                    .all(|(j, &q)| p.machines[j].is_receive_state(q))
        })
        .collect();
    let definitive = sg.exhausted || !states.is_empty();
    Deadlocks { states, definitive }
}

/// `sym` on `channel` can arrive at `state` of `node` (the channel's head).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrival {
    pub node: NodeId,
    pub state: StateId,
    pub channel: ChannelId,
    pub sym: Sym,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Receptions {
    pub pairs: BTreeSet<Arrival>,
    pub definitive: bool,
}

/// Pairs `(p, b)` such that a reachable state has the receiving node at `p`
/// with `b` at the head of its input channel.
pub fn executable_receptions(sg: &StateGraph, p: &Protocol) -> Receptions {
    let mut pairs = BTreeSet::new();
    for g in sg.states() {
        for (c, w) in g.channels().iter().enumerate() {
            if let Some(&b) = w.first() {
                let node = p.channels[c].to;
                pairs.insert(Arrival {
                    node,
                    state: g.composite()[node],
                    channel: c,
                    sym: b,
                });
            }
        }
    }
    Receptions {
        pairs,
        definitive: sg.exhausted,
    }
}

/// One failure of `b can arrive at p ⇔ p has a +b transition`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WellFormedViolation {
    /// `b` arrives at `p` but `p` has no `+b` transition.
    UnspecifiedReception(Arrival),
    /// `p` has a `+b` transition but `b` never arrives there.
    UselessEdge(Arrival),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFormed {
    pub holds: Verdict,
    pub violations: Vec<WellFormedViolation>,
}

pub fn well_formed(sg: &StateGraph, p: &Protocol) -> WellFormed {
    let rec = executable_receptions(sg, p);
    let mut edges = BTreeSet::new();
    for (j, m) in p.machines.iter().enumerate() {
        for t in &m.transitions {
            if t.action.dir == Dir::Recv {
                edges.insert(Arrival {
                    node: j,
                    state: t.from,
                    channel: t.action.channel,
                    sym: t.action.sym,
                });
            }
        }
    }
    let mut violations = Vec::new();
    for a in &rec.pairs {
        if !edges.contains(a) {
            violations.push(WellFormedViolation::UnspecifiedReception(*a));
        }
    }
    let mut useless = Vec::new();
    for a in &edges {
        if !rec.pairs.contains(a) {
            useless.push(WellFormedViolation::UselessEdge(*a));
        }
    }
    let holds = if !violations.is_empty() {
        Verdict::No
    } else if !sg.exhausted {
        Verdict::Unknown
    } else if !useless.is_empty() {
        Verdict::No
    } else {
        Verdict::Yes
    };
    if sg.exhausted {
        violations.extend(useless);
    }
    violations.sort();
    WellFormed { holds, violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockVerdict {
    Blocked,
    Free,
    Unknown,
}

/// For every state with a nonempty channel, whether a later reception on
/// that channel is reachable. FIFO order makes the head symbol the one
/// received first.
pub fn blocked_channels(sg: &StateGraph, p: &Protocol) -> Vec<(usize, ChannelId, BlockVerdict)> {
    let open = sg.reaches_truncated();
    let mut out = Vec::new();
    for c in 0..p.channels.len() {
        let free = sg.co_reachable(|i| {
            sg.out_edges(i)
                .iter()
                .any(|e| e.action.dir == Dir::Recv && e.action.channel == c)
        });
        for (i, g) in sg.states().enumerate() {
            if g.channel(c).is_empty() {
                continue;
            }
            let v = if free[i] {
                BlockVerdict::Free
            } else if open[i] {
                BlockVerdict::Unknown
            } else {
                BlockVerdict::Blocked
            };
            out.push((i, c, v));
        }
    }
    out.sort_by_key(|&(i, c, _)| (i, c));
    out
}

/// Whether state `i` has no successor at all.
pub fn globally_blocked(sg: &StateGraph, i: usize) -> Verdict {
    if !sg.out_edges(i).is_empty() {
        Verdict::No
    } else if sg.is_truncated(i) {
        Verdict::Unknown
    } else {
        Verdict::Yes
    }
}

/// Half-duplex check for two nodes joined by one channel each way.
/// Returns the verdict and a witness state index when refuted.
pub fn half_duplex(sg: &StateGraph, p: &Protocol) -> Result<(Verdict, Option<usize>), String> {
    let two_way = p.nodes.len() == 2
        && p.channels.len() == 2
        && p.channels[0].from == p.channels[1].to
        && p.channels[0].to == p.channels[1].from;
    if !two_way {
        return Err("half-duplex needs two nodes with one channel each way".into());
    }
    for (i, g) in sg.states().enumerate() {
        if !g.channel(0).is_empty() && !g.channel(1).is_empty() {
            return Ok((Verdict::No, Some(i)));
        }
    }
    Ok((
        if sg.exhausted { Verdict::Yes } else { Verdict::Unknown },
        None,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounded {
    /// The exact bound on total channel length, when the space is exhausted.
    pub bound: Option<usize>,
    /// Largest total length seen.
    pub max_seen: usize,
    pub witness: usize,
}

pub fn bounded_channels(sg: &StateGraph) -> Bounded {
    let (witness, max_seen) = sg
        .states()
        .map(|g| g.total_len())
        .enumerate()
        .max_by_key(|&(i, l)| (l, std::cmp::Reverse(i)))
        .unwrap_or((0, 0));
    Bounded {
        bound: sg.exhausted.then_some(max_seen),
        max_seen,
        witness,
    }
}

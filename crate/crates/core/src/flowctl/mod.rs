//! Abstract flow control: priority schedulers and state filters that keep
//! every empty-channel state reachable while visiting fewer global states.

mod schedule;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::explore::GlobalState;
use crate::model::{classify, ChannelId, NodeId, Protocol};

pub use schedule::{scheduled_configs, scheduled_reach, Config, NodeStatus, Scheduled};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("protocol `{0}` is not cyclic")]
    NotCyclic(String),
    #[error("channel index {0} out of range")]
    UnknownChannel(ChannelId),
    #[error("node sets {a} and {b} violate smoothness")]
    NotSmooth { a: usize, b: usize },
    #[error("invalid priority scheme: {0}")]
    InvalidScheme(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// How the scheduler orders nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PriorityScheme {
    /// Cyclic protocol with a designated channel; standard scheme with the
    /// sender of the channel highest and its receiver lowest.
    Cyclic(ChannelId),
    /// Smooth family of node sets; standard scheme over its blocks.
    Smooth(Vec<BTreeSet<NodeId>>),
    /// Total node order, highest first; the node on which the highest one
    /// is (transitively) blocked runs.
    BlockingChain(Vec<NodeId>),
}

/// Negative and positive boundary of a node set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Boundary {
    /// Channels entering the set from outside.
    pub negative: BTreeSet<ChannelId>,
    /// Channels leaving the set.
    pub positive: BTreeSet<ChannelId>,
}

/// Boundary of `a` in the communication graph of `p`.
pub fn boundary(p: &Protocol, a: &BTreeSet<NodeId>) -> Boundary {
    let mut b = Boundary::default();
    for (i, c) in p.channels.iter().enumerate() {
        match (a.contains(&c.from), a.contains(&c.to)) {
            (false, true) => {
                b.negative.insert(i);
            }
            (true, false) => {
                b.positive.insert(i);
            }
            _ => {}
        }
    }
    b
}

/// Result of a smoothness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothCheck {
    pub smooth: bool,
    /// Indices of the first offending pair.
    pub counterexample: Option<(usize, usize)>,
}

/// Every pair is nested, or disjoint with additive negative boundary.
pub fn check_smooth(p: &Protocol, psi: &[BTreeSet<NodeId>]) -> SmoothCheck {
    for i in 0..psi.len() {
        for j in i + 1..psi.len() {
            let (a, b) = (&psi[i], &psi[j]);
            if a.is_subset(b) || b.is_subset(a) {
                continue;
            }
            let ok = a.is_disjoint(b) && {
                let u: BTreeSet<NodeId> = a.union(b).copied().collect();
                let lhs = boundary(p, &u).negative;
                let rhs: BTreeSet<ChannelId> = boundary(p, a)
                    .negative
                    .union(&boundary(p, b).negative)
                    .copied()
                    .collect();
                lhs == rhs
            };
            if !ok {
                return SmoothCheck {
                    smooth: false,
                    counterexample: Some((i, j)),
                };
            }
        }
    }
    SmoothCheck {
        smooth: true,
        counterexample: None,
    }
}

/// Priority blocks from a smooth family: sets ordered so that subsets come
/// first, each block being its set minus all earlier ones. Empty blocks are
/// dropped.
pub fn smooth_schedule(p: &Protocol, psi: &[BTreeSet<NodeId>]) -> Result<Vec<BTreeSet<NodeId>>, FlowError> {
    let check = check_smooth(p, psi);
    if let Some((a, b)) = check.counterexample {
        return Err(FlowError::NotSmooth { a, b });
    }
    for a in psi {
        if let Some(&n) = a.iter().find(|&&n| n >= p.nodes.len()) {
            return Err(FlowError::InvalidScheme(format!("node index {n} out of range")));
        }
    }
    let mut order: Vec<usize> = (0..psi.len()).collect();
    // Strict inclusion implies a smaller set, so sorting by size is a
    // linear extension of inclusion.
    order.sort_by_key(|&i| (psi[i].len(), i));
    let mut seen = BTreeSet::new();
    let mut blocks = Vec::new();
    for i in order {
        let block: BTreeSet<NodeId> = psi[i].difference(&seen).copied().collect();
        seen.extend(block.iter().copied());
        if !block.is_empty() {
            blocks.push(block);
        }
    }
    Ok(blocks)
}

/// The nested family for a cyclic protocol: starting at the sender of
/// `beta`, each set adds the previous node around the ring, stopping
/// before the receiver of `beta`.
pub fn cyclic_family(p: &Protocol, beta: ChannelId) -> Result<Vec<BTreeSet<NodeId>>, FlowError> {
    ring_check(p, beta)?;
    let pred = |n: NodeId| p.channels.iter().find(|c| c.to == n).expect("ring").from;
    let last = p.channels[beta].to;
    let mut v = p.channels[beta].from;
    let mut cur = BTreeSet::new();
    let mut out = Vec::new();
    while v != last {
        cur.insert(v);
        out.push(cur.clone());
        v = pred(v);
    }
    Ok(out)
}

fn ring_check(p: &Protocol, beta: ChannelId) -> Result<(), FlowError> {
    if beta >= p.channels.len() {
        return Err(FlowError::UnknownChannel(beta));
    }
    if !classify(p).is_cyclic {
        return Err(FlowError::NotCyclic(p.name.clone()));
    }
    Ok(())
}

/// State predicate used as an exploration filter.
pub type StateFilter = Box<dyn Fn(&GlobalState) -> bool + Send + Sync>;

/// Admits states where all channels other than `beta` hold at most one
/// symbol in total.
pub fn cyclic_filter(p: &Protocol, beta: ChannelId) -> Result<StateFilter, FlowError> {
    ring_check(p, beta)?;
    Ok(Box::new(move |g: &GlobalState| {
        g.channels()
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != beta)
            .map(|(_, w)| w.len())
            .sum::<usize>()
            <= 1
    }))
}

/// For every set in `psi`, some channel entering it is empty. Sets whose
/// negative boundary is empty make the predicate false.
pub fn boundary_predicate(p: &Protocol, psi: &[BTreeSet<NodeId>]) -> StateFilter {
    let bounds: Vec<Vec<ChannelId>> = psi
        .iter()
        .map(|a| boundary(p, a).negative.into_iter().collect())
        .collect();
    Box::new(move |g: &GlobalState| {
        bounds
            .iter()
            .all(|b| b.iter().any(|&c| g.channel(c).is_empty()))
    })
}

/// Total node order (highest first) used by the scheduler for `scheme`.
pub fn priority_order(p: &Protocol, scheme: &PriorityScheme) -> Result<Vec<NodeId>, FlowError> {
    let n = p.nodes.len();
    let from_blocks = |blocks: Vec<BTreeSet<NodeId>>| {
        let mut order: Vec<NodeId> = blocks.into_iter().flatten().collect();
        let rest: Vec<NodeId> = (0..n).filter(|v| !order.contains(v)).collect();
        order.extend(rest);
        order
    };
    match scheme {
        PriorityScheme::Cyclic(beta) => Ok(from_blocks(smooth_schedule(p, &cyclic_family(p, *beta)?)?)),
        PriorityScheme::Smooth(psi) => Ok(from_blocks(smooth_schedule(p, psi)?)),
        PriorityScheme::BlockingChain(order) => {
            let set: BTreeSet<NodeId> = order.iter().copied().collect();
            if order.len() != n || set.len() != n || set.iter().any(|&v| v >= n) {
                return Err(FlowError::InvalidScheme(
                    "blocking chain must list every node exactly once".into(),
                ));
            }
            Ok(order.clone())
        }
    }
}

/// Parses node sets, one per line, nodes separated by commas or spaces.
/// `#` starts a comment.
pub fn parse_node_sets(p: &Protocol, text: &str) -> Result<Vec<BTreeSet<NodeId>>, FlowError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut set = BTreeSet::new();
        for name in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let v = p.node_index(name).ok_or_else(|| FlowError::Parse {
                line: i + 1,
                msg: format!("unknown node `{name}`"),
            })?;
            set.insert(v);
        }
        out.push(set);
    }
    Ok(out)
}

/// Parses a comma-separated node list.
pub fn parse_node_list(p: &Protocol, text: &str) -> Result<Vec<NodeId>, FlowError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            p.node_index(name)
                .ok_or_else(|| FlowError::InvalidScheme(format!("unknown node `{name}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_protocol;

    fn ring(n: usize) -> Protocol {
        let mut s = String::from("protocol ring\n");
        for i in 0..n {
            s += &format!("node {i}\n");
        }
        for i in 0..n {
            s += &format!("channel c{i} from {i} to {}\n", (i + 1) % n);
        }
        for i in 0..n {
            s += &format!("alphabet c{i} m{i}\n");
        }
        for i in 0..n {
            let prev = (i + n - 1) % n;
            s += &format!("machine {i} start q0\n");
            if i == 0 {
                s += &format!("trans {i} q0 -m{i}@c{i} q1\ntrans {i} q1 +m{prev}@c{prev} q0\n");
            } else {
                s += &format!("trans {i} q0 +m{prev}@c{prev} q1\ntrans {i} q1 -m{i}@c{i} q0\n");
            }
        }
        parse_protocol(&s).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn smoothness_examples() {
        let r3 = ring(3);
        let bad = check_smooth(&r3, &[set(&[0]), set(&[1])]);
        assert!(!bad.smooth);
        assert_eq!(bad.counterexample, Some((0, 1)));
        assert!(check_smooth(&r3, &[]).smooth);
        let r4 = ring(4);
        let fam = cyclic_family(&r4, 0).unwrap();
        assert_eq!(fam, vec![set(&[0]), set(&[0, 3]), set(&[0, 2, 3])]);
        assert!(check_smooth(&r4, &fam).smooth);
        for a in &fam {
            let b = boundary(&r4, a);
            assert_eq!(b.positive, set(&[0]));
            assert_eq!(b.negative.len(), 1);
        }
    }

    #[test]
    fn schedule_blocks() {
        let r4 = ring(4);
        let fam = cyclic_family(&r4, 0).unwrap();
        let blocks = smooth_schedule(&r4, &fam).unwrap();
        assert_eq!(blocks, vec![set(&[0]), set(&[3]), set(&[2])]);
        assert_eq!(priority_order(&r4, &PriorityScheme::Cyclic(0)).unwrap(), vec![0, 3, 2, 1]);
        let r3 = ring(3);
        assert_eq!(
            smooth_schedule(&r3, &[set(&[0]), set(&[1])]),
            Err(FlowError::NotSmooth { a: 0, b: 1 })
        );
    }

    #[test]
    fn cyclic_filter_counts_other_channels() {
        let r3 = ring(3);
        let f = cyclic_filter(&r3, 0).unwrap();
        let ok = GlobalState::new(&[0, 0, 0], &[&[0, 0, 0], &[0], &[]]);
        let bad = GlobalState::new(&[0, 0, 0], &[&[], &[0], &[0]]);
        assert!(f(&ok));
        assert!(!f(&bad));
        assert!(cyclic_filter(&r3, 7).is_err());
    }

    #[test]
    fn node_set_parsing() {
        let r3 = ring(3);
        assert_eq!(parse_node_sets(&r3, "0 1\n# c\n2\n").unwrap(), vec![set(&[0, 1]), set(&[2])]);
        assert!(parse_node_sets(&r3, "9").is_err());
        assert_eq!(parse_node_list(&r3, "2,0,1").unwrap(), vec![2, 0, 1]);
        assert!(priority_order(&r3, &PriorityScheme::BlockingChain(vec![0, 0, 1])).is_err());
    }
}

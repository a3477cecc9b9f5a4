use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Dir, Machine, Protocol, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

/// A validation finding naming the offending element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnostic {
    pub severity: Severity,
    pub element: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.element, self.message)
    }
}

fn error(element: String, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        severity: Severity::Error,
        element,
        message: message.into(),
    }
}

/// Checks the structural invariants of a protocol.
///
/// Errors: self-loop channels, shared symbols across channels, machines
/// acting on channels they are not attached to, missing machines and
/// out-of-range states. Unreachable machine states produce warnings.
/// The result is sorted.
pub fn validate(p: &Protocol) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if p.machines.len() != p.nodes.len() {
        out.push(error(
            format!("protocol {}", p.name),
            format!("{} machines for {} nodes", p.machines.len(), p.nodes.len()),
        ));
    }
    for c in &p.channels {
        if c.from >= p.nodes.len() || c.to >= p.nodes.len() {
            out.push(error(format!("channel {}", c.name), "endpoint out of range"));
        } else if c.from == c.to {
            out.push(error(
                format!("channel {}", c.name),
                "self-loop channels are not supported",
            ));
        }
        if c.alphabet.is_empty() {
            out.push(Diagnostic {
                severity: Severity::Warning,
                element: format!("channel {}", c.name),
                message: "empty alphabet".into(),
            });
        }
    }
    let mut owners: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for c in &p.channels {
        for s in c.alphabet.names() {
            owners.entry(s).or_default().push(&c.name);
        }
    }
    for (s, chans) in owners {
        if chans.len() > 1 {
            out.push(error(
                format!("symbol {s}"),
                format!("alphabets not disjoint: shared by channels {}", chans.join(", ")),
            ));
        }
    }
    for (j, m) in p.machines.iter().enumerate() {
        let node = p.nodes.get(j).cloned().unwrap_or_else(|| j.to_string());
        if m.states.is_empty() {
            out.push(error(format!("node {node}"), "node has no machine"));
            continue;
        }
        if m.start as usize >= m.states.len() {
            out.push(error(format!("machine {node}"), "start state out of range"));
            continue;
        }
        for t in &m.transitions {
            let elem = || {
                let name = |q: StateId| {
                    m.states
                        .get(q as usize)
                        .cloned()
                        .unwrap_or_else(|| format!("#{q}"))
                };
                format!("transition {node} {} -> {}", name(t.from), name(t.to))
            };
            if t.from as usize >= m.states.len() || t.to as usize >= m.states.len() {
                out.push(error(elem(), "state out of range"));
                continue;
            }
            let Some(c) = p.channels.get(t.action.channel) else {
                out.push(error(elem(), "channel out of range"));
                continue;
            };
            if t.action.sym as usize >= c.alphabet.len() {
                out.push(error(elem(), format!("symbol not in alphabet of {}", c.name)));
                continue;
            }
            match t.action.dir {
                Dir::Send if c.from != j => out.push(error(
                    elem(),
                    format!(
                        "sends on channel {} whose tail is node {}",
                        c.name, p.nodes[c.from]
                    ),
                )),
                Dir::Recv if c.to != j => out.push(error(
                    elem(),
                    format!(
                        "receives on channel {} whose head is node {}",
                        c.name, p.nodes[c.to]
                    ),
                )),
                _ => {}
            }
        }
        let reach = m.reachable();
        for (q, r) in reach.iter().enumerate() {
            if !r {
                out.push(Diagnostic {
                    severity: Severity::Warning,
                    element: format!("state {node} {}", m.states[q]),
                    message: "unreachable in the transition diagram".into(),
                });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Structural classification of a validated protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// The communication graph is one directed cycle through every node.
    pub is_cyclic: bool,
    /// Two nodes joined by one channel each way, both machines SR.
    pub is_sr_pair: bool,
    pub node_in_degrees: BTreeMap<String, usize>,
}

/// Checks for the three SR conditions on a single machine.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SrReport {
    /// States with both send and receive transitions.
    pub mixed_states: Vec<String>,
    /// `(state, action)` pairs with more than one target.
    pub nondet_labels: Vec<(String, String)>,
    pub strongly_connected: bool,
}

impl SrReport {
    pub fn passes(&self) -> bool {
        self.mixed_states.is_empty() && self.nondet_labels.is_empty() && self.strongly_connected
    }
}

/// Cycle test and in-degrees of the communication graph, plus the SR-pair test.
pub fn classify(p: &Protocol) -> Classification {
    let n = p.nodes.len();
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut succ = vec![None; n];
    for c in &p.channels {
        indeg[c.to] += 1;
        outdeg[c.from] += 1;
        succ[c.from] = Some(c.to);
    }
    let mut is_cyclic = n >= 2
        && p.channels.len() == n
        && indeg.iter().all(|&d| d == 1)
        && outdeg.iter().all(|&d| d == 1);
    if is_cyclic {
        let mut seen = vec![false; n];
        let mut v = 0;
        for _ in 0..n {
            seen[v] = true;
            v = succ[v].expect("out-degree one");
        }
        is_cyclic = v == 0 && seen.iter().all(|&s| s);
    }
    let is_sr_pair = n == 2
        && p.channels.len() == 2
        && p.channels[0].from != p.channels[1].from
        && p.machines.iter().all(|m| sr_checks(p, m).passes());
    Classification {
        is_cyclic,
        is_sr_pair,
        node_in_degrees: p.nodes.iter().cloned().zip(indeg).collect(),
    }
}

/// Reports violations of the SR conditions for machine `m` of `p`.
pub fn sr_checks(p: &Protocol, m: &Machine) -> SrReport {
    let mut report = SrReport::default();
    let mut labels: BTreeMap<(StateId, super::Action), BTreeSet<StateId>> = BTreeMap::new();
    let mut dirs: BTreeMap<StateId, BTreeSet<Dir>> = BTreeMap::new();
    for t in &m.transitions {
        labels.entry((t.from, t.action)).or_default().insert(t.to);
        dirs.entry(t.from).or_default().insert(t.action.dir);
    }
    for (q, ds) in &dirs {
        if ds.len() > 1 {
            report.mixed_states.push(m.states[*q as usize].clone());
        }
    }
    for ((q, a), targets) in &labels {
        if targets.len() > 1 {
            report
                .nondet_labels
                .push((m.states[*q as usize].clone(), p.action_name(a)));
        }
    }
    report.strongly_connected = strongly_connected(m);
    report
}

fn strongly_connected(m: &Machine) -> bool {
    let n = m.states.len();
    if n == 0 {
        return false;
    }
    let forward = m.reachable();
    let mut rev = m.clone();
    for t in &mut rev.transitions {
        std::mem::swap(&mut t.from, &mut t.to);
    }
    let backward = rev.reachable();
    forward.iter().all(|&b| b) && backward.iter().all(|&b| b)
}

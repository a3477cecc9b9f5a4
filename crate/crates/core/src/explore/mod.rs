//! Global state space construction and the reachability properties
//! defined over it, all under explicit budgets.

mod dot;
mod graph;
mod props;
mod state;

use std::fmt;

use crate::lang::Sym;
use crate::model::{Action, Dir, NodeId, Protocol, Transition};

pub use dot::to_dot;
pub use graph::{Edge, Expansion, Graph};
pub use props::{
    blocked_channels, bounded_channels, deadlocks, executable_receptions, globally_blocked,
    half_duplex, stable_states, well_formed, Arrival, BlockVerdict, Bounded, Deadlocks,
    Receptions, Stable, WellFormed, WellFormedViolation,
};
pub use state::{GlobalState, GlobalStateDisplay};

/// Explored global state space.
pub type StateGraph = Graph<GlobalState>;

/// Three-valued verdict; `Unknown` means a budget cut the search short.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Exploration limits. `None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_states: Option<usize>,
    pub max_channel_len: Option<usize>,
    pub max_total_len: Option<usize>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: Some(1_000_000),
            max_channel_len: Some(64),
            max_total_len: None,
        }
    }
}

impl Budget {
    pub fn unbounded() -> Self {
        Budget {
            max_states: None,
            max_channel_len: None,
            max_total_len: None,
        }
    }

    /// Default state limit with the given per-channel cap.
    pub fn with_channel_cap(cap: usize) -> Self {
        Budget {
            max_channel_len: Some(cap),
            ..Budget::default()
        }
    }

    /// Whether channel contents respect the length caps.
    pub fn fits(&self, g: &GlobalState) -> bool {
        let lens: Vec<usize> = g.channels().iter().map(|c| c.len()).collect();
        if let Some(m) = self.max_channel_len {
            if lens.iter().any(|&l| l > m) {
                return false;
            }
        }
        if let Some(m) = self.max_total_len {
            if lens.iter().sum::<usize>() > m {
                return false;
            }
        }
        true
    }

    /// Componentwise at least as generous as `other`.
    pub fn covers(&self, other: &Budget) -> bool {
        let ge = |a: Option<usize>, b: Option<usize>| match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x >= y,
        };
        ge(self.max_states, other.max_states)
            && ge(self.max_channel_len, other.max_channel_len)
            && ge(self.max_total_len, other.max_total_len)
    }
}

/// Per-node, per-state outgoing transitions of a protocol.
pub struct Stepper<'a> {
    p: &'a Protocol,
    out: Vec<Vec<Vec<Transition>>>,
}

impl<'a> Stepper<'a> {
    pub fn new(p: &'a Protocol) -> Self {
        let out = p
            .machines
            .iter()
            .map(|m| {
                let mut v = vec![Vec::new(); m.num_states()];
                for t in &m.transitions {
                    v[t.from as usize].push(*t);
                }
                v
            })
            .collect();
        Stepper { p, out }
    }

    pub fn protocol(&self) -> &'a Protocol {
        self.p
    }

    /// Transitions of node `j` leaving state `q`, in declaration order.
    pub fn transitions(&self, j: NodeId, q: u32) -> &[Transition] {
        &self.out[j][q as usize]
    }

    /// Applies `a` (a move of node `j` to state `to`) if enabled.
    pub fn apply(&self, g: &GlobalState, j: NodeId, a: &Action, to: u32) -> Option<GlobalState> {
        let mut chans = g.channels();
        let mut comp = g.composite().to_vec();
        comp[j] = to;
        match a.dir {
            Dir::Send => {
                let mut w: Vec<Sym> = chans[a.channel].to_vec();
                w.push(a.sym);
                chans[a.channel] = &w;
                Some(GlobalState::new(&comp, &chans))
            }
            Dir::Recv => {
                let c = chans[a.channel];
                if c.first() != Some(&a.sym) {
                    return None;
                }
                chans[a.channel] = &c[1..];
                Some(GlobalState::new(&comp, &chans))
            }
        }
    }

    /// Moves of node `j` from `g`.
    pub fn node_moves(&self, g: &GlobalState, j: NodeId) -> Vec<(Action, GlobalState)> {
        let q = g.composite()[j];
        self.out[j][q as usize]
            .iter()
            .filter_map(|t| self.apply(g, j, &t.action, t.to).map(|n| (t.action, n)))
            .collect()
    }

    /// All successors: nodes in declaration order, then transitions in
    /// declaration order.
    pub fn successors(&self, g: &GlobalState) -> Vec<(Action, GlobalState)> {
        (0..self.p.nodes.len())
            .flat_map(|j| self.node_moves(g, j))
            .collect()
    }

    /// Whether node `j` has an enabled move at `g`.
    pub fn node_enabled(&self, g: &GlobalState, j: NodeId) -> bool {
        let q = g.composite()[j];
        self.out[j][q as usize].iter().any(|t| match t.action.dir {
            Dir::Send => true,
            Dir::Recv => g.channel(t.action.channel).first() == Some(&t.action.sym),
        })
    }
}

/// The successor relation on global states.
pub fn successors(p: &Protocol, g: &GlobalState) -> Vec<(Action, GlobalState)> {
    Stepper::new(p).successors(g)
}

/// A state predicate usable as an exploration filter.
pub type Filter<'a> = &'a (dyn Fn(&GlobalState) -> bool + Sync);

/// Breadth-first closure from `(S⁰, C⁰)` under the budget, keeping only
/// states accepted by `filter`.
pub fn reach(p: &Protocol, budget: &Budget, filter: Option<Filter<'_>>) -> StateGraph {
    let stepper = Stepper::new(p);
    Graph::explore(GlobalState::initial(p), budget.max_states, |g| {
        let mut capped = false;
        let mut filtered = false;
        let moves = stepper
            .successors(g)
            .into_iter()
            .filter(|(_, n)| {
                if !budget.fits(n) {
                    capped = true;
                    false
                } else if filter.is_some_and(|f| !f(n)) {
                    filtered = true;
                    false
                } else {
                    true
                }
            })
            .collect();
        Expansion {
            moves,
            capped,
            filtered,
        }
    })
}

/// The node performing `a`: the tail of its channel for sends, the head
/// for receptions.
pub fn actor(p: &Protocol, a: &Action) -> NodeId {
    let c = &p.channels[a.channel];
    match a.dir {
        Dir::Send => c.from,
        Dir::Recv => c.to,
    }
}

/// Renders a path as one line per step.
pub fn format_path(p: &Protocol, sg: &StateGraph, path: &[Edge]) -> Vec<String> {
    let mut out = vec![format!("{}", sg.state(0).display(p))];
    for e in path {
        out.push(format!(
            "  {} -> {}",
            p.action_name(&e.action),
            sg.state(e.to as usize).display(p)
        ));
    }
    out
}

use indexmap::IndexSet;

use super::{priority_order, FlowError, PriorityScheme};
use crate::explore::{Budget, Edge, Expansion, GlobalState, Graph, StateGraph, Stepper};
use crate::model::{ChannelId, Dir, NodeId, Protocol};

/// What the scheduler has committed to about a node's next local step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeStatus {
    /// Nothing committed.
    Free,
    /// The next step is a reception on this channel, which was empty when
    /// the commitment was made.
    Recv(ChannelId),
    /// The node makes no further steps.
    Done,
}

/// A global state together with per-node commitments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: GlobalState,
    pub status: Vec<NodeStatus>,
}

impl Config {
    /// No node owes a pending reception.
    pub fn is_settled(&self) -> bool {
        self.status.iter().all(|s| !matches!(s, NodeStatus::Recv(_)))
    }
}

/// Configuration graph of a scheduled exploration and its projection onto
/// global states.
pub struct Scheduled {
    pub configs: Graph<Config>,
    pub projection: StateGraph,
}

impl Scheduled {
    /// Looks for two consecutive configurations, on a path that can still
    /// end settled with empty channels, where `pred` fails at both. Returns
    /// the configuration path up to the second one.
    pub fn frequently_violation(&self, pred: impl Fn(&GlobalState) -> bool) -> Option<Vec<usize>> {
        let cg = &self.configs;
        let live = cg.co_reachable(|i| {
            let c = cg.state(i);
            c.is_settled() && c.state.channels_empty()
        });
        for e in cg.edges() {
            let (u, v) = (e.from as usize, e.to as usize);
            if live[v] && !pred(&cg.state(u).state) && !pred(&cg.state(v).state) {
                let mut path: Vec<usize> = std::iter::once(0)
                    .chain(cg.path_to(u).iter().map(|e| e.to as usize))
                    .collect();
                path.push(v);
                return Some(path);
            }
        }
        None
    }
}

struct Scheduler<'a> {
    stepper: Stepper<'a>,
    order: Vec<NodeId>,
    chain: bool,
    budget: &'a Budget,
}

impl Scheduler<'_> {
    fn p(&self) -> &Protocol {
        self.stepper.protocol()
    }

    /// Input channels of `j` that are empty and on which its current state
    /// can receive.
    fn waitable(&self, g: &GlobalState, j: NodeId) -> Vec<ChannelId> {
        let q = g.composite()[j];
        let mut out: Vec<ChannelId> = self
            .stepper
            .transitions(j, q)
            .iter()
            .filter(|t| t.action.dir == Dir::Recv && g.channel(t.action.channel).is_empty())
            .map(|t| t.action.channel)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Runs node `j` from `c`, restricted to receptions on `only` if set.
    fn run(&self, c: &Config, status: &[NodeStatus], j: NodeId, only: Option<ChannelId>, out: &mut Expansion<Config>) {
        for (a, n) in self.stepper.node_moves(&c.state, j) {
            if only.is_some_and(|ch| a.dir != Dir::Recv || a.channel != ch) {
                continue;
            }
            if !self.budget.fits(&n) {
                out.capped = true;
                continue;
            }
            let mut st = status.to_vec();
            st[j] = NodeStatus::Free;
            out.moves.push((a, Config { state: n, status: st }));
        }
    }

    /// Standard scheme: the highest-priority node not committed as blocked
    /// executes.
    fn standard(&self, c: &Config, k: usize, status: &mut Vec<NodeStatus>, out: &mut Expansion<Config>) {
        let Some(&j) = self.order.get(k) else { return };
        match status[j] {
            NodeStatus::Done => self.standard(c, k + 1, status, out),
            NodeStatus::Recv(ch) => {
                if c.state.channel(ch).is_empty() {
                    self.standard(c, k + 1, status, out);
                } else {
                    self.run(c, status, j, Some(ch), out);
                }
            }
            NodeStatus::Free => {
                self.run(c, status, j, None, out);
                for ch in self.waitable(&c.state, j) {
                    status[j] = NodeStatus::Recv(ch);
                    self.standard(c, k + 1, status, out);
                }
                status[j] = NodeStatus::Done;
                self.standard(c, k + 1, status, out);
                status[j] = NodeStatus::Free;
            }
        }
    }

    /// Blocking-chain scheme: follow waits from the highest-priority live
    /// node to the node it depends on and run that one.
    fn chain(&self, c: &Config, from: usize, status: &mut Vec<NodeStatus>, out: &mut Expansion<Config>) {
        let Some(k) = (from..self.order.len()).find(|&k| status[self.order[k]] != NodeStatus::Done) else {
            return;
        };
        let h = self.order[k];
        self.follow(c, h, k, &mut vec![h], status, out);
    }

    fn follow(
        &self,
        c: &Config,
        j: NodeId,
        head: usize,
        visited: &mut Vec<NodeId>,
        status: &mut Vec<NodeStatus>,
        out: &mut Expansion<Config>,
    ) {
        let sender = |ch: ChannelId| self.p().channels[ch].from;
        match status[j] {
            NodeStatus::Done => {}
            NodeStatus::Recv(ch) => {
                if !c.state.channel(ch).is_empty() {
                    self.run(c, status, j, Some(ch), out);
                } else {
                    self.step_to(c, sender(ch), head, visited, status, out);
                }
            }
            NodeStatus::Free => {
                self.run(c, status, j, None, out);
                for ch in self.waitable(&c.state, j) {
                    status[j] = NodeStatus::Recv(ch);
                    self.step_to(c, sender(ch), head, visited, status, out);
                }
                if visited.len() == 1 {
                    status[j] = NodeStatus::Done;
                    self.chain(c, head + 1, status, out);
                }
                status[j] = NodeStatus::Free;
            }
        }
    }

    fn step_to(
        &self,
        c: &Config,
        s: NodeId,
        head: usize,
        visited: &mut Vec<NodeId>,
        status: &mut Vec<NodeStatus>,
        out: &mut Expansion<Config>,
    ) {
        // A wait cycle, or a wait on a finished sender, never resolves.
        if visited.contains(&s) || status[s] == NodeStatus::Done {
            return;
        }
        visited.push(s);
        self.follow(c, s, head, visited, status, out);
        visited.pop();
    }

    fn expand(&self, c: &Config) -> Expansion<Config> {
        let mut out = Expansion {
            moves: Vec::new(),
            capped: false,
            filtered: false,
        };
        let mut status = c.status.clone();
        if self.chain {
            self.chain(c, 0, &mut status, &mut out);
        } else {
            self.standard(c, 0, &mut status, &mut out);
        }
        // Different commitments can produce the same move; keep one copy.
        let mut seen = IndexSet::new();
        out.moves.retain(|m| seen.insert(m.clone()));
        out
    }
}

/// Explores configurations admitted by `scheme` from the initial state.
pub fn scheduled_configs(p: &Protocol, scheme: &PriorityScheme, budget: &Budget) -> Result<Scheduled, FlowError> {
    let order = priority_order(p, scheme)?;
    let sched = Scheduler {
        stepper: Stepper::new(p),
        order,
        chain: matches!(scheme, PriorityScheme::BlockingChain(_)),
        budget,
    };
    let init = Config {
        state: GlobalState::initial(p),
        status: vec![NodeStatus::Free; p.nodes.len()],
    };
    let configs = Graph::explore(init, budget.max_states, |c| sched.expand(c));
    let projection = project(&configs);
    Ok(Scheduled { configs, projection })
}

/// Global states on scheduled executions that can end with empty channels.
pub fn scheduled_reach(p: &Protocol, scheme: &PriorityScheme, budget: &Budget) -> Result<StateGraph, FlowError> {
    Ok(scheduled_configs(p, scheme, budget)?.projection)
}

/// Projects the configurations that can still end settled with empty
/// channels, or that lead to a pruned configuration.
fn project(cg: &Graph<Config>) -> StateGraph {
    let live = cg.co_reachable(|i| {
        let c = cg.state(i);
        cg.is_truncated(i) || (c.is_settled() && c.state.channels_empty())
    });
    let mut states: IndexSet<GlobalState> = IndexSet::new();
    let map: Vec<Option<u32>> = cg
        .states()
        .enumerate()
        .map(|(i, c)| live[i].then(|| states.insert_full(c.state.clone()).0 as u32))
        .collect();
    let mut truncated = vec![false; states.len()];
    for i in 0..cg.len() {
        if let (Some(k), true) = (map[i], cg.is_truncated(i)) {
            truncated[k as usize] = true;
        }
    }
    let edges: Vec<Edge> = cg
        .edges()
        .iter()
        .filter_map(|e| {
            Some(Edge {
                from: map[e.from as usize]?,
                action: e.action,
                to: map[e.to as usize]?,
            })
        })
        .collect();
    Graph::from_parts(states, edges, truncated, cg.exhausted)
}

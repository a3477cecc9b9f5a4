//! Protocol model: communication graph, channel alphabets and one finite
//! state machine per node.

mod builder;
mod parse;
mod validate;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lang::{Alphabet, Sym};

pub use builder::ProtocolBuilder;
pub use parse::parse_protocol;
pub use validate::{classify, sr_checks, validate, Classification, Diagnostic, Severity, SrReport};

/// Index of a node in [`Protocol::nodes`].
pub type NodeId = usize;
/// Index of a channel in [`Protocol::channels`].
pub type ChannelId = usize;
/// Index of a state within one node's machine.
pub type StateId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("symbol `{sym}` is not in the alphabet of channel `{channel}`")]
    UnknownSymbol { sym: String, channel: String },
    #[error("unknown state `{state}` of node `{node}`")]
    UnknownState { node: String, state: String },
    #[error("duplicate declaration of {0}")]
    Duplicate(String),
    #[error("{0}")]
    Invalid(String),
}

/// Direction of an action, seen from the machine performing it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    /// `-b`: append `b` to an outgoing channel.
    Send,
    /// `+b`: remove `b` from the head of an incoming channel.
    Recv,
}

/// A send or receive of one symbol on one channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub dir: Dir,
    pub channel: ChannelId,
    pub sym: Sym,
}

impl Action {
    pub fn send(channel: ChannelId, sym: Sym) -> Self {
        Action { dir: Dir::Send, channel, sym }
    }

    pub fn recv(channel: ChannelId, sym: Sym) -> Self {
        Action { dir: Dir::Recv, channel, sym }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub action: Action,
    pub to: StateId,
}

/// A directed FIFO channel with its message alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Channel {
    pub name: String,
    pub from: NodeId,
    pub to: NodeId,
    pub alphabet: Arc<Alphabet>,
}

/// The finite state machine of one node.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Machine {
    pub states: Vec<String>,
    pub start: StateId,
    pub transitions: Vec<Transition>,
}

impl Machine {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| i as StateId)
    }

    /// Outgoing transition indices per state.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            if let Some(v) = out.get_mut(t.from as usize) {
                v.push(i);
            }
        }
        out
    }

    /// Transitions leaving `q`.
    pub fn outgoing(&self, q: StateId) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.from == q)
    }

    /// A receive state has no send transitions (terminal states qualify).
    pub fn is_receive_state(&self, q: StateId) -> bool {
        self.outgoing(q).all(|t| t.action.dir != Dir::Send)
    }

    /// A send state has no receive transitions (terminal states qualify).
    pub fn is_send_state(&self, q: StateId) -> bool {
        self.outgoing(q).all(|t| t.action.dir != Dir::Recv)
    }

    /// States reachable from the start in the transition diagram.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        if self.states.is_empty() {
            return seen;
        }
        let out = self.out_edges();
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(q) = stack.pop() {
            for &i in &out[q as usize] {
                let t = self.transitions[i].to;
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }
}

/// A protocol: communication graph, channel alphabets and node machines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol {
    pub name: String,
    pub nodes: Vec<String>,
    pub channels: Vec<Channel>,
    /// One machine per node, in node order.
    pub machines: Vec<Machine>,
}

/// One state per node.
pub type CompositeState = Vec<StateId>;

impl Protocol {
    pub fn node_index(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn channel_index(&self, name: &str) -> Option<ChannelId> {
        self.channels.iter().position(|c| c.name == name)
    }

    /// Channel alphabets in channel order.
    pub fn alphabets(&self) -> Vec<Arc<Alphabet>> {
        self.channels.iter().map(|c| c.alphabet.clone()).collect()
    }

    /// Channels whose head is `node`.
    pub fn inputs(&self, node: NodeId) -> Vec<ChannelId> {
        (0..self.channels.len()).filter(|&c| self.channels[c].to == node).collect()
    }

    /// Channels whose tail is `node`.
    pub fn outputs(&self, node: NodeId) -> Vec<ChannelId> {
        (0..self.channels.len()).filter(|&c| self.channels[c].from == node).collect()
    }

    /// The initial composite state.
    pub fn initial(&self) -> CompositeState {
        self.machines.iter().map(|m| m.start).collect()
    }

    /// Looks up `sym@channel`.
    pub fn symbol(&self, channel: &str, sym: &str) -> Result<(ChannelId, Sym), ModelError> {
        let c = self
            .channel_index(channel)
            .ok_or_else(|| ModelError::UnknownChannel(channel.to_string()))?;
        let s = self.channels[c]
            .alphabet
            .index(sym)
            .ok_or_else(|| ModelError::UnknownSymbol {
                sym: sym.to_string(),
                channel: channel.to_string(),
            })?;
        Ok((c, s))
    }

    /// Parses a composite state written as `(s0,s1,...)` or `s0,s1,...`.
    pub fn parse_composite(&self, text: &str) -> Result<CompositeState, ModelError> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(|s| s.trim()).collect();
        if parts.len() != self.nodes.len() {
            return Err(ModelError::Invalid(format!(
                "composite state `{text}` has {} components, protocol has {} nodes",
                parts.len(),
                self.nodes.len()
            )));
        }
        parts
            .iter()
            .enumerate()
            .map(|(j, p)| {
                self.machines[j]
                    .state_index(p)
                    .ok_or_else(|| ModelError::UnknownState {
                        node: self.nodes[j].clone(),
                        state: p.to_string(),
                    })
            })
            .collect()
    }

    /// Renders a composite state as `(s0,s1,...)`.
    pub fn composite_name(&self, s: &[StateId]) -> String {
        let parts: Vec<&str> = s
            .iter()
            .enumerate()
            .map(|(j, &q)| self.machines[j].states[q as usize].as_str())
            .collect();
        format!("({})", parts.join(","))
    }

    /// Renders an action as `-sym@channel` or `+sym@channel`.
    pub fn action_name(&self, a: &Action) -> String {
        let c = &self.channels[a.channel];
        let sign = match a.dir {
            Dir::Send => '-',
            Dir::Recv => '+',
        };
        format!("{sign}{}@{}", c.alphabet.name(a.sym), c.name)
    }

    /// Renders one channel's contents.
    pub fn word_name(&self, channel: ChannelId, w: &[Sym]) -> String {
        self.channels[channel].alphabet.word(w)
    }

    /// Total number of composite states.
    pub fn composite_count(&self) -> usize {
        self.machines.iter().map(|m| m.num_states()).product()
    }
}

impl fmt::Display for Protocol {
    /// Writes the line-oriented protocol file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "protocol {}", self.name)?;
        for n in &self.nodes {
            writeln!(f, "node {n}")?;
        }
        for c in &self.channels {
            writeln!(
                f,
                "channel {} from {} to {}",
                c.name, self.nodes[c.from], self.nodes[c.to]
            )?;
        }
        for c in &self.channels {
            writeln!(f, "alphabet {} {}", c.name, c.alphabet.names().join(" "))?;
        }
        for (j, m) in self.machines.iter().enumerate() {
            if m.states.is_empty() {
                continue;
            }
            writeln!(f, "machine {} start {}", self.nodes[j], m.states[m.start as usize])?;
            for t in &m.transitions {
                writeln!(
                    f,
                    "trans {} {} {} {}",
                    self.nodes[j],
                    m.states[t.from as usize],
                    self.action_name(&t.action),
                    m.states[t.to as usize]
                )?;
            }
        }
        Ok(())
    }
}

use std::collections::HashMap;
use std::sync::Arc;

use super::{Action, Channel, Dir, Machine, ModelError, NodeId, Protocol, StateId, Transition};
use crate::lang::Alphabet;

struct ChannelDraft {
    name: String,
    from: NodeId,
    to: NodeId,
    symbols: Vec<String>,
}

#[derive(Default)]
struct MachineDraft {
    states: Vec<String>,
    index: HashMap<String, StateId>,
    start: Option<StateId>,
    trans: Vec<(StateId, Dir, String, String, StateId, usize)>,
}

impl MachineDraft {
    fn state(&mut self, name: &str) -> StateId {
        if let Some(&q) = self.index.get(name) {
            return q;
        }
        let q = self.states.len() as StateId;
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), q);
        q
    }
}

/// Incremental, name-based protocol construction.
///
/// States are created on first mention. Symbols are resolved when
/// [`ProtocolBuilder::build`] runs, so declarations may come in any order.
#[derive(Default)]
pub struct ProtocolBuilder {
    name: String,
    nodes: Vec<String>,
    node_index: HashMap<String, NodeId>,
    channels: Vec<ChannelDraft>,
    channel_index: HashMap<String, usize>,
    machines: Vec<MachineDraft>,
    line: usize,
}

impl ProtocolBuilder {
    pub fn new(name: &str) -> Self {
        ProtocolBuilder {
            name: name.to_string(),
            ..Default::default()
        }
    }

    /// Source line attached to subsequent transitions for error reports.
    pub fn set_line(&mut self, line: usize) {
        self.line = line;
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.to_string();
    }

    pub fn node(&mut self, name: &str) -> Result<NodeId, ModelError> {
        if self.node_index.contains_key(name) {
            return Err(ModelError::Duplicate(format!("node `{name}`")));
        }
        let id = self.nodes.len();
        self.nodes.push(name.to_string());
        self.node_index.insert(name.to_string(), id);
        self.machines.push(MachineDraft::default());
        Ok(id)
    }

    fn node_id(&self, name: &str) -> Result<NodeId, ModelError> {
        self.node_index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownNode(name.to_string()))
    }

    pub fn channel(&mut self, name: &str, from: &str, to: &str) -> Result<usize, ModelError> {
        if self.channel_index.contains_key(name) {
            return Err(ModelError::Duplicate(format!("channel `{name}`")));
        }
        let (from, to) = (self.node_id(from)?, self.node_id(to)?);
        let id = self.channels.len();
        self.channels.push(ChannelDraft {
            name: name.to_string(),
            from,
            to,
            symbols: Vec::new(),
        });
        self.channel_index.insert(name.to_string(), id);
        Ok(id)
    }

    /// Adds symbols to a channel alphabet.
    pub fn symbols<S: AsRef<str>>(&mut self, channel: &str, syms: &[S]) -> Result<(), ModelError> {
        let c = *self
            .channel_index
            .get(channel)
            .ok_or_else(|| ModelError::UnknownChannel(channel.to_string()))?;
        for s in syms {
            let s = s.as_ref();
            if self.channels[c].symbols.iter().any(|x| x == s) {
                return Err(ModelError::Duplicate(format!(
                    "symbol `{s}` on channel `{channel}`"
                )));
            }
            self.channels[c].symbols.push(s.to_string());
        }
        Ok(())
    }

    pub fn start(&mut self, node: &str, state: &str) -> Result<(), ModelError> {
        let j = self.node_id(node)?;
        let m = &mut self.machines[j];
        if m.start.is_some() {
            return Err(ModelError::Duplicate(format!("machine for node `{node}`")));
        }
        let q = m.state(state);
        m.start = Some(q);
        Ok(())
    }

    /// Adds `from --(dir sym@channel)--> to` to the machine of `node`.
    pub fn trans(
        &mut self,
        node: &str,
        from: &str,
        dir: Dir,
        sym: &str,
        channel: &str,
        to: &str,
    ) -> Result<(), ModelError> {
        let j = self.node_id(node)?;
        let m = &mut self.machines[j];
        let (p, q) = (m.state(from), m.state(to));
        m.trans.push((p, dir, sym.to_string(), channel.to_string(), q, self.line));
        Ok(())
    }

    pub fn build(self) -> Result<Protocol, ModelError> {
        let mut channels = Vec::new();
        for c in &self.channels {
            let alphabet = Alphabet::new(c.symbols.iter().cloned())
                .map_err(|e| ModelError::Invalid(e.to_string()))?;
            channels.push(Channel {
                name: c.name.clone(),
                from: c.from,
                to: c.to,
                alphabet: Arc::new(alphabet),
            });
        }
        let mut machines = Vec::new();
        for (j, m) in self.machines.into_iter().enumerate() {
            let start = match m.start {
                Some(q) => q,
                None if m.states.is_empty() => 0,
                None => {
                    return Err(ModelError::Invalid(format!(
                        "node `{}` has transitions but no machine declaration",
                        self.nodes[j]
                    )))
                }
            };
            let mut transitions = Vec::new();
            for (p, dir, sym, chan, q, line) in m.trans {
                let located = |e: ModelError| {
                    if line == 0 {
                        e
                    } else {
                        ModelError::Parse {
                            line,
                            msg: e.to_string(),
                        }
                    }
                };
                let c = *self
                    .channel_index
                    .get(&chan)
                    .ok_or_else(|| located(ModelError::UnknownChannel(chan.clone())))?;
                let s = channels[c].alphabet.index(&sym).ok_or_else(|| {
                    located(ModelError::UnknownSymbol {
                        sym: sym.clone(),
                        channel: chan.clone(),
                    })
                })?;
                transitions.push(Transition {
                    from: p,
                    action: Action { dir, channel: c, sym: s },
                    to: q,
                });
            }
            machines.push(Machine {
                states: m.states,
                start,
                transitions,
            });
        }
        Ok(Protocol {
            name: self.name,
            nodes: self.nodes,
            channels,
            machines,
        })
    }
}

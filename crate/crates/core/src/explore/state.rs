use std::fmt;

use crate::lang::Sym;
use crate::model::{Protocol, StateId};

/// A composite state together with the contents of every channel.
///
/// Stored as one packed buffer: the node count, one state per node, then
/// for each channel its length followed by its symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalState {
    data: Box<[u32]>,
}

impl GlobalState {
    pub fn new(composite: &[StateId], channels: &[&[Sym]]) -> Self {
        let total: usize = channels.iter().map(|c| c.len() + 1).sum();
        let mut data = Vec::with_capacity(1 + composite.len() + total);
        data.push(composite.len() as u32);
        data.extend_from_slice(composite);
        for c in channels {
            data.push(c.len() as u32);
            data.extend_from_slice(c);
        }
        GlobalState {
            data: data.into_boxed_slice(),
        }
    }

    /// `(S⁰, C⁰)` of `p`.
    pub fn initial(p: &Protocol) -> Self {
        let empty: Vec<&[Sym]> = vec![&[]; p.channels.len()];
        GlobalState::new(&p.initial(), &empty)
    }

    fn nodes(&self) -> usize {
        self.data[0] as usize
    }

    pub fn composite(&self) -> &[StateId] {
        &self.data[1..1 + self.nodes()]
    }

    /// Contents of every channel, in channel order.
    pub fn channels(&self) -> Vec<&[Sym]> {
        let mut out = Vec::new();
        let mut i = 1 + self.nodes();
        while i < self.data.len() {
            let n = self.data[i] as usize;
            out.push(&self.data[i + 1..i + 1 + n]);
            i += 1 + n;
        }
        out
    }

    pub fn channel(&self, ch: usize) -> &[Sym] {
        let mut i = 1 + self.nodes();
        for _ in 0..ch {
            i += 1 + self.data[i] as usize;
        }
        let n = self.data[i] as usize;
        &self.data[i + 1..i + 1 + n]
    }

    /// Owned copy of all channel contents.
    pub fn contents(&self) -> Vec<Vec<Sym>> {
        self.channels().into_iter().map(|c| c.to_vec()).collect()
    }

    pub fn channels_empty(&self) -> bool {
        self.channels().iter().all(|c| c.is_empty())
    }

    pub fn total_len(&self) -> usize {
        self.channels().iter().map(|c| c.len()).sum()
    }

    /// Renders as `(s0,s1) [x_a | x_b]` using protocol names.
    pub fn display<'a>(&'a self, p: &'a Protocol) -> GlobalStateDisplay<'a> {
        GlobalStateDisplay { g: self, p }
    }
}

impl fmt::Debug for GlobalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlobalState")
            .field("composite", &self.composite())
            .field("channels", &self.channels())
            .finish()
    }
}

pub struct GlobalStateDisplay<'a> {
    g: &'a GlobalState,
    p: &'a Protocol,
}

impl fmt::Display for GlobalStateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chans: Vec<String> = self
            .g
            .channels()
            .iter()
            .enumerate()
            .map(|(i, c)| self.p.word_name(i, c))
            .collect();
        write!(
            f,
            "{} [{}]",
            self.p.composite_name(self.g.composite()),
            chans.join(" | ")
        )
    }
}

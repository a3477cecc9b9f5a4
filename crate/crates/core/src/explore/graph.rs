use std::collections::VecDeque;
use std::hash::Hash;

use indexmap::IndexSet;
use rayon::prelude::*;

use crate::model::Action;

/// A labeled edge between two state indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: u32,
    pub action: Action,
    pub to: u32,
}

/// Result of expanding one state.
pub struct Expansion<N> {
    pub moves: Vec<(Action, N)>,
    /// Some successor exceeded a channel cap.
    pub capped: bool,
    /// Some successor was rejected by a state filter.
    pub filtered: bool,
}

/// An explored state space with breadth-first numbering.
///
/// Index 0 is the initial state. Edges are sorted by source index.
#[derive(Clone, Debug)]
pub struct Graph<N> {
    states: IndexSet<N>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    parent: Vec<Option<u32>>,
    truncated: Vec<bool>,
    /// No cap or state limit pruned anything; filter pruning does not count.
    pub exhausted: bool,
}

impl<N: Hash + Eq + Clone + Send + Sync> Graph<N> {
    /// Level-synchronous breadth-first search. Expansion of a level runs in
    /// parallel; results are merged in index order so numbering does not
    /// depend on the thread count.
    pub fn explore<F>(init: N, max_states: Option<usize>, expand: F) -> Self
    where
        F: Fn(&N) -> Expansion<N> + Sync,
    {
        let limit = max_states.unwrap_or(usize::MAX).max(1);
        let mut states = IndexSet::new();
        states.insert(init);
        let mut edges = Vec::new();
        let mut parent = vec![None];
        let mut truncated = vec![false];
        let mut exhausted = true;
        let mut lo = 0;
        while lo < states.len() {
            let hi = states.len();
            let level: Vec<Expansion<N>> = (lo..hi)
                .into_par_iter()
                .map(|i| expand(states.get_index(i).expect("index in range")))
                .collect();
            for (k, exp) in level.into_iter().enumerate() {
                let from = (lo + k) as u32;
                if exp.capped {
                    exhausted = false;
                }
                if exp.capped || exp.filtered {
                    truncated[from as usize] = true;
                }
                for (action, n) in exp.moves {
                    let to = match states.get_index_of(&n) {
                        Some(t) => t as u32,
                        None if states.len() < limit => {
                            let (t, _) = states.insert_full(n);
                            parent.push(Some(edges.len() as u32));
                            truncated.push(false);
                            t as u32
                        }
                        None => {
                            exhausted = false;
                            truncated[from as usize] = true;
                            continue;
                        }
                    };
                    edges.push(Edge { from, action, to });
                }
            }
            lo = hi;
        }
        let mut offsets = vec![0usize; states.len() + 1];
        for e in &edges {
            offsets[e.from as usize + 1] += 1;
        }
        for i in 0..states.len() {
            offsets[i + 1] += offsets[i];
        }
        Graph {
            states,
            edges,
            offsets,
            parent,
            truncated,
            exhausted,
        }
    }

    /// Builds a graph from explicit parts (used for projections).
    pub(crate) fn from_parts(
        states: IndexSet<N>,
        mut edges: Vec<Edge>,
        truncated: Vec<bool>,
        exhausted: bool,
    ) -> Self {
        edges.sort_by_key(|e| (e.from, e.to, e.action));
        edges.dedup();
        let n = states.len();
        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.from as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        if n > 0 {
            seen[0] = true;
            let mut queue = VecDeque::from([0u32]);
            while let Some(v) = queue.pop_front() {
                for (k, e) in edges[offsets[v as usize]..offsets[v as usize + 1]].iter().enumerate() {
                    if !seen[e.to as usize] {
                        seen[e.to as usize] = true;
                        parent[e.to as usize] = Some((offsets[v as usize] + k) as u32);
                        queue.push_back(e.to);
                    }
                }
            }
        }
        Graph {
            states,
            edges,
            offsets,
            parent,
            truncated,
            exhausted,
        }
    }
}

impl<N: Hash + Eq> Graph<N> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &N {
        self.states.get_index(i).expect("state index in range")
    }

    pub fn states(&self) -> impl Iterator<Item = &N> {
        self.states.iter()
    }

    pub fn index_of(&self, n: &N) -> Option<usize> {
        self.states.get_index_of(n)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, i: usize) -> &[Edge] {
        &self.edges[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Whether some successor of state `i` was pruned.
    pub fn is_truncated(&self, i: usize) -> bool {
        self.truncated[i]
    }

    /// A shortest path of edges from the initial state to `i`.
    pub fn path_to(&self, i: usize) -> Vec<Edge> {
        let mut out = Vec::new();
        let mut v = i;
        while let Some(e) = self.parent[v] {
            let e = self.edges[e as usize];
            out.push(e);
            v = e.from as usize;
        }
        out.reverse();
        out
    }

    /// States from which some state satisfying `target` is reachable.
    pub fn co_reachable(&self, target: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.len();
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for e in &self.edges {
            preds[e.to as usize].push(e.from);
        }
        let mut mark = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| target(i)).collect();
        for &i in &stack {
            mark[i] = true;
        }
        while let Some(v) = stack.pop() {
            for &u in &preds[v] {
                if !mark[u as usize] {
                    mark[u as usize] = true;
                    stack.push(u as usize);
                }
            }
        }
        mark
    }

    /// States from which some truncated state is reachable.
    pub fn reaches_truncated(&self) -> Vec<bool> {
        self.co_reachable(|i| self.truncated[i])
    }
}

use std::collections::HashMap;
use std::sync::Arc;

use super::{Alphabet, Dfa, Regex, Sym};

/// Nondeterministic automaton with epsilon moves and several start states.
#[derive(Debug, Clone)]
pub struct Nfa {
    k: usize,
    trans: Vec<Vec<(Option<Sym>, u32)>>,
    starts: Vec<u32>,
    accepting: Vec<bool>,
}

impl Nfa {
    /// Empty automaton over an alphabet of `k` symbols.
    pub fn new(k: usize) -> Self {
        Nfa {
            k,
            trans: Vec::new(),
            starts: Vec::new(),
            accepting: Vec::new(),
        }
    }

    pub fn add_state(&mut self, accepting: bool) -> u32 {
        self.trans.push(Vec::new());
        self.accepting.push(accepting);
        (self.trans.len() - 1) as u32
    }

    pub fn set_accepting(&mut self, q: u32, acc: bool) {
        self.accepting[q as usize] = acc;
    }

    /// Adds an edge; `None` is an epsilon move.
    pub fn add_edge(&mut self, from: u32, sym: Option<Sym>, to: u32) {
        debug_assert!(sym.is_none_or(|s| (s as usize) < self.k));
        self.trans[from as usize].push((sym, to));
    }

    pub fn add_start(&mut self, q: u32) {
        self.starts.push(q);
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    /// Thompson construction for `r` over `k` symbols.
    pub fn from_regex(r: &Regex, k: usize) -> Self {
        let mut n = Nfa::new(k);
        let (s, f) = n.thompson(r);
        n.add_start(s);
        n.set_accepting(f, true);
        n
    }

    fn thompson(&mut self, r: &Regex) -> (u32, u32) {
        match r {
            Regex::Empty => (self.add_state(false), self.add_state(false)),
            Regex::Eps => {
                let s = self.add_state(false);
                let f = self.add_state(false);
                self.add_edge(s, None, f);
                (s, f)
            }
            Regex::Sym(b) => {
                let s = self.add_state(false);
                let f = self.add_state(false);
                self.add_edge(s, Some(*b), f);
                (s, f)
            }
            Regex::Union(a, b) => {
                let s = self.add_state(false);
                let (s1, f1) = self.thompson(a);
                let (s2, f2) = self.thompson(b);
                let f = self.add_state(false);
                self.add_edge(s, None, s1);
                self.add_edge(s, None, s2);
                self.add_edge(f1, None, f);
                self.add_edge(f2, None, f);
                (s, f)
            }
            Regex::Concat(a, b) => {
                let (s1, f1) = self.thompson(a);
                let (s2, f2) = self.thompson(b);
                self.add_edge(f1, None, s2);
                (s1, f2)
            }
            Regex::Star(a) => {
                let s = self.add_state(false);
                let (s1, f1) = self.thompson(a);
                let f = self.add_state(false);
                self.add_edge(s, None, s1);
                self.add_edge(s, None, f);
                self.add_edge(f1, None, s1);
                self.add_edge(f1, None, f);
                (s, f)
            }
        }
    }

    fn closure(&self, set: &mut Vec<u32>) {
        let mut seen = vec![false; self.trans.len()];
        let mut stack: Vec<u32> = Vec::new();
        for &q in set.iter() {
            if !seen[q as usize] {
                seen[q as usize] = true;
                stack.push(q);
            }
        }
        while let Some(q) = stack.pop() {
            for &(sym, t) in &self.trans[q as usize] {
                if sym.is_none() && !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        set.clear();
        set.extend((0..self.trans.len() as u32).filter(|&q| seen[q as usize]));
    }

    /// Subset construction; the result is complete and reachable, not minimal.
    pub fn determinize(&self, alphabet: Arc<Alphabet>) -> Dfa {
        assert_eq!(alphabet.len(), self.k, "alphabet size mismatch");
        let mut init = self.starts.clone();
        self.closure(&mut init);
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut sets: Vec<Vec<u32>> = Vec::new();
        ids.insert(init.clone(), 0);
        sets.push(init);
        let mut delta: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            for a in 0..self.k as Sym {
                let mut next: Vec<u32> = Vec::new();
                for &q in &sets[i] {
                    for &(sym, t) in &self.trans[q as usize] {
                        if sym == Some(a) {
                            next.push(t);
                        }
                    }
                }
                self.closure(&mut next);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len() as u32;
                        ids.insert(next.clone(), id);
                        sets.push(next);
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        let accepting = sets
            .iter()
            .map(|s| s.iter().any(|&q| self.accepting[q as usize]))
            .collect();
        Dfa::from_parts(alphabet, delta, 0, accepting)
    }
}

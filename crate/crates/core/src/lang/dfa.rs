use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::{Alphabet, LangError, Nfa, Regex, Sym};

/// Complete deterministic finite automaton.
///
/// The transition table is total; rejecting words fall into an explicit
/// sink. [`Dfa::minimize`] returns the canonical minimal automaton, so two
/// minimized automata for the same language compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet: Arc<Alphabet>,
    delta: Vec<u32>,
    start: u32,
    accepting: Vec<bool>,
}

impl Dfa {
    pub(crate) fn from_parts(
        alphabet: Arc<Alphabet>,
        delta: Vec<u32>,
        start: u32,
        accepting: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(delta.len(), accepting.len() * alphabet.len());
        Dfa {
            alphabet,
            delta,
            start,
            accepting,
        }
    }

    /// Builds an automaton from a transition function given per state.
    pub fn from_table(
        alphabet: Arc<Alphabet>,
        table: Vec<Vec<u32>>,
        start: u32,
        accepting: Vec<bool>,
    ) -> Self {
        let k = alphabet.len();
        let n = table.len() as u32;
        let mut delta = Vec::with_capacity(table.len() * k);
        for row in table {
            assert_eq!(row.len(), k, "row length must equal alphabet size");
            assert!(row.iter().all(|&t| t < n), "transition target out of range");
            delta.extend(row);
        }
        Dfa::from_parts(alphabet, delta, start, accepting)
    }

    /// The empty language.
    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        let k = alphabet.len();
        Dfa::from_parts(alphabet, vec![0; k], 0, vec![false])
    }

    /// All words over the alphabet.
    pub fn universal(alphabet: Arc<Alphabet>) -> Self {
        let k = alphabet.len();
        Dfa::from_parts(alphabet, vec![0; k], 0, vec![true])
    }

    /// The language `{λ}`.
    pub fn epsilon(alphabet: Arc<Alphabet>) -> Self {
        Dfa::word(alphabet, &[])
    }

    /// The singleton language `{w}`.
    pub fn word(alphabet: Arc<Alphabet>, w: &[Sym]) -> Self {
        let k = alphabet.len();
        let n = w.len() + 2;
        let sink = (n - 1) as u32;
        let mut delta = vec![sink; n * k];
        for (i, &s) in w.iter().enumerate() {
            delta[i * k + s as usize] = (i + 1) as u32;
        }
        let mut accepting = vec![false; n];
        accepting[w.len()] = true;
        Dfa::from_parts(alphabet, delta, 0, accepting)
    }

    /// Words of length at most `cap`.
    pub fn length_at_most(alphabet: Arc<Alphabet>, cap: usize) -> Self {
        let k = alphabet.len();
        let n = cap + 2;
        let mut delta = Vec::with_capacity(n * k);
        for i in 0..n {
            let t = if i <= cap { i + 1 } else { n - 1 };
            delta.extend(std::iter::repeat_n(t.min(n - 1) as u32, k));
        }
        let accepting = (0..n).map(|i| i <= cap).collect();
        Dfa::from_parts(alphabet, delta, 0, accepting)
    }

    /// Minimal automaton for a regular expression.
    pub fn compile(r: &Regex, alphabet: Arc<Alphabet>) -> Self {
        let k = alphabet.len();
        Nfa::from_regex(r, k).determinize(alphabet).minimize()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn next(&self, q: u32, s: Sym) -> u32 {
        self.delta[q as usize * self.alphabet.len() + s as usize]
    }

    /// State reached from `q` after reading `w`.
    pub fn run_from(&self, q: u32, w: &[Sym]) -> u32 {
        w.iter().fold(q, |q, &s| self.next(q, s))
    }

    pub fn run(&self, w: &[Sym]) -> u32 {
        self.run_from(self.start, w)
    }

    pub fn is_accepting(&self, q: u32) -> bool {
        self.accepting[q as usize]
    }

    pub fn accepts(&self, w: &[Sym]) -> bool {
        self.is_accepting(self.run(w))
    }

    /// Copy with a different start state.
    pub fn with_start(&self, q: u32) -> Self {
        let mut d = self.clone();
        d.start = q;
        d
    }

    /// Copy with accepting set `acc`.
    pub fn with_accepting(&self, acc: Vec<bool>) -> Self {
        assert_eq!(acc.len(), self.num_states());
        let mut d = self.clone();
        d.accepting = acc;
        d
    }

    fn check_alphabet(&self, other: &Dfa) -> Result<(), LangError> {
        if Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(LangError::AlphabetMismatch)
        }
    }

    /// States reachable from `from`, in breadth-first order.
    pub fn reachable_from(&self, from: u32) -> Vec<u32> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![from];
        seen[from as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for s in self.alphabet.symbols() {
                let t = self.next(q, s);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    order.push(t);
                }
            }
            i += 1;
        }
        order
    }

    /// Canonical minimal automaton (Moore refinement, breadth-first numbering).
    pub fn minimize(&self) -> Self {
        let classes = self.equivalence(|q| self.accepting[q as usize] as u64);
        self.quotient_by(&classes)
    }

    /// Coarsest congruence refining `initial` on reachable states; returns a
    /// class id per state (`u32::MAX` for unreachable ones).
    pub(crate) fn equivalence(&self, initial: impl Fn(u32) -> u64) -> Vec<u32> {
        let k = self.alphabet.len();
        let reach = self.reachable_from(self.start);
        let mut class = vec![u32::MAX; self.num_states()];
        let mut ids: HashMap<u64, u32> = HashMap::new();
        for &q in &reach {
            let n = ids.len() as u32;
            class[q as usize] = *ids.entry(initial(q)).or_insert(n);
        }
        let mut count = ids.len();
        loop {
            let mut sig_ids: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next = vec![u32::MAX; self.num_states()];
            for &q in &reach {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[q as usize]);
                for s in self.alphabet.symbols() {
                    sig.push(class[self.next(q, s) as usize]);
                }
                let n = sig_ids.len() as u32;
                next[q as usize] = *sig_ids.entry(sig).or_insert(n);
            }
            let new_count = sig_ids.len();
            class = next;
            if new_count == count {
                return class;
            }
            count = new_count;
        }
    }

    /// Collapses states by `class` and renumbers breadth-first from the start.
    pub(crate) fn quotient_by(&self, class: &[u32]) -> Self {
        let k = self.alphabet.len();
        let mut rep: HashMap<u32, u32> = HashMap::new();
        let mut order: Vec<u32> = Vec::new();
        let mut newid: HashMap<u32, u32> = HashMap::new();
        let c0 = class[self.start as usize];
        newid.insert(c0, 0);
        rep.insert(c0, self.start);
        order.push(c0);
        let mut i = 0;
        let mut delta = Vec::new();
        while i < order.len() {
            let q = rep[&order[i]];
            for s in self.alphabet.symbols() {
                let t = self.next(q, s);
                let c = class[t as usize];
                let id = match newid.get(&c) {
                    Some(&id) => id,
                    None => {
                        let id = order.len() as u32;
                        newid.insert(c, id);
                        rep.insert(c, t);
                        order.push(c);
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        let accepting = order.iter().map(|c| self.accepting[rep[c] as usize]).collect();
        debug_assert_eq!(delta.len(), order.len() * k);
        Dfa::from_parts(self.alphabet.clone(), delta, 0, accepting)
    }

    /// Old-state to new-state map produced by the same numbering as
    /// [`Dfa::quotient_by`].
    pub(crate) fn quotient_map(&self, class: &[u32]) -> Vec<u32> {
        let mut newid: HashMap<u32, u32> = HashMap::new();
        let mut order: Vec<u32> = vec![self.start];
        newid.insert(class[self.start as usize], 0);
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            for s in self.alphabet.symbols() {
                let t = self.next(q, s);
                let c = class[t as usize];
                if let std::collections::hash_map::Entry::Vacant(e) = newid.entry(c) {
                    e.insert(order.len() as u32);
                    order.push(t);
                }
            }
            i += 1;
        }
        class
            .iter()
            .map(|c| if *c == u32::MAX { u32::MAX } else { newid[c] })
            .collect()
    }

    /// Complement (same state set, acceptance flipped).
    pub fn complement(&self) -> Self {
        let mut d = self.clone();
        for a in d.accepting.iter_mut() {
            *a = !*a;
        }
        d
    }

    /// Reachable product automaton with acceptance `f(acc_a, acc_b)`.
    pub fn product(&self, other: &Dfa, f: impl Fn(bool, bool) -> bool) -> Result<Self, LangError> {
        self.check_alphabet(other)?;
        let (pairs, delta) = self.product_pairs(other);
        let accepting = pairs
            .iter()
            .map(|&(a, b)| f(self.is_accepting(a), other.is_accepting(b)))
            .collect();
        Ok(Dfa::from_parts(self.alphabet.clone(), delta, 0, accepting))
    }

    /// Reachable state pairs of the product and its transition table.
    pub(crate) fn product_pairs(&self, other: &Dfa) -> (Vec<(u32, u32)>, Vec<u32>) {
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(self.start, other.start)];
        ids.insert(pairs[0], 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (a, b) = pairs[i];
            for s in self.alphabet.symbols() {
                let p = (self.next(a, s), other.next(b, s));
                let id = match ids.get(&p) {
                    Some(&id) => id,
                    None => {
                        let id = pairs.len() as u32;
                        ids.insert(p, id);
                        pairs.push(p);
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        (pairs, delta)
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Self, LangError> {
        self.product(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Dfa) -> Result<Self, LangError> {
        self.product(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Dfa) -> Result<Self, LangError> {
        self.product(other, |a, b| a && !b)
    }

    /// A shortest accepted word, if any (ties broken by symbol order).
    pub fn shortest_member(&self) -> Option<Vec<Sym>> {
        let n = self.num_states();
        let mut parent: Vec<Option<(u32, Sym)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[self.start as usize] = true;
        queue.push_back(self.start);
        while let Some(q) = queue.pop_front() {
            if self.is_accepting(q) {
                let mut w = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = parent[cur as usize] {
                    w.push(s);
                    cur = p;
                }
                w.reverse();
                return Some(w);
            }
            for s in self.alphabet.symbols() {
                let t = self.next(q, s);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some((q, s));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_member().is_none()
    }

    /// Whether `λ` is accepted.
    pub fn accepts_epsilon(&self) -> bool {
        self.is_accepting(self.start)
    }

    /// `L(other) ⊆ L(self)`.
    pub fn includes(&self, other: &Dfa) -> Result<bool, LangError> {
        Ok(self.inclusion_witness(other)?.is_none())
    }

    /// A shortest word of `L(other)` missing from `L(self)`.
    pub fn inclusion_witness(&self, other: &Dfa) -> Result<Option<Vec<Sym>>, LangError> {
        Ok(other.difference(self)?.shortest_member())
    }

    pub fn equivalent(&self, other: &Dfa) -> Result<bool, LangError> {
        Ok(self.includes(other)? && other.includes(self)?)
    }

    /// `{x | b·x ∈ L}`: the start state moves along `b`.
    pub fn left_quotient_symbol(&self, b: Sym) -> Self {
        self.with_start(self.next(self.start, b))
    }

    /// `L·{b}`.
    pub fn append_symbol(&self, b: Sym) -> Self {
        self.append_automaton(b).trim()
    }

    /// Untrimmed automaton for `L·{b}` over `2n` states.
    ///
    /// State `q < n` means the last symbol was not `b` and the run is in `q`;
    /// state `n + p` means the last symbol was `b`, read from `p`. A state
    /// `n + p` accepts when `p` accepts.
    pub(crate) fn append_automaton(&self, b: Sym) -> Self {
        let n = self.num_states() as u32;
        let k = self.alphabet.len();
        let mut delta = Vec::with_capacity(2 * n as usize * k);
        for state in 0..2 * n {
            let q = if state < n { state } else { self.next(state - n, b) };
            for s in self.alphabet.symbols() {
                delta.push(if s == b { n + q } else { self.next(q, s) });
            }
        }
        let accepting = (0..2 * n)
            .map(|st| st >= n && self.is_accepting(st - n))
            .collect();
        Dfa::from_parts(self.alphabet.clone(), delta, self.start, accepting)
    }

    /// Keeps only states reachable from the start.
    pub fn trim(&self) -> Self {
        let reach = self.reachable_from(self.start);
        let mut class = vec![u32::MAX; self.num_states()];
        for (i, &q) in reach.iter().enumerate() {
            class[q as usize] = i as u32;
        }
        self.quotient_by(&class)
    }

    /// States reachable from the start under some word of `L(x)`.
    pub fn states_after_language(&self, x: &Dfa) -> Result<Vec<u32>, LangError> {
        self.check_alphabet(x)?;
        let mut seen: HashMap<(u32, u32), ()> = HashMap::new();
        let mut stack = vec![(self.start, x.start)];
        seen.insert((self.start, x.start), ());
        let mut out = vec![false; self.num_states()];
        while let Some((q, p)) = stack.pop() {
            if x.is_accepting(p) {
                out[q as usize] = true;
            }
            for s in self.alphabet.symbols() {
                let nxt = (self.next(q, s), x.next(p, s));
                if seen.insert(nxt, ()).is_none() {
                    stack.push(nxt);
                }
            }
        }
        Ok((0..self.num_states() as u32).filter(|&q| out[q as usize]).collect())
    }

    /// `{y | ∃x ∈ L(x): x·y ∈ L(self)}`.
    pub fn left_quotient_language(&self, x: &Dfa) -> Result<Self, LangError> {
        let starts = self.states_after_language(x)?;
        Ok(self.with_start_set(&starts))
    }

    /// Union of the right languages of `starts` (subset construction).
    pub fn with_start_set(&self, starts: &[u32]) -> Self {
        let mut n = Nfa::new(self.alphabet.len());
        for q in 0..self.num_states() as u32 {
            n.add_state(self.is_accepting(q));
        }
        for q in 0..self.num_states() as u32 {
            for s in self.alphabet.symbols() {
                n.add_edge(q, Some(s), self.next(q, s));
            }
        }
        for &q in starts {
            n.add_start(q);
        }
        n.determinize(self.alphabet.clone())
    }

    /// Concatenation `L(self)·L(other)`.
    pub fn concat(&self, other: &Dfa) -> Result<Self, LangError> {
        self.check_alphabet(other)?;
        let mut n = Nfa::new(self.alphabet.len());
        let off = self.num_states() as u32;
        for _ in 0..self.num_states() {
            n.add_state(false);
        }
        for q in 0..other.num_states() as u32 {
            n.add_state(other.is_accepting(q));
        }
        for q in 0..self.num_states() as u32 {
            for s in self.alphabet.symbols() {
                n.add_edge(q, Some(s), self.next(q, s));
            }
            if self.is_accepting(q) {
                n.add_edge(q, None, off + other.start);
            }
        }
        for q in 0..other.num_states() as u32 {
            for s in self.alphabet.symbols() {
                n.add_edge(off + q, Some(s), off + other.next(q, s));
            }
        }
        n.add_start(self.start);
        Ok(n.determinize(self.alphabet.clone()))
    }

    /// Regular expression for the language (state elimination).
    pub fn to_regex(&self) -> Regex {
        let d = self.minimize();
        let n = d.num_states();
        // Drop the states from which nothing is accepted.
        let live = d.live_states();
        if !live[d.start as usize] {
            return Regex::Empty;
        }
        // Generalized automaton: nodes 0..n plus init n and final n+1.
        let init = n;
        let fin = n + 1;
        let mut edge: Vec<Vec<Regex>> = vec![vec![Regex::Empty; n + 2]; n + 2];
        for q in 0..n {
            if !live[q] {
                continue;
            }
            for s in d.alphabet.symbols() {
                let t = d.next(q as u32, s) as usize;
                if live[t] {
                    let cur = std::mem::replace(&mut edge[q][t], Regex::Empty);
                    edge[q][t] = Regex::union_simpl(cur, Regex::Sym(s));
                }
            }
            if d.accepting[q] {
                edge[q][fin] = Regex::Eps;
            }
        }
        edge[init][d.start as usize] = Regex::Eps;
        for q in 0..n {
            if !live[q] {
                continue;
            }
            let lp = Regex::star_simpl(edge[q][q].clone());
            let ins: Vec<usize> = (0..n + 2)
                .filter(|&p| p != q && edge[p][q] != Regex::Empty)
                .collect();
            let outs: Vec<usize> = (0..n + 2)
                .filter(|&t| t != q && edge[q][t] != Regex::Empty)
                .collect();
            for &p in &ins {
                for &t in &outs {
                    let via = Regex::concat_simpl(
                        Regex::concat_simpl(edge[p][q].clone(), lp.clone()),
                        edge[q][t].clone(),
                    );
                    let cur = std::mem::replace(&mut edge[p][t], Regex::Empty);
                    edge[p][t] = Regex::union_simpl(cur, via);
                }
            }
            for p in 0..n + 2 {
                edge[p][q] = Regex::Empty;
                edge[q][p] = Regex::Empty;
            }
        }
        edge[init][fin].clone()
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for q in 0..n as u32 {
            for s in self.alphabet.symbols() {
                rev[self.next(q, s) as usize].push(q);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<u32> = (0..n as u32).filter(|&q| live[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !live[p as usize] {
                    live[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        live
    }

    /// All accepted words of length at most `max_len`, shortlex ordered.
    pub fn members_up_to(&self, max_len: usize) -> Vec<Vec<Sym>> {
        let mut out = Vec::new();
        let mut layer: Vec<(Vec<Sym>, u32)> = vec![(Vec::new(), self.start)];
        for len in 0..=max_len {
            for (w, q) in &layer {
                if self.is_accepting(*q) {
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, q) in &layer {
                for s in self.alphabet.symbols() {
                    let mut w2 = w.clone();
                    w2.push(s);
                    next.push((w2, self.next(*q, s)));
                }
            }
            layer = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_regex;
    use super::*;

    fn al(names: &[&str]) -> Arc<Alphabet> {
        Arc::new(Alphabet::new(names.iter().copied()).unwrap())
    }

    fn re(text: &str, a: &Arc<Alphabet>) -> Dfa {
        Dfa::compile(&parse_regex(text, a).unwrap(), a.clone())
    }

    #[test]
    fn compile_sizes() {
        let a = al(&["d", "b"]);
        let e = re("empty", &a);
        assert_eq!(e.num_states(), 1);
        assert!(e.is_empty());
        let ds = re("(d)*", &a);
        assert_eq!(ds.num_states(), 2);
        assert!(ds.accepts(&[]) && ds.accepts(&[0, 0]) && !ds.accepts(&[1]));
        let ed = al(&["ED", "EV"]);
        let x = re("ED*", &ed);
        assert!(x.accepts(&[]) && x.accepts(&[0]) && x.accepts(&[0, 0]));
    }

    #[test]
    fn inclusion() {
        let a = al(&["d", "b"]);
        let univ = Dfa::universal(a.clone());
        assert!(univ.includes(&re("d . b*", &a)).unwrap());
        let ds = re("d*", &a);
        let dsb = re("d* . b", &a);
        assert_eq!(ds.inclusion_witness(&dsb).unwrap(), Some(vec![1]));
        let other = al(&["x"]);
        assert_eq!(
            ds.includes(&Dfa::universal(other)),
            Err(LangError::AlphabetMismatch)
        );
    }

    #[test]
    fn quotients_and_append() {
        let a = al(&["D", "R", "A"]);
        let one = re("D | R | A", &a);
        assert!(one.left_quotient_symbol(0).equivalent(&Dfa::epsilon(a.clone())).unwrap());
        let b2 = al(&["d", "b"]);
        assert!(re("d*", &b2).left_quotient_symbol(1).is_empty());
        assert!(Dfa::epsilon(b2.clone())
            .append_symbol(1)
            .equivalent(&re("b", &b2))
            .unwrap());
        let ev = al(&["EV"]);
        assert!(re("EV*", &ev)
            .append_symbol(0)
            .equivalent(&re("EV . EV*", &ev))
            .unwrap());
        let db = re("d* . b*", &b2);
        assert!(db
            .left_quotient_language(&re("d*", &b2))
            .unwrap()
            .equivalent(&db)
            .unwrap());
        let ed = al(&["ED"]);
        let q = re("ED . ED", &ed).left_quotient_language(&re("ED*", &ed)).unwrap();
        assert!(q.equivalent(&re("ED . ED | ED | eps", &ed)).unwrap());
        assert!(db
            .left_quotient_language(&Dfa::epsilon(b2.clone()))
            .unwrap()
            .equivalent(&db)
            .unwrap());
    }

    #[test]
    fn minimize_is_canonical() {
        let a = al(&["a", "b"]);
        let x = re("(a | b)* . a . (a | b)", &a);
        let y = re("(a | b)* . a . a | (a | b)* . a . b", &a);
        assert_eq!(x.minimize(), y.minimize());
    }

    #[test]
    fn to_regex_round_trip() {
        let a = al(&["a", "b"]);
        for text in ["empty", "eps", "a* . b", "(a . b)* | b . b*", "(a | b)* . a . (a | b)"] {
            let d = re(text, &a);
            let back = Dfa::compile(&d.to_regex(), a.clone());
            assert!(back.equivalent(&d).unwrap(), "{text}");
        }
    }

    #[test]
    fn length_caps() {
        let a = al(&["a", "b"]);
        let d = Dfa::length_at_most(a, 1);
        assert!(d.accepts(&[]) && d.accepts(&[1]) && !d.accepts(&[0, 0]));
    }
}

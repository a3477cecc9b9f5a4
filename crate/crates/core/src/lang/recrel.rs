//! Recognizable relations over several channel alphabets.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{parse_relation, Alphabet, Dfa, LangError, Regex, Sym};

/// Default bound on the number of acceptance vectors a relation may hold.
pub const DEFAULT_VECTOR_CAP: usize = 1_000_000;

/// Per-channel length bound; `None` is unbounded.
pub type LengthCap = Option<usize>;

/// A recognizable relation: one automaton per channel plus the set of
/// accepting state vectors.
///
/// A content vector `(x_1, ..., x_k)` is a member iff the vector of states
/// reached by running `x_i` on channel automaton `i` lies in the acceptance
/// set. The acceptance flags of the channel automata themselves are unused
/// and kept false. Every operation returns a normalized relation: channel
/// automata are trimmed and minimal for the relation, numbered canonically,
/// so equal relations have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RecRel {
    channels: Vec<Dfa>,
    accept: BTreeSet<Vec<u32>>,
}

struct Paired {
    channels: Vec<Dfa>,
    pairs: Vec<Vec<(u32, u32)>>,
}

impl Paired {
    fn new(a: &RecRel, b: &RecRel) -> Result<Self, LangError> {
        a.check_compatible(b)?;
        let mut channels = Vec::new();
        let mut pairs = Vec::new();
        for (da, db) in a.channels.iter().zip(&b.channels) {
            let (p, delta) = da.product_pairs(db);
            let n = p.len();
            channels.push(Dfa::from_parts(da.alphabet().clone(), delta, 0, vec![false; n]));
            pairs.push(p);
        }
        Ok(Paired { channels, pairs })
    }

    /// Product states of channel `i` whose left (or right) component is `q`.
    fn fibers(&self, left: bool) -> Vec<HashMap<u32, Vec<u32>>> {
        self.pairs
            .iter()
            .map(|ps| {
                let mut m: HashMap<u32, Vec<u32>> = HashMap::new();
                for (j, &(a, b)) in ps.iter().enumerate() {
                    m.entry(if left { a } else { b }).or_default().push(j as u32);
                }
                m
            })
            .collect()
    }

    fn project(&self, v: &[u32], left: bool) -> Vec<u32> {
        v.iter()
            .enumerate()
            .map(|(i, &j)| {
                let (a, b) = self.pairs[i][j as usize];
                if left {
                    a
                } else {
                    b
                }
            })
            .collect()
    }

    /// Calls `f` on every product vector whose chosen-side projection is `v`.
    fn expand(
        &self,
        fibers: &[HashMap<u32, Vec<u32>>],
        v: &[u32],
        budget: &mut usize,
        mut f: impl FnMut(Vec<u32>),
    ) -> Result<(), LangError> {
        let lists: Vec<&[u32]> = v
            .iter()
            .enumerate()
            .map(|(i, q)| fibers[i].get(q).map(|l| l.as_slice()).unwrap_or(&[]))
            .collect();
        for_each_combination(&lists, budget, &mut f)
    }
}

fn for_each_combination(
    lists: &[&[u32]],
    budget: &mut usize,
    f: &mut impl FnMut(Vec<u32>),
) -> Result<(), LangError> {
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        if *budget == 0 {
            return Err(LangError::TooLarge {
                cap: DEFAULT_VECTOR_CAP,
            });
        }
        *budget -= 1;
        f(idx.iter().enumerate().map(|(i, &j)| lists[i][j]).collect());
        let mut i = lists.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

impl RecRel {
    fn from_raw(channels: Vec<Dfa>, accept: BTreeSet<Vec<u32>>) -> Self {
        let mut r = RecRel { channels, accept };
        r.normalize();
        r
    }

    /// The relation containing every content vector.
    pub fn full(alphabets: &[Arc<Alphabet>]) -> Self {
        let chans: Vec<Dfa> = alphabets
            .iter()
            .map(|a| Dfa::empty(a.clone()))
            .collect();
        let mut accept = BTreeSet::new();
        accept.insert(vec![0; alphabets.len()]);
        RecRel::from_raw(chans, accept)
    }

    /// The empty relation.
    pub fn empty(alphabets: &[Arc<Alphabet>]) -> Self {
        let chans: Vec<Dfa> = alphabets
            .iter()
            .map(|a| Dfa::empty(a.clone()))
            .collect();
        RecRel::from_raw(chans, BTreeSet::new())
    }

    /// The relation `{(λ, ..., λ)}`.
    pub fn epsilon(alphabets: &[Arc<Alphabet>]) -> Self {
        RecRel::from_vector(alphabets, &vec![Vec::new(); alphabets.len()])
    }

    /// The singleton relation `{c}`.
    pub fn from_vector(alphabets: &[Arc<Alphabet>], c: &[Vec<Sym>]) -> Self {
        RecRel::from_product(
            alphabets
                .iter()
                .zip(c)
                .map(|(a, w)| Dfa::word(a.clone(), w))
                .collect(),
        )
    }

    /// The product `L(d_1) × ... × L(d_k)`.
    pub fn from_product(dfas: Vec<Dfa>) -> Self {
        let dfas: Vec<Dfa> = dfas.iter().map(|d| d.minimize()).collect();
        let finals: Vec<Vec<u32>> = dfas
            .iter()
            .map(|d| (0..d.num_states() as u32).filter(|&q| d.is_accepting(q)).collect())
            .collect();
        let lists: Vec<&[u32]> = finals.iter().map(|v| v.as_slice()).collect();
        let mut accept = BTreeSet::new();
        let mut budget = DEFAULT_VECTOR_CAP;
        for_each_combination(&lists, &mut budget, &mut |v| {
            accept.insert(v);
        })
        .expect("product of minimal automata stays within the vector cap");
        let chans = dfas
            .into_iter()
            .map(|d| {
                let n = d.num_states();
                d.with_accepting(vec![false; n])
            })
            .collect();
        RecRel::from_raw(chans, accept)
    }

    /// Finite union of products (Mezei form).
    pub fn from_products(alphabets: &[Arc<Alphabet>], terms: &[Vec<Dfa>]) -> Result<Self, LangError> {
        let mut acc = RecRel::empty(alphabets);
        for t in terms {
            if t.len() != alphabets.len() {
                return Err(LangError::ChannelMismatch(format!(
                    "term has {} components, expected {}",
                    t.len(),
                    alphabets.len()
                )));
            }
            acc = acc.union(&RecRel::from_product(t.clone()))?;
        }
        Ok(acc)
    }

    /// Union of products given as regular expressions.
    pub fn from_regex_terms(alphabets: &[Arc<Alphabet>], terms: &[Vec<Regex>]) -> Result<Self, LangError> {
        let dfas: Vec<Vec<Dfa>> = terms
            .iter()
            .map(|t| {
                t.iter()
                    .zip(alphabets)
                    .map(|(r, a)| Dfa::compile(r, a.clone()))
                    .collect()
            })
            .collect();
        RecRel::from_products(alphabets, &dfas)
    }

    /// Parses `(R1, ..., Rk) + (...)` over the given channel alphabets.
    pub fn parse(text: &str, alphabets: &[Arc<Alphabet>]) -> Result<Self, LangError> {
        let refs: Vec<&Alphabet> = alphabets.iter().map(|a| a.as_ref()).collect();
        let terms = parse_relation(text, &refs)?;
        RecRel::from_regex_terms(alphabets, &terms)
    }

    pub fn arity(&self) -> usize {
        self.channels.len()
    }

    pub fn alphabets(&self) -> Vec<Arc<Alphabet>> {
        self.channels.iter().map(|d| d.alphabet().clone()).collect()
    }

    /// Channel automaton `i` (its own acceptance flags are unused).
    pub fn channel(&self, i: usize) -> &Dfa {
        &self.channels[i]
    }

    pub fn acceptance(&self) -> &BTreeSet<Vec<u32>> {
        &self.accept
    }

    fn check_compatible(&self, other: &RecRel) -> Result<(), LangError> {
        if self.arity() != other.arity() {
            return Err(LangError::ChannelMismatch(format!(
                "{} channels vs {}",
                self.arity(),
                other.arity()
            )));
        }
        for (i, (a, b)) in self.channels.iter().zip(&other.channels).enumerate() {
            if a.alphabet() != b.alphabet() {
                return Err(LangError::ChannelMismatch(format!(
                    "alphabets of channel {i} differ"
                )));
            }
        }
        Ok(())
    }

    /// Membership of a content vector.
    pub fn member(&self, c: &[Vec<Sym>]) -> Result<bool, LangError> {
        if c.len() != self.arity() {
            return Err(LangError::ChannelMismatch(format!(
                "vector has {} components, relation has {}",
                c.len(),
                self.arity()
            )));
        }
        let v: Vec<u32> = self.channels.iter().zip(c).map(|(d, w)| d.run(w)).collect();
        Ok(self.accept.contains(&v))
    }

    pub fn is_empty(&self) -> bool {
        self.accept.is_empty()
    }

    /// Whether the all-empty vector is a member.
    pub fn contains_empty_vector(&self) -> bool {
        let v: Vec<u32> = self.channels.iter().map(|d| d.start()).collect();
        self.accept.contains(&v)
    }

    /// A member with shortest components for the first acceptance vector.
    pub fn witness(&self) -> Option<Vec<Vec<Sym>>> {
        let v = self.accept.iter().next()?;
        Some(
            self.channels
                .iter()
                .zip(v)
                .map(|(d, &q)| {
                    d.with_accepting((0..d.num_states() as u32).map(|p| p == q).collect())
                        .shortest_member()
                        .expect("channel automata are trimmed")
                })
                .collect(),
        )
    }

    pub fn union(&self, other: &RecRel) -> Result<Self, LangError> {
        let p = Paired::new(self, other)?;
        let (fl, fr) = (p.fibers(true), p.fibers(false));
        let mut accept = BTreeSet::new();
        let mut budget = DEFAULT_VECTOR_CAP;
        for v in &self.accept {
            p.expand(&fl, v, &mut budget, |w| {
                accept.insert(w);
            })?;
        }
        for v in &other.accept {
            p.expand(&fr, v, &mut budget, |w| {
                accept.insert(w);
            })?;
        }
        Ok(RecRel::from_raw(p.channels, accept))
    }

    fn filtered(&self, other: &RecRel, keep_if_in_other: bool) -> Result<Self, LangError> {
        let p = Paired::new(self, other)?;
        let fl = p.fibers(true);
        let mut accept = BTreeSet::new();
        let mut budget = DEFAULT_VECTOR_CAP;
        for v in &self.accept {
            p.expand(&fl, v, &mut budget, |w| {
                if other.accept.contains(&p.project(&w, false)) == keep_if_in_other {
                    accept.insert(w);
                }
            })?;
        }
        Ok(RecRel::from_raw(p.channels, accept))
    }

    pub fn intersect(&self, other: &RecRel) -> Result<Self, LangError> {
        self.filtered(other, true)
    }

    pub fn difference(&self, other: &RecRel) -> Result<Self, LangError> {
        self.filtered(other, false)
    }

    pub fn complement(&self) -> Result<Self, LangError> {
        let all: Vec<Vec<u32>> = self
            .channels
            .iter()
            .map(|d| (0..d.num_states() as u32).collect())
            .collect();
        let lists: Vec<&[u32]> = all.iter().map(|v| v.as_slice()).collect();
        let mut accept = BTreeSet::new();
        let mut budget = DEFAULT_VECTOR_CAP;
        for_each_combination(&lists, &mut budget, &mut |v| {
            if !self.accept.contains(&v) {
                accept.insert(v);
            }
        })?;
        Ok(RecRel::from_raw(self.channels.clone(), accept))
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &RecRel) -> Result<bool, LangError> {
        Ok(self.inclusion_witness(other)?.is_none())
    }

    /// A member of `other` that is not a member of `self`.
    pub fn inclusion_witness(&self, other: &RecRel) -> Result<Option<Vec<Vec<Sym>>>, LangError> {
        let p = Paired::new(other, self)?;
        let fl = p.fibers(true);
        let mut budget = DEFAULT_VECTOR_CAP;
        let mut bad: Option<Vec<u32>> = None;
        for v in &other.accept {
            p.expand(&fl, v, &mut budget, |w| {
                if bad.is_none() && !self.accept.contains(&p.project(&w, false)) {
                    bad = Some(w);
                }
            })?;
            if bad.is_some() {
                break;
            }
        }
        Ok(bad.map(|w| {
            p.channels
                .iter()
                .zip(&w)
                .map(|(d, &q)| {
                    d.with_accepting((0..d.num_states() as u32).map(|x| x == q).collect())
                        .shortest_member()
                        .expect("product channels are reachable")
                })
                .collect()
        }))
    }

    pub fn equivalent(&self, other: &RecRel) -> Result<bool, LangError> {
        Ok(self.includes(other)? && other.includes(self)?)
    }

    fn check_channel(&self, ch: usize) -> Result<(), LangError> {
        if ch >= self.arity() {
            return Err(LangError::ChannelMismatch(format!(
                "channel index {ch} out of range"
            )));
        }
        Ok(())
    }

    /// `{C' | ∃C ∈ self: x_ch = b·x'_ch, other components equal}`.
    pub fn quotient_channel(&self, ch: usize, b: Sym) -> Result<Self, LangError> {
        self.check_channel(ch)?;
        let mut chans = self.channels.clone();
        chans[ch] = chans[ch].left_quotient_symbol(b);
        Ok(RecRel::from_raw(chans, self.accept.clone()))
    }

    /// `{C' | ∃C ∈ self: x'_ch = x_ch·b, other components equal}`.
    pub fn append_channel(&self, ch: usize, b: Sym) -> Result<Self, LangError> {
        self.check_channel(ch)?;
        let n = self.channels[ch].num_states() as u32;
        let mut chans = self.channels.clone();
        let d = chans[ch].append_automaton(b);
        let m = d.num_states();
        chans[ch] = d.with_accepting(vec![false; m]);
        let accept = self
            .accept
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w[ch] = n + v[ch];
                w
            })
            .collect();
        Ok(RecRel::from_raw(chans, accept))
    }

    /// Left quotient of channel `ch` by the language `L(x)`:
    /// `{C' | ∃C ∈ self, u ∈ L(x): x_ch = u·x'_ch, other components equal}`.
    pub fn quotient_channel_language(&self, ch: usize, x: &Dfa) -> Result<Self, LangError> {
        self.check_channel(ch)?;
        let starts = self.channels[ch].states_after_language(x)?;
        Ok(self.with_start_set(ch, &starts))
    }

    /// Union over `s ∈ starts` of the relation with channel `ch` started at `s`.
    fn with_start_set(&self, ch: usize, starts: &[u32]) -> Self {
        let d = &self.channels[ch];
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut init: Vec<u32> = starts.to_vec();
        init.sort_unstable();
        init.dedup();
        let mut sets = vec![init.clone()];
        ids.insert(init, 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            for s in d.alphabet().symbols() {
                let mut next: Vec<u32> = sets[i].iter().map(|&q| d.next(q, s)).collect();
                next.sort_unstable();
                next.dedup();
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
        let mut by_state: HashMap<u32, Vec<&Vec<u32>>> = HashMap::new();
        for v in &self.accept {
            by_state.entry(v[ch]).or_default().push(v);
        }
        let mut accept = BTreeSet::new();
        for (j, set) in sets.iter().enumerate() {
            for q in set {
                for v in by_state.get(q).into_iter().flatten() {
                    let mut w = (*v).clone();
                    w[ch] = j as u32;
                    accept.insert(w);
                }
            }
        }
        let mut chans = self.channels.clone();
        let n = sets.len();
        chans[ch] = Dfa::from_parts(d.alphabet().clone(), delta, 0, vec![false; n]);
        RecRel::from_raw(chans, accept)
    }

    /// Intersection with the union over `clauses` of products of
    /// length-capped languages.
    pub fn restrict_lengths(&self, clauses: &[Vec<LengthCap>]) -> Result<Self, LangError> {
        let alphabets = self.alphabets();
        let mut restr = RecRel::empty(&alphabets);
        for c in clauses {
            if c.len() != self.arity() {
                return Err(LangError::ChannelMismatch(format!(
                    "clause has {} caps, relation has {} channels",
                    c.len(),
                    self.arity()
                )));
            }
            let dfas = alphabets
                .iter()
                .zip(c)
                .map(|(a, cap)| match cap {
                    Some(n) => Dfa::length_at_most(a.clone(), *n),
                    None => Dfa::universal(a.clone()),
                })
                .collect();
            restr = restr.union(&RecRel::from_product(dfas))?;
        }
        self.intersect(&restr)
    }

    /// `{(x, y) | ∃z: z·x ∈ L(r), (z, y) ∈ l}` for a binary relation `l`.
    pub fn minus_quotient(l: &RecRel, r: &Dfa) -> Result<Self, LangError> {
        if l.arity() != 2 {
            return Err(LangError::ChannelMismatch(format!(
                "expected a binary relation, got arity {}",
                l.arity()
            )));
        }
        if r.alphabet() != l.channels[0].alphabet() {
            return Err(LangError::ChannelMismatch(
                "automaton alphabet differs from the first channel".into(),
            ));
        }
        let r = r.minimize();
        let alphabets = l.alphabets();
        let c1 = &l.channels[1];
        let mut out = RecRel::empty(&alphabets);
        for p in 0..r.num_states() as u32 {
            // Words leading from the start of r to p.
            let to_p = r.with_accepting((0..r.num_states() as u32).map(|q| q == p).collect());
            let zs = l.channels[0].states_after_language(&to_p)?;
            let mut ys = vec![false; c1.num_states()];
            for v in &l.accept {
                if zs.contains(&v[0]) {
                    ys[v[1] as usize] = true;
                }
            }
            let from_p = r.with_start(p);
            if from_p.is_empty() || !ys.iter().any(|&b| b) {
                continue;
            }
            let term = RecRel::from_product(vec![from_p, c1.with_accepting(ys)]);
            out = out.union(&term)?;
        }
        Ok(out)
    }

    /// Mezei form: one product term per acceptance vector.
    pub fn to_products(&self) -> Vec<Vec<Dfa>> {
        self.accept
            .iter()
            .map(|v| {
                self.channels
                    .iter()
                    .zip(v)
                    .map(|(d, &q)| {
                        d.with_accepting((0..d.num_states() as u32).map(|x| x == q).collect())
                            .minimize()
                    })
                    .collect()
            })
            .collect()
    }

    /// Text form `(R1, ..., Rk) + ...`, parseable by [`RecRel::parse`].
    pub fn to_expression(&self) -> String {
        let terms = self.to_products();
        if terms.is_empty() {
            return "empty".to_string();
        }
        terms
            .iter()
            .map(|t| {
                let comps: Vec<String> = t
                    .iter()
                    .map(|d| d.to_regex().display(d.alphabet()).to_string())
                    .collect();
                format!("({})", comps.join(", "))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Every member with all components of length at most `max_len`.
    pub fn members_up_to(&self, max_len: usize) -> Vec<Vec<Vec<Sym>>> {
        let words: Vec<Vec<(Vec<Sym>, u32)>> = self
            .channels
            .iter()
            .map(|d| {
                let all = Dfa::universal(d.alphabet().clone()).members_up_to(max_len);
                all.into_iter().map(|w| {
                    let q = d.run(&w);
                    (w, q)
                })
                .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; words.len()];
        if words.iter().any(|w| w.is_empty()) {
            return out;
        }
        loop {
            let v: Vec<u32> = idx.iter().enumerate().map(|(i, &j)| words[i][j].1).collect();
            if self.accept.contains(&v) {
                out.push(idx.iter().enumerate().map(|(i, &j)| words[i][j].0.clone()).collect());
            }
            let mut i = words.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < words[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    /// Trims every channel and merges channel states that no suffix and no
    /// choice of the other components can distinguish.
    fn normalize(&mut self) {
        loop {
            let before: Vec<usize> = self.channels.iter().map(|d| d.num_states()).collect();
            for ch in 0..self.channels.len() {
                self.normalize_channel(ch);
            }
            let after: Vec<usize> = self.channels.iter().map(|d| d.num_states()).collect();
            if before == after {
                return;
            }
        }
    }

    fn normalize_channel(&mut self, ch: usize) {
        {
            let d = &self.channels[ch];
            let reach = d.reachable_from(d.start());
            let mut reachable = vec![false; d.num_states()];
            for &q in &reach {
                reachable[q as usize] = true;
            }
            self.accept.retain(|v| reachable[v[ch] as usize]);
            let mut sig: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); d.num_states()];
            for v in &self.accept {
                let mut rest = v.clone();
                let q = rest.remove(ch);
                sig[q as usize].insert(rest);
            }
            let mut sig_ids: HashMap<&BTreeSet<Vec<u32>>, u64> = HashMap::new();
            let init: Vec<u64> = sig
                .iter()
                .map(|s| {
                    let n = sig_ids.len() as u64;
                    *sig_ids.entry(s).or_insert(n)
                })
                .collect();
            let class = d.equivalence(|q| init[q as usize]);
            let map = d.quotient_map(&class);
            let nd = d.quotient_by(&class);
            let n = nd.num_states();
            self.channels[ch] = nd.with_accepting(vec![false; n]);
            self.accept = self
                .accept
                .iter()
                .map(|v| {
                    let mut w = v.clone();
                    w[ch] = map[v[ch] as usize];
                    w
                })
                .collect();
        }
    }
}

//! Reference oracles and random generators shared by integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use cfsm::lang::{Alphabet, Dfa, RecRel, Regex, Sym};
use rand::Rng;

pub fn alphabet(names: &[&str]) -> Arc<Alphabet> {
    Arc::new(Alphabet::new(names.iter().copied()).unwrap())
}

/// Positions `j` such that `r` matches `w[i..j]`.
fn ends(r: &Regex, w: &[Sym], i: usize) -> BTreeSet<usize> {
    match r {
        Regex::Empty => BTreeSet::new(),
        Regex::Eps => [i].into_iter().collect(),
        Regex::Sym(s) => {
            if w.get(i) == Some(s) {
                [i + 1].into_iter().collect()
            } else {
                BTreeSet::new()
            }
        }
        Regex::Union(a, b) => {
            let mut out = ends(a, w, i);
            out.extend(ends(b, w, i));
            out
        }
        Regex::Concat(a, b) => ends(a, w, i)
            .into_iter()
            .flat_map(|j| ends(b, w, j))
            .collect(),
        Regex::Star(a) => {
            let mut out: BTreeSet<usize> = [i].into_iter().collect();
            let mut frontier = vec![i];
            while let Some(j) = frontier.pop() {
                for k in ends(a, w, j) {
                    if out.insert(k) {
                        frontier.push(k);
                    }
                }
            }
            out
        }
    }
}

/// Direct recursive regex matcher.
pub fn regex_matches(r: &Regex, w: &[Sym]) -> bool {
    ends(r, w, 0).contains(&w.len())
}

/// Every word over `k` symbols of length at most `n`.
pub fn all_words(k: usize, n: usize) -> Vec<Vec<Sym>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for s in 0..k as Sym {
                let mut v: Vec<Sym> = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Cartesian product of per-channel word lists.
pub fn all_vectors(ks: &[usize], n: usize) -> Vec<Vec<Vec<Sym>>> {
    let mut out: Vec<Vec<Vec<Sym>>> = vec![Vec::new()];
    for &k in ks {
        let words = all_words(k, n);
        out = out
            .into_iter()
            .flat_map(|v| {
                words.iter().map(move |w| {
                    let mut v2 = v.clone();
                    v2.push(w.clone());
                    v2
                })
            })
            .collect();
    }
    out
}

pub fn random_regex(rng: &mut impl Rng, k: usize, depth: u32) -> Regex {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..8) {
            0 => Regex::Empty,
            1 => Regex::Eps,
            _ => Regex::Sym(rng.gen_range(0..k as Sym)),
        };
    }
    match rng.gen_range(0..3) {
        0 => Regex::union(random_regex(rng, k, depth - 1), random_regex(rng, k, depth - 1)),
        1 => Regex::concat(random_regex(rng, k, depth - 1), random_regex(rng, k, depth - 1)),
        _ => Regex::star(random_regex(rng, k, depth - 1)),
    }
}

/// Random union of products, returned with its term list for brute force.
pub fn random_relation(
    rng: &mut impl Rng,
    alphabets: &[Arc<Alphabet>],
    max_terms: usize,
) -> (RecRel, Vec<Vec<Regex>>) {
    let n = rng.gen_range(0..=max_terms);
    let terms: Vec<Vec<Regex>> = (0..n)
        .map(|_| {
            alphabets
                .iter()
                .map(|a| random_regex(rng, a.len(), 3))
                .collect()
        })
        .collect();
    let r = RecRel::from_regex_terms(alphabets, &terms).unwrap();
    (r, terms)
}

pub fn terms_member(terms: &[Vec<Regex>], c: &[Vec<Sym>]) -> bool {
    terms
        .iter()
        .any(|t| t.iter().zip(c).all(|(r, w)| regex_matches(r, w)))
}

pub fn compile(r: &Regex, a: &Arc<Alphabet>) -> Dfa {
    Dfa::compile(r, a.clone())
}

/// What the two-machine simulation of a tag system exposes.
pub struct TagObservation {
    /// Words `w ≠ λ` with `((h0, q), (w, λ))` reachable.
    pub words: BTreeSet<Vec<char>>,
    /// `((h0, q), (λ, λ))` or some `((h0, q_d), (λ, λ))` is reachable.
    pub lambda: bool,
    pub deadlock: bool,
    pub exhausted: bool,
}

/// Explores the simulation of `t` with channel cap `cap`.
pub fn observe_tag(t: &cfsm::gen::TagSystem, cap: usize) -> TagObservation {
    use cfsm::explore::{deadlocks, reach, Budget};
    let p = cfsm::gen::tag_to_protocol(t);
    let sg = reach(&p, &Budget::with_channel_cap(cap), None);
    let sigma: Vec<char> = t.alphabet().into_iter().collect();
    let m0 = &p.machines[0];
    let m1 = &p.machines[1];
    let h0 = m0.state_index("h0").unwrap();
    let q = m1.state_index("q").unwrap();
    let qd: Vec<_> = sigma
        .iter()
        .map(|&c| m1.state_index(&format!("q_{}", cfsm::gen::symbol_stem(c))).unwrap())
        .collect();
    let (alpha, beta) = (p.channel_index("alpha").unwrap(), p.channel_index("beta").unwrap());
    let mut words = BTreeSet::new();
    let mut lambda = false;
    for g in sg.states() {
        let c = g.composite();
        if c[0] != h0 || !g.channel(beta).is_empty() {
            continue;
        }
        let w = g.channel(alpha);
        if c[1] == q {
            if w.is_empty() {
                lambda = true;
            } else {
                words.insert(w.iter().map(|&s| sigma[s as usize]).collect());
            }
        } else if qd.contains(&c[1]) && w.is_empty() {
            lambda = true;
        }
    }
    let d = deadlocks(&sg, &p);
    TagObservation {
        words,
        lambda,
        deadlock: !d.states.is_empty(),
        exhausted: sg.exhausted,
    }
}

/// A channel cap that covers a bounded run: the longest word plus the
/// longest production plus slack.
pub fn tag_cap(run: &cfsm::gen::TagRun, t: &cfsm::gen::TagSystem) -> usize {
    run.words.iter().map(Vec::len).max().unwrap_or(0) + t.max_production() + 2
}

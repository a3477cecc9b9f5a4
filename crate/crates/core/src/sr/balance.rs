use std::collections::{BTreeSet, VecDeque};

use indexmap::IndexMap;

use crate::explore::Verdict;
use crate::lang::Sym;
use crate::model::{ChannelId, Machine, StateId};

/// Unmatched difference between two machines' projections on one channel.
/// `lead` tells which side is ahead; the empty word is always `lead`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Balance {
    lead: bool,
    word: VecDeque<Sym>,
}

impl Balance {
    fn zero() -> Self {
        Balance {
            lead: true,
            word: VecDeque::new(),
        }
    }

    /// Applies a symbol produced by the leader (`by_lead`) or the follower.
    /// `None` means a mismatch; `Some(None)` means the bound was exceeded.
    fn push(&self, s: Sym, by_lead: bool, bound: usize) -> Option<Option<Balance>> {
        let mut b = self.clone();
        if b.word.is_empty() || b.lead == by_lead {
            b.lead = by_lead;
            b.word.push_back(s);
            if b.word.len() > bound {
                return Some(None);
            }
        } else if b.word.front() == Some(&s) {
            b.word.pop_front();
            if b.word.is_empty() {
                b.lead = true;
            }
        } else {
            return None;
        }
        Some(Some(b))
    }
}

type Elem = (StateId, Vec<Balance>);

/// Outcome of checking that every home-to-home projection pair of one
/// machine is also one of the other's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub holds: Verdict,
    /// A leader path label (as `(channel, symbol)` pairs) with no matching
    /// follower path, when refuted.
    pub witness: Option<Vec<(ChannelId, Sym)>>,
    /// Some follower configuration was dropped for exceeding the bound.
    pub overflowed: bool,
}

/// The projected letter of each transition: its channel and symbol.
fn letters(m: &Machine) -> Vec<Vec<(StateId, (ChannelId, Sym))>> {
    let mut out = vec![Vec::new(); m.num_states()];
    for t in &m.transitions {
        out[t.from as usize].push((t.to, (t.action.channel, t.action.sym)));
    }
    out
}

/// Bounded-balance subset construction: follower configurations are paired
/// with signed per-channel balances of length at most `bound`. A refutation
/// is reported only along paths where nothing was dropped for overflow.
pub fn includes(
    leader: &Machine,
    follower: &Machine,
    channels: usize,
    bound: usize,
    max_states: usize,
) -> Inclusion {
    let lead = letters(leader);
    let foll = letters(follower);
    // Canonical interleaving: the follower moves exactly while the leader
    // leads on some channel. Every pair of matching paths has one such
    // interleaving, so only lead-free configurations are kept.
    let leads = |bals: &[Balance]| bals.iter().any(|b| b.lead && !b.word.is_empty());
    let closure = |set: BTreeSet<Elem>, lossy: &mut bool| -> BTreeSet<Elem> {
        let mut out = BTreeSet::new();
        let mut seen = set.clone();
        let mut stack: Vec<Elem> = set.into_iter().collect();
        while let Some((q, bals)) = stack.pop() {
            if !leads(&bals) {
                out.insert((q, bals));
                continue;
            }
            for &(to, (ch, s)) in &foll[q as usize] {
                match bals[ch].push(s, false, bound) {
                    None => {}
                    Some(None) => *lossy = true,
                    Some(Some(b)) => {
                        let mut nb = bals.clone();
                        nb[ch] = b;
                        let e = (to, nb);
                        if seen.insert(e.clone()) {
                            stack.push(e);
                        }
                    }
                }
            }
        }
        out
    };
    let zero = vec![Balance::zero(); channels];
    let home: Elem = (follower.start, zero.clone());
    let mut lossy0 = false;
    let init = closure(BTreeSet::from([home.clone()]), &mut lossy0);
    type Key = (StateId, BTreeSet<Elem>, bool);
    let mut seen: IndexMap<Key, Option<(usize, (ChannelId, Sym))>> = IndexMap::new();
    seen.insert((leader.start, init, lossy0), None);
    let mut overflowed = lossy0;
    let mut undecided = false;
    let mut i = 0;
    while i < seen.len() {
        let (q, set, lossy) = seen.get_index(i).expect("in range").0.clone();
        if q == leader.start && !set.contains(&home) {
            if !lossy {
                let mut w = Vec::new();
                let mut k = i;
                while let Some((pk, letter)) = seen[k] {
                    w.push(letter);
                    k = pk;
                }
                w.reverse();
                return Inclusion {
                    holds: Verdict::No,
                    witness: Some(w),
                    overflowed,
                };
            }
            undecided = true;
        }
        for &(to, (ch, s)) in &lead[q as usize] {
            let mut l = lossy;
            let mut next = BTreeSet::new();
            for (fq, bals) in &set {
                match bals[ch].push(s, true, bound) {
                    None => {}
                    Some(None) => l = true,
                    Some(Some(b)) => {
                        let mut nb = bals.clone();
                        nb[ch] = b;
                        next.insert((*fq, nb));
                    }
                }
            }
            let next = closure(next, &mut l);
            overflowed |= l;
            let key = (to, next, l);
            if !seen.contains_key(&key) {
                if seen.len() >= max_states {
                    undecided = true;
                    continue;
                }
                seen.insert(key, Some((i, (ch, s))));
            }
        }
        i += 1;
    }
    Inclusion {
        holds: if undecided { Verdict::Unknown } else { Verdict::Yes },
        witness: None,
        overflowed,
    }
}

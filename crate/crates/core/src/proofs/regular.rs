use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{
    check_index_sets, first_failure, Certificate, Consistency, DeclaredOn, Extension, ObligationKind,
    ProofError, RegularTable, Space, Violation,
};
use crate::lang::{Dfa, Sym};
use crate::model::{classify, Action, ChannelId, CompositeState, Dir, Protocol};

/// Matched send/receive hops on channels other than `beta`, as adjacency
/// lists over composite-state indices.
fn h_adjacency(p: &Protocol, space: &Space, beta: ChannelId) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); space.len()];
    for (xi, c) in p.channels.iter().enumerate() {
        if xi == beta || c.from == c.to {
            continue;
        }
        let sends: Vec<_> = p.machines[c.from]
            .transitions
            .iter()
            .filter(|t| t.action.dir == Dir::Send && t.action.channel == xi)
            .collect();
        let recvs: Vec<_> = p.machines[c.to]
            .transitions
            .iter()
            .filter(|t| t.action.dir == Dir::Recv && t.action.channel == xi)
            .collect();
        for s in &sends {
            for r in recvs.iter().filter(|r| r.action.sym == s.action.sym) {
                for i in space.fiber(c.from, s.from) {
                    let mut st = space.decode(i);
                    if st[c.to] != r.from {
                        continue;
                    }
                    st[c.from] = s.to;
                    st[c.to] = r.to;
                    adj[i].push(space.encode(&st));
                }
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// Edges `S1 -> S2` where one matched send/receive on a channel other than
/// `beta` moves `S1` to `S2`.
pub fn h_graph(p: &Protocol, beta: ChannelId) -> Vec<(CompositeState, CompositeState)> {
    let space = Space::new(p);
    let adj = h_adjacency(p, &space, beta);
    adj.iter()
        .enumerate()
        .flat_map(|(i, out)| out.iter().map(move |&k| (i, k)))
        .map(|(i, k)| (space.decode(i), space.decode(k)))
        .collect()
}

fn dense(p: &Protocol, t: &RegularTable, space: &Space) -> Result<Vec<Dfa>, ProofError> {
    let alphabet = p.channels[t.channel].alphabet.clone();
    (0..space.len())
        .map(|i| {
            let s = space.decode(i);
            match t.entries.get(&s) {
                Some(d) if *d.alphabet() == alphabet => Ok(d.clone()),
                Some(_) => Err(ProofError::Lang(crate::lang::LangError::AlphabetMismatch)),
                None if t.default_empty => Ok(Dfa::empty(alphabet.clone())),
                None => Err(ProofError::Partial(p.composite_name(&s))),
            }
        })
        .collect()
}

fn single_channel(p: &Protocol, beta: ChannelId, w: Vec<Sym>) -> Vec<Vec<Sym>> {
    let mut v = vec![Vec::new(); p.channels.len()];
    v[beta] = w;
    v
}

enum Obligation {
    Step(usize, usize, Action),
    Hop(usize, usize),
}

/// Checks the three conditions that together make the sets consistent:
/// receptions on `beta` quotient, sends on `beta` append, and hops on the
/// other channels preserve inclusion.
pub fn check_regular_consistency(p: &Protocol, t: &RegularTable) -> Result<Consistency, ProofError> {
    if !classify(p).is_cyclic {
        return Err(ProofError::NotCyclic);
    }
    let space = Space::new(p);
    let q = dense(p, t, &space)?;
    let beta = t.channel;
    let c = &p.channels[beta];
    let mut obligations = Vec::new();
    for (node, dir) in [(c.to, Dir::Recv), (c.from, Dir::Send)] {
        for tr in &p.machines[node].transitions {
            if tr.action.dir != dir || tr.action.channel != beta {
                continue;
            }
            for i in space.fiber(node, tr.from) {
                let k = space.with(&space.decode(i), node, tr.to);
                obligations.push(Obligation::Step(i, k, tr.action));
            }
        }
    }
    for (i, out) in h_adjacency(p, &space, beta).into_iter().enumerate() {
        obligations.extend(out.into_iter().map(|k| Obligation::Hop(i, k)));
    }
    first_failure(&obligations, |ob| {
        let (i, k, action, image) = match ob {
            Obligation::Step(i, k, a) => {
                let img = match a.dir {
                    Dir::Recv => q[*i].left_quotient_symbol(a.sym),
                    Dir::Send => q[*i].append_symbol(a.sym),
                };
                (*i, *k, Some(*a), img)
            }
            Obligation::Hop(i, k) => (*i, *k, None, q[*i].clone()),
        };
        let kind = match action {
            None => ObligationKind::Hop,
            Some(a) if a.dir == Dir::Recv => ObligationKind::Receive,
            Some(_) => ObligationKind::Send,
        };
        Ok(q[k].inclusion_witness(&image)?.map(|w| Violation {
            kind,
            from: space.decode(i),
            to: space.decode(k),
            action,
            witness: single_channel(p, beta, w),
        }))
    })
}

/// Completes a table declared on a product of index sets with the
/// smallest candidates: the entry of an undeclared state collects the
/// suffixes left after some path from a declared state consumes a prefix
/// on `beta` (hops consume nothing). The result is then checked.
pub fn extend_regular(p: &Protocol, t: &RegularTable) -> Result<Extension<RegularTable>, ProofError> {
    if !classify(p).is_cyclic {
        return Err(ProofError::NotCyclic);
    }
    let v = match &t.declared_on {
        DeclaredOn::Full => return full_extension(p, t),
        DeclaredOn::Product(v) => v.clone(),
        DeclaredOn::Feedback(_) => {
            return Err(ProofError::Hypothesis(
                "regular tables are declared on products of index sets".into(),
            ))
        }
    };
    check_index_sets(p, &v)?;
    let space = Space::new(p);
    let beta = t.channel;
    let alphabet = p.channels[beta].alphabet.clone();
    let in_v = |s: &[u32]| s.iter().zip(&v).all(|(q, vj)| vj.contains(q));
    let receiver = p.channels[beta].to;
    // Automaton over composite states: hops are silent, receptions on
    // beta read their symbol.
    let mut moves: Vec<Vec<(Option<Sym>, usize)>> = h_adjacency(p, &space, beta)
        .into_iter()
        .map(|out| out.into_iter().map(|k| (None, k)).collect())
        .collect();
    for tr in &p.machines[receiver].transitions {
        if tr.action.dir == Dir::Recv && tr.action.channel == beta {
            for i in space.fiber(receiver, tr.from) {
                let k = space.with(&space.decode(i), receiver, tr.to);
                moves[i].push((Some(tr.action.sym), k));
            }
        }
    }
    let mut entries: BTreeMap<CompositeState, Dfa> = BTreeMap::new();
    let mut starts: Vec<Vec<(usize, BTreeSet<u32>)>> = vec![Vec::new(); space.len()];
    let sources: Vec<usize> = (0..space.len()).filter(|&i| in_v(&space.decode(i))).collect();
    let mut source_dfas = Vec::new();
    for (n, &src) in sources.iter().enumerate() {
        let s = space.decode(src);
        let d = match t.entries.get(&s) {
            Some(d) => d.clone(),
            None if t.default_empty => Dfa::empty(alphabet.clone()),
            None => return Err(ProofError::Partial(p.composite_name(&s))),
        };
        entries.insert(s, d.clone());
        let mut seen: BTreeSet<(usize, u32)> = BTreeSet::from([(src, d.start())]);
        let mut queue = VecDeque::from([(src, d.start())]);
        while let Some((i, qd)) = queue.pop_front() {
            for &(sym, k) in &moves[i] {
                let next = (k, sym.map_or(qd, |b| d.next(qd, b)));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        let mut per: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for (i, qd) in seen {
            per.entry(i).or_default().insert(qd);
        }
        for (i, set) in per {
            starts[i].push((n, set));
        }
        source_dfas.push(d);
    }
    for i in 0..space.len() {
        let s = space.decode(i);
        if in_v(&s) {
            continue;
        }
        let mut e = Dfa::empty(alphabet.clone());
        for (n, set) in &starts[i] {
            let qs: Vec<u32> = set.iter().copied().collect();
            e = e.union(&source_dfas[*n].with_start_set(&qs))?;
        }
        entries.insert(s, e.minimize());
    }
    let table = RegularTable {
        channel: beta,
        entries,
        declared_on: DeclaredOn::Full,
        default_empty: false,
    };
    let consistency = check_regular_consistency(p, &table)?;
    Ok(Extension { table, consistency })
}

fn full_extension(p: &Protocol, t: &RegularTable) -> Result<Extension<RegularTable>, ProofError> {
    let space = Space::new(p);
    let entries = dense(p, t, &space)?
        .into_iter()
        .enumerate()
        .map(|(i, d)| (space.decode(i), d))
        .collect();
    let table = RegularTable {
        channel: t.channel,
        entries,
        declared_on: DeclaredOn::Full,
        default_empty: false,
    };
    let consistency = check_regular_consistency(p, &table)?;
    Ok(Extension { table, consistency })
}

/// Certifies that `target` is not stable: the table must be consistent and
/// contain λ at the initial state but not at `target`.
pub fn prove_not_stable(p: &Protocol, t: &RegularTable, target: &[u32]) -> Result<Certificate, ProofError> {
    let space = Space::new(p);
    let q = dense(p, t, &space)?;
    if let Consistency::Violated(v) = check_regular_consistency(p, t)? {
        return Err(ProofError::Inconsistent(v.describe(p)));
    }
    let init = p.initial();
    if !q[space.encode(&init)].accepts_epsilon() {
        return Err(ProofError::Malformed(format!(
            "the entry at the initial state {} excludes the empty word",
            p.composite_name(&init)
        )));
    }
    let name = p.composite_name(target);
    if q[space.encode(target)].accepts_epsilon() {
        Ok(Certificate::Inapplicable(format!("the entry at {name} contains the empty word")))
    } else {
        Ok(Certificate::Certified(format!(
            "{name} is not stable: its entry excludes the empty word"
        )))
    }
}

/// Certifies deadlock freedom: no composite state of receive states only
/// is stable.
pub fn prove_deadlock_free(p: &Protocol, t: &RegularTable) -> Result<Certificate, ProofError> {
    let mut names = Vec::new();
    for s in super::all_receive_composites(p) {
        match prove_not_stable(p, t, &s)? {
            Certificate::Certified(_) => names.push(p.composite_name(&s)),
            Certificate::Inapplicable(why) => return Ok(Certificate::Inapplicable(why)),
        }
    }
    Ok(Certificate::Certified(format!(
        "deadlock-free: every all-receive state is not stable ({})",
        if names.is_empty() { "none exist".to_string() } else { names.join(", ") }
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::fixture;

    fn table(p: &Protocol, beta: ChannelId, f: impl Fn(&CompositeState) -> Dfa) -> RegularTable {
        let space = Space::new(p);
        RegularTable {
            channel: beta,
            entries: (0..space.len()).map(|i| space.decode(i)).map(|s| (s.clone(), f(&s))).collect(),
            declared_on: DeclaredOn::Full,
            default_empty: false,
        }
    }

    #[test]
    fn universal_table_is_consistent() {
        let p = fixture("flowctl2").unwrap();
        let a = p.channels[0].alphabet.clone();
        let t = table(&p, 0, |_| Dfa::universal(a.clone()));
        assert!(check_regular_consistency(&p, &t).unwrap().is_consistent());
    }

    #[test]
    fn initial_only_table_fails_at_a_send() {
        let p = fixture("flowctl2").unwrap();
        let a = p.channels[0].alphabet.clone();
        let init = p.initial();
        let t = table(&p, 0, |s| if *s == init { Dfa::epsilon(a.clone()) } else { Dfa::empty(a.clone()) });
        match check_regular_consistency(&p, &t).unwrap() {
            Consistency::Violated(v) => {
                assert_eq!(v.from, init);
                assert_eq!(v.kind, ObligationKind::Send);
                assert_eq!(v.witness[0].len(), 1);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn only_beta_gives_no_hops() {
        let p = fixture("flowctl2").unwrap();
        // Both channels of a pair: the hops on the other channel exist.
        assert!(!h_graph(&p, 0).is_empty());
        let one = crate::model::parse_protocol(
            "protocol one\nnode a\nnode b\nchannel c from a to b\nchannel d from b to a\nalphabet c x\nalphabet d y\n\
             machine a start s\ntrans a s -x@c s\nmachine b start t\ntrans b t +x@c t\n",
        )
        .unwrap();
        assert!(h_graph(&one, 0).is_empty());
    }

    #[test]
    fn non_cyclic_is_rejected() {
        let p = fixture("counter").unwrap();
        let a = p.channels[0].alphabet.clone();
        let t = table(&p, 0, |_| Dfa::universal(a.clone()));
        assert_eq!(check_regular_consistency(&p, &t).unwrap_err(), ProofError::NotCyclic);
    }
}

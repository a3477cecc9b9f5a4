use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{
    check_index_sets, first_failure, Certificate, Consistency, DeclaredOn, Extension, ObligationKind,
    ProofError, RecognizableTable, Restriction, Space, Violation,
};
use crate::explore::GlobalState;
use crate::lang::{Alphabet, Dfa, Nfa, RecRel, Sym};
use crate::model::{Action, ChannelId, CompositeState, Dir, NodeId, Protocol, StateId};

fn dense(p: &Protocol, t: &RecognizableTable, space: &Space) -> Result<Vec<RecRel>, ProofError> {
    let alphabets = p.alphabets();
    (0..space.len())
        .map(|i| {
            let s = space.decode(i);
            match t.entries.get(&s) {
                Some(r) => {
                    check_alphabets(r, &alphabets)?;
                    Ok(r.clone())
                }
                None if t.default_empty => Ok(RecRel::empty(&alphabets)),
                None => Err(ProofError::Partial(p.composite_name(&s))),
            }
        })
        .collect()
}

fn check_alphabets(r: &RecRel, alphabets: &[Arc<Alphabet>]) -> Result<(), ProofError> {
    if r.alphabets() != alphabets {
        return Err(ProofError::Lang(crate::lang::LangError::ChannelMismatch(
            "entry alphabets differ from the protocol's channels".into(),
        )));
    }
    Ok(())
}

fn step(r: &RecRel, a: &Action) -> Result<RecRel, ProofError> {
    Ok(match a.dir {
        Dir::Recv => r.quotient_channel(a.channel, a.sym)?,
        Dir::Send => r.append_channel(a.channel, a.sym)?,
    })
}

/// Checks every machine transition: the image of an entry under the
/// transition's channel operation must lie in the target entry. With a
/// restriction, only contents satisfying it on both sides are considered.
pub fn check_recognizable_consistency(
    p: &Protocol,
    t: &RecognizableTable,
    restriction: Option<&Restriction>,
) -> Result<Consistency, ProofError> {
    let space = Space::new(p);
    let r = dense(p, t, &space)?;
    consistency_of(p, &space, &r, restriction)
}

fn consistency_of(
    p: &Protocol,
    space: &Space,
    r: &[RecRel],
    restriction: Option<&Restriction>,
) -> Result<Consistency, ProofError> {
    let mut obligations: Vec<(usize, usize, Action)> = Vec::new();
    for (j, m) in p.machines.iter().enumerate() {
        for tr in &m.transitions {
            for i in space.fiber(j, tr.from) {
                obligations.push((i, space.with(&space.decode(i), j, tr.to), tr.action));
            }
        }
    }
    obligations.sort_unstable_by_key(|&(i, k, _)| (i, k));
    first_failure(&obligations, |&(i, k, a)| {
        let image = match restriction {
            None => step(&r[i], &a)?,
            Some(res) => step(&r[i].restrict_lengths(&res.clauses)?, &a)?.restrict_lengths(&res.clauses)?,
        };
        let kind = if a.dir == Dir::Recv { ObligationKind::Receive } else { ObligationKind::Send };
        Ok(r[k].inclusion_witness(&image)?.map(|w| Violation {
            kind,
            from: space.decode(i),
            to: space.decode(k),
            action: Some(a),
            witness: w,
        }))
    })
}

/// Labels of receive-only paths `from →* to` in the machine of `node`,
/// over its single input channel (`None` when it has none: only the empty
/// path, so the language is `{λ}` or empty).
pub fn receive_words(p: &Protocol, node: NodeId, from: StateId, to: StateId) -> Option<(ChannelId, Dfa)> {
    let inputs = p.inputs(node);
    let ch = *inputs.first()?;
    let m = &p.machines[node];
    let alphabet = p.channels[ch].alphabet.clone();
    let mut n = Nfa::new(alphabet.len());
    for q in 0..m.num_states() {
        n.add_state(q as StateId == to);
    }
    n.add_start(from);
    for tr in &m.transitions {
        if tr.action.dir == Dir::Recv && tr.action.channel == ch {
            n.add_edge(tr.from, Some(tr.action.sym), tr.to);
        }
    }
    Some((ch, n.determinize(alphabet).minimize()))
}

fn finish(
    p: &Protocol,
    space: &Space,
    entries: Vec<RecRel>,
) -> Result<Extension<RecognizableTable>, ProofError> {
    let consistency = consistency_of(p, space, &entries, None)?;
    let table = RecognizableTable {
        entries: entries.into_iter().enumerate().map(|(i, r)| (space.decode(i), r)).collect(),
        declared_on: DeclaredOn::Full,
        default_empty: false,
    };
    Ok(Extension { table, consistency })
}

/// Receive-only paths of one node between two of its states.
enum Hop {
    Never,
    /// Only the empty path (the node has no input channel).
    Stays,
    Reads(ChannelId, Dfa),
}

/// Completes a table declared on a product of index sets: an undeclared
/// entry is the union, over declared states `S'`, of the per-channel left
/// quotients of `R(S')` by the receive-only path labels from `S'` to it.
/// Every node may have at most one input channel.
pub fn extend_recognizable(p: &Protocol, t: &RecognizableTable) -> Result<Extension<RecognizableTable>, ProofError> {
    let space = Space::new(p);
    let v = match &t.declared_on {
        DeclaredOn::Full => return finish(p, &space, dense(p, t, &space)?),
        DeclaredOn::Product(v) => v.clone(),
        DeclaredOn::Feedback(_) => return extend_feedback(p, t),
    };
    for j in 0..p.nodes.len() {
        let d = p.inputs(j).len();
        if d > 1 {
            return Err(ProofError::InDegree {
                node: p.nodes[j].clone(),
                degree: d,
            });
        }
    }
    check_index_sets(p, &v)?;
    let alphabets = p.alphabets();
    let in_v = |s: &[StateId]| s.iter().zip(&v).all(|(q, vj)| vj.contains(q));
    let mut words: Vec<BTreeMap<(StateId, StateId), Hop>> = Vec::new();
    for (j, m) in p.machines.iter().enumerate() {
        let mut per = BTreeMap::new();
        for &from in &v[j] {
            for to in 0..m.num_states() as StateId {
                let w = match receive_words(p, j, from, to) {
                    Some((_, d)) if d.is_empty() => Hop::Never,
                    Some((ch, d)) => Hop::Reads(ch, d),
                    None if from == to => Hop::Stays,
                    None => Hop::Never,
                };
                per.insert((from, to), w);
            }
        }
        words.push(per);
    }
    let mut entries = Vec::with_capacity(space.len());
    let declared: Vec<(CompositeState, RecRel)> = (0..space.len())
        .map(|i| space.decode(i))
        .filter(|s| in_v(s))
        .map(|s| {
            let r = match t.entries.get(&s) {
                Some(r) => {
                    check_alphabets(r, &alphabets)?;
                    r.clone()
                }
                None if t.default_empty => RecRel::empty(&alphabets),
                None => return Err(ProofError::Partial(p.composite_name(&s))),
            };
            Ok((s, r))
        })
        .collect::<Result<_, ProofError>>()?;
    let lookup: BTreeMap<&CompositeState, &RecRel> = declared.iter().map(|(s, r)| (s, r)).collect();
    for i in 0..space.len() {
        let s = space.decode(i);
        if let Some(r) = lookup.get(&s) {
            entries.push((*r).clone());
            continue;
        }
        let mut acc = RecRel::empty(&alphabets);
        'src: for (src, r) in &declared {
            let mut rel = (*r).clone();
            for j in 0..s.len() {
                match &words[j][&(src[j], s[j])] {
                    Hop::Never => continue 'src,
                    Hop::Stays => {}
                    Hop::Reads(ch, d) => rel = rel.quotient_channel_language(*ch, d)?,
                }
                if rel.is_empty() {
                    continue 'src;
                }
            }
            acc = acc.union(&rel)?;
        }
        entries.push(acc);
    }
    finish(p, &space, entries)
}

/// Successor lists of the product graph (one machine moves).
fn product_graph(p: &Protocol, space: &Space) -> Vec<Vec<(usize, Action)>> {
    let mut adj = vec![Vec::new(); space.len()];
    for (j, m) in p.machines.iter().enumerate() {
        for tr in &m.transitions {
            for i in space.fiber(j, tr.from) {
                adj[i].push((space.with(&space.decode(i), j, tr.to), tr.action));
            }
        }
    }
    adj
}

/// A directed cycle avoiding `blocked`, if any.
fn cycle_avoiding(adj: &[Vec<(usize, Action)>], blocked: &[bool]) -> Option<Vec<usize>> {
    // 0 unvisited, 1 on stack, 2 done.
    let mut color = vec![0u8; adj.len()];
    for root in 0..adj.len() {
        if blocked[root] || color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&mut (u, ref mut e)) = stack.last_mut() {
            if *e < adj[u].len() {
                let w = adj[u][*e].0;
                *e += 1;
                if blocked[w] {
                    continue;
                }
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => {
                        let pos = stack.iter().position(|&(x, _)| x == w).expect("on stack");
                        let mut cyc: Vec<usize> = stack[pos..].iter().map(|&(x, _)| x).collect();
                        cyc.push(w);
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                color[u] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Completes a table declared on a feedback vertex set of the product
/// graph: an undeclared entry collects the images of declared entries
/// along paths whose intermediate states are all undeclared.
pub fn extend_feedback(p: &Protocol, t: &RecognizableTable) -> Result<Extension<RecognizableTable>, ProofError> {
    let space = Space::new(p);
    let declared: BTreeSet<usize> = match &t.declared_on {
        DeclaredOn::Feedback(v) => v.iter().map(|s| space.encode(s)).collect(),
        DeclaredOn::Full => (0..space.len()).collect(),
        DeclaredOn::Product(v) => (0..space.len())
            .filter(|&i| space.decode(i).iter().zip(v).all(|(q, vj)| vj.contains(q)))
            .collect(),
    };
    let adj = product_graph(p, &space);
    let blocked: Vec<bool> = (0..space.len()).map(|i| declared.contains(&i)).collect();
    if let Some(cyc) = cycle_avoiding(&adj, &blocked) {
        return Err(ProofError::NotFeedback {
            cycle: cyc.iter().map(|&i| p.composite_name(&space.decode(i))).collect(),
        });
    }
    let alphabets = p.alphabets();
    let mut entries: Vec<Option<RecRel>> = vec![None; space.len()];
    for &i in &declared {
        let s = space.decode(i);
        entries[i] = Some(match t.entries.get(&s) {
            Some(r) => {
                check_alphabets(r, &alphabets)?;
                r.clone()
            }
            None if t.default_empty => RecRel::empty(&alphabets),
            None => return Err(ProofError::Partial(p.composite_name(&s))),
        });
    }
    // Undeclared states in topological order of the acyclic remainder.
    let mut indeg = vec![0usize; space.len()];
    for (u, out) in adj.iter().enumerate() {
        if blocked[u] {
            continue;
        }
        for &(w, _) in out {
            if !blocked[w] {
                indeg[w] += 1;
            }
        }
    }
    let mut incoming: Vec<Vec<(usize, Action)>> = vec![Vec::new(); space.len()];
    for (u, out) in adj.iter().enumerate() {
        for &(w, a) in out {
            if !blocked[w] {
                incoming[w].push((u, a));
            }
        }
    }
    let mut ready: Vec<usize> = (0..space.len()).filter(|&i| !blocked[i] && indeg[i] == 0).collect();
    let mut order = Vec::new();
    while let Some(u) = ready.pop() {
        order.push(u);
        for &(w, _) in &adj[u] {
            if !blocked[w] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
    }
    for &u in &order {
        let mut acc = RecRel::empty(&alphabets);
        for &(src, a) in &incoming[u] {
            let r = entries[src].as_ref().expect("sources come first");
            if !r.is_empty() {
                acc = acc.union(&step(r, &a)?)?;
            }
        }
        entries[u] = Some(acc);
    }
    let entries: Vec<RecRel> = entries.into_iter().map(|e| e.expect("all filled")).collect();
    finish(p, &space, entries)
}

fn require_consistent(p: &Protocol, t: &RecognizableTable, space: &Space) -> Result<Vec<RecRel>, ProofError> {
    let r = dense(p, t, space)?;
    if let Consistency::Violated(v) = consistency_of(p, space, &r, None)? {
        return Err(ProofError::Inconsistent(v.describe(p)));
    }
    let init = p.initial();
    let c0 = vec![Vec::new(); p.channels.len()];
    if !r[space.encode(&init)].member(&c0)? {
        return Err(ProofError::Malformed(format!(
            "the entry at the initial state {} excludes empty channels",
            p.composite_name(&init)
        )));
    }
    Ok(r)
}

/// Certifies that the global state `target` is unreachable.
pub fn prove_unreachable(p: &Protocol, t: &RecognizableTable, target: &GlobalState) -> Result<Certificate, ProofError> {
    let space = Space::new(p);
    let r = require_consistent(p, t, &space)?;
    let name = target.display(p).to_string();
    if r[space.encode(target.composite())].member(&target.contents())? {
        Ok(Certificate::Inapplicable(format!("the table admits {name}")))
    } else {
        Ok(Certificate::Certified(format!("{name} is unreachable: its contents lie outside the entry")))
    }
}

/// Certifies that symbol `sym` of channel `beta` never arrives at `state`
/// of the receiving node: no entry at that state admits contents whose
/// `beta` component begins with `sym`.
pub fn prove_no_arrival(
    p: &Protocol,
    t: &RecognizableTable,
    state: StateId,
    beta: ChannelId,
    sym: Sym,
) -> Result<Certificate, ProofError> {
    let space = Space::new(p);
    let alphabets = p.alphabets();
    let node = p.channels[beta].to;
    if sym as usize >= alphabets[beta].len() {
        return Ok(Certificate::Inapplicable(format!(
            "symbol {sym} is not in the alphabet of channel {}",
            p.channels[beta].name
        )));
    }
    let r = require_consistent(p, t, &space)?;
    let dfas: Vec<Dfa> = alphabets
        .iter()
        .enumerate()
        .map(|(c, a)| {
            let u = Dfa::universal(a.clone());
            if c == beta {
                Dfa::word(a.clone(), &[sym]).concat(&u)
            } else {
                Ok(u)
            }
        })
        .collect::<Result<_, _>>()?;
    let starts = RecRel::from_product(dfas);
    let what = format!(
        "{} on {} at {}",
        alphabets[beta].name(sym),
        p.channels[beta].name,
        p.machines[node].states[state as usize]
    );
    for i in space.fiber(node, state) {
        if let Some(w) = r[i].intersect(&starts)?.witness() {
            let g = GlobalState::new(&space.decode(i), &w.iter().map(Vec::as_slice).collect::<Vec<_>>());
            return Ok(Certificate::Inapplicable(format!(
                "the table admits {}, where {what} could arrive",
                g.display(p)
            )));
        }
    }
    Ok(Certificate::Certified(format!("{what} cannot arrive")))
}

use std::collections::BTreeSet;

use super::GenError;
use crate::model::{ChannelId, Dir, Protocol, ProtocolBuilder};
use crate::sr::pair_channels;

/// Which surgery [`affinize`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Affinize {
    /// Completes every state with escapes to sink states so that the
    /// projections become `{(u #, u #)}*`, keeping deadlock behaviour.
    Deadlock,
    /// A variant whose marker exchange can never complete, keeping the
    /// channel bound.
    Bounded,
}

/// Deadlock-preserving affinization of an SR pair.
pub fn affinize_deadlock(p: &Protocol) -> Result<Protocol, GenError> {
    affinize(p, Affinize::Deadlock)
}

/// Boundedness-preserving affinization of an SR pair.
pub fn affinize_bounded(p: &Protocol) -> Result<Protocol, GenError> {
    affinize(p, Affinize::Bounded)
}

type Row = (String, Dir, ChannelId, String, String);

struct Names(BTreeSet<String>);

impl Names {
    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        while self.0.contains(&name) {
            name.push('_');
        }
        self.0.insert(name.clone());
        name
    }
}

/// Rebuilds `p` with marker symbols `mark_<channel>` and the chosen surgery
/// on both machines. Each start state is first detached: a copy takes over
/// its incoming edges so that the original start has none.
pub fn affinize(p: &Protocol, kind: Affinize) -> Result<Protocol, GenError> {
    let (alpha, beta) = pair_channels(p).map_err(|e| GenError::Invalid(e.to_string()))?;
    let mut b = ProtocolBuilder::new(&format!("{}-affine", p.name));
    for n in &p.nodes {
        b.node(n).map_err(|e| GenError::Invalid(e.to_string()))?;
    }
    let mut marks = Vec::new();
    for c in &p.channels {
        b.channel(&c.name, &p.nodes[c.from], &p.nodes[c.to]).expect("copied");
        let mut taken = Names(c.alphabet.names().iter().cloned().collect());
        let mark = taken.fresh(&format!("mark_{}", c.name));
        let mut syms = c.alphabet.names().to_vec();
        syms.push(mark.clone());
        b.symbols(&c.name, &syms).expect("fresh");
        marks.push(mark);
    }
    for (j, (out, inp)) in [(alpha, beta), (beta, alpha)].into_iter().enumerate() {
        let m = &p.machines[j];
        let node = &p.nodes[j];
        let sym_name = |ch: ChannelId, s| p.channels[ch].alphabet.name(s).to_string();
        let mut names = Names(m.states.iter().cloned().collect());
        let h = m.states[m.start as usize].clone();
        let p0 = names.fresh("p0");
        let mut rows: Vec<Row> = Vec::new();
        for t in &m.transitions {
            let (from, to) = (m.states[t.from as usize].clone(), m.states[t.to as usize].clone());
            let row = (t.action.dir, t.action.channel, sym_name(t.action.channel, t.action.sym));
            if t.to == m.start {
                rows.push((from.clone(), row.0, row.1, row.2.clone(), p0.clone()));
            }
            if t.from == m.start {
                let to = if t.to == m.start { p0.clone() } else { to.clone() };
                rows.push((p0.clone(), row.0, row.1, row.2.clone(), to));
            }
            if t.to != m.start {
                rows.push((from, row.0, row.1, row.2, to));
            }
        }
        let mut states: Vec<String> = m.states.clone();
        states.push(p0);
        let m_out: Vec<String> = p.channels[out].alphabet.names().to_vec();
        let m_in: Vec<String> = p.channels[inp].alphabet.names().to_vec();
        let (hash_out, hash_in) = (marks[out].clone(), marks[inp].clone());
        let has = |rows: &[Row], q: &str, dir: Dir, s: &str| rows.iter().any(|r| r.0 == q && r.1 == dir && r.3 == s);
        let is_send = |rows: &[Row], q: &str| rows.iter().any(|r| r.0 == q && r.1 == Dir::Send);
        let mut add = Vec::new();
        let send = |from: &str, s: &str, to: &str| (from.to_string(), Dir::Send, out, s.to_string(), to.to_string());
        let recv = |from: &str, s: &str, to: &str| (from.to_string(), Dir::Recv, inp, s.to_string(), to.to_string());
        match kind {
            Affinize::Deadlock => {
                let s = names.fresh("s");
                let s1 = names.fresh("s1");
                let r = names.fresh("r");
                for q in &states {
                    if is_send(&rows, q) {
                        add.push(send(q, &hash_out, &r));
                        for x in &m_out {
                            if !has(&rows, q, Dir::Send, x) {
                                add.push(send(q, x, &s1));
                            }
                        }
                    } else {
                        add.push(recv(q, &hash_in, &s));
                        for x in &m_in {
                            if !has(&rows, q, Dir::Recv, x) {
                                add.push(recv(q, x, &s1));
                            }
                        }
                    }
                }
                add.push(send(&s1, &hash_out, &r));
                add.push(recv(&r, &hash_in, &h));
                add.push(send(&s, &hash_out, &h));
                for x in &m_out {
                    add.push(send(&s1, x, &s1));
                    add.push(send(&s, x, &s));
                }
                for x in &m_in {
                    add.push(recv(&r, x, &r));
                }
            }
            Affinize::Bounded => {
                let r = names.fresh("r");
                let r1 = names.fresh("r1");
                let r2 = names.fresh("r2");
                let r3 = names.fresh("r3");
                let s = names.fresh("s");
                let s1 = names.fresh("s1");
                for q in &states {
                    if is_send(&rows, q) {
                        add.push(send(q, &hash_out, &r2));
                        for x in &m_out {
                            if !has(&rows, q, Dir::Send, x) {
                                add.push(send(q, x, &r));
                            }
                        }
                    } else {
                        add.push(recv(q, &hash_in, &r1));
                        for x in &m_in {
                            if !has(&rows, q, Dir::Recv, x) {
                                add.push(recv(q, x, &r));
                            }
                        }
                    }
                }
                add.push(recv(&r, &hash_in, &r1));
                add.push(recv(&r1, &hash_in, &s));
                add.push(send(&s, &hash_out, &s1));
                add.push(recv(&r2, &hash_in, &r3));
                add.push(recv(&r3, &hash_in, &s1));
                add.push(send(&s1, &hash_out, &h));
                for x in &m_in {
                    add.push(recv(&r, x, &r));
                    add.push(recv(&r2, x, &r2));
                }
                for x in &m_out {
                    add.push(send(&s, x, &s));
                }
            }
        }
        rows.extend(add);
        b.start(node, &h).expect("known");
        for (from, dir, ch, sym, to) in rows {
            b.trans(node, &from, dir, &sym, &p.channels[ch].name, &to).expect("known");
        }
    }
    b.build().map_err(|e| GenError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_protocol, sr_checks};

    const PAIR: &str = "protocol pair\nnode 0\nnode 1\nchannel alpha from 0 to 1\nchannel beta from 1 to 0\n\
        alphabet alpha d e\nalphabet beta b\n\
        machine 0 start h0\ntrans 0 h0 -d@alpha p\ntrans 0 p +b@beta h0\n\
        machine 1 start h1\ntrans 1 h1 +d@alpha q\ntrans 1 q -b@beta h1\n";

    #[test]
    fn both_variants_are_sr() {
        let p = parse_protocol(PAIR).unwrap();
        for kind in [Affinize::Deadlock, Affinize::Bounded] {
            let a = affinize(&p, kind).unwrap();
            for m in &a.machines {
                assert!(sr_checks(&a, m).passes(), "{kind:?}");
                assert!(m.transitions.iter().all(|t| t.to != m.start || m.states[t.from as usize].starts_with(['r', 's'])));
            }
            assert_eq!(a.channels[0].alphabet.name(2), "mark_alpha");
        }
    }

    #[test]
    fn deadlock_counts() {
        let p = parse_protocol(PAIR).unwrap();
        let a = affinize_deadlock(&p).unwrap();
        // Two originals, the copy, and three sinks.
        assert_eq!(a.machines[0].num_states(), 6);
        let b = affinize_bounded(&p).unwrap();
        assert_eq!(b.machines[0].num_states(), 9);
    }
}

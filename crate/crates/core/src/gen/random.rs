use std::collections::BTreeMap;

use rand::Rng;

use super::TagSystem;

use crate::model::{Dir, Protocol, ProtocolBuilder};

/// Shape limits for [`random_cyclic`].
#[derive(Clone, Copy, Debug)]
pub struct CyclicShape {
    pub nodes: usize,
    pub states: usize,
    pub symbols: usize,
}

/// A random protocol on the ring `0 → 1 → … → n−1 → 0`. Channel `c{i}`
/// leaves node `i`; its symbols are `m{k}_{i}`. Every state gets one to
/// three random transitions.
pub fn random_cyclic(rng: &mut impl Rng, shape: CyclicShape) -> Protocol {
    let n = shape.nodes.max(2);
    let mut b = ProtocolBuilder::new("random-cyclic");
    for i in 0..n {
        b.node(&i.to_string()).expect("fresh node");
    }
    for i in 0..n {
        let ch = format!("c{i}");
        b.channel(&ch, &i.to_string(), &((i + 1) % n).to_string())
            .expect("fresh channel");
        let syms: Vec<String> = (0..shape.symbols.max(1)).map(|k| format!("m{k}_{i}")).collect();
        b.symbols(&ch, &syms).expect("fresh symbols");
    }
    for i in 0..n {
        let node = i.to_string();
        let prev = (i + n - 1) % n;
        b.start(&node, "q0").expect("known node");
        let k = shape.states.max(1);
        for q in 0..k {
            for _ in 0..rng.gen_range(1..=3) {
                let to = format!("q{}", rng.gen_range(0..k));
                let sym = rng.gen_range(0..shape.symbols.max(1));
                let (dir, ch) = if rng.gen_bool(0.5) { (Dir::Send, i) } else { (Dir::Recv, prev) };
                b.trans(&node, &format!("q{q}"), dir, &format!("m{sym}_{ch}"), &format!("c{ch}"), &to)
                    .expect("known node");
            }
        }
    }
    b.build().expect("well-formed random protocol")
}

/// Shape limits for [`random_sr_machine`].
#[derive(Clone, Copy, Debug)]
pub struct SrShape {
    pub states: usize,
    pub symbols: usize,
    /// Extra transitions tried beyond the spanning cycle.
    pub extra: usize,
}

/// A random SR machine for node 0 of a pair (sending on `alpha`, receiving
/// on `beta`) given as `(state, send?, symbol, target)` rows. It is
/// strongly connected, deterministic, has no mixed states, and has neither
/// send nor receive cycles: same-direction edges only go to higher states.
pub fn random_sr_machine(rng: &mut impl Rng, shape: SrShape) -> Vec<(usize, bool, usize, usize)> {
    let k = shape.states.max(2);
    let syms = shape.symbols.max(1);
    let mut send: Vec<bool> = (0..k).map(|_| rng.gen_bool(0.5)).collect();
    if send[k - 1] == send[0] {
        send[k - 1] = !send[0];
    }
    let mut rows: Vec<(usize, bool, usize, usize)> = Vec::new();
    let mut used = vec![Vec::new(); k];
    let mut add = |rows: &mut Vec<_>, from: usize, to: usize, sym: usize| {
        if !used[from].contains(&sym) {
            used[from].push(sym);
            rows.push((from, send[from], sym, to));
        }
    };
    for q in 0..k {
        let sym = rng.gen_range(0..syms);
        add(&mut rows, q, (q + 1) % k, sym);
    }
    for _ in 0..shape.extra {
        let from = rng.gen_range(0..k);
        let to = rng.gen_range(0..k);
        let ok = send[from] != send[to] || to > from;
        if ok {
            let sym = rng.gen_range(0..syms);
            add(&mut rows, from, to, sym);
        }
    }
    rows
}

/// Builds the pair whose node 0 runs `rows` and whose node 1 runs `rows1`,
/// both in the row format of [`random_sr_machine`] (true = send on the
/// node's outgoing channel). Symbols are `d{k}` on alpha and `b{k}` on beta.
pub fn sr_pair(rows0: &[(usize, bool, usize, usize)], rows1: &[(usize, bool, usize, usize)], symbols: usize) -> Protocol {
    let mut b = ProtocolBuilder::new("sr-pair");
    b.node("0").expect("fresh");
    b.node("1").expect("fresh");
    b.channel("alpha", "0", "1").expect("fresh");
    b.channel("beta", "1", "0").expect("fresh");
    let d: Vec<String> = (0..symbols.max(1)).map(|k| format!("d{k}")).collect();
    let bs: Vec<String> = (0..symbols.max(1)).map(|k| format!("b{k}")).collect();
    b.symbols("alpha", &d).expect("fresh");
    b.symbols("beta", &bs).expect("fresh");
    for (node, rows, out, inp) in [("0", rows0, ("alpha", "d"), ("beta", "b")), ("1", rows1, ("beta", "b"), ("alpha", "d"))] {
        b.start(node, "s0").expect("known");
        for &(from, is_send, sym, to) in rows {
            let (dir, (ch, pre)) = if is_send { (Dir::Send, out) } else { (Dir::Recv, inp) };
            b.trans(node, &format!("s{from}"), dir, &format!("{pre}{sym}"), ch, &format!("s{to}"))
                .expect("known node");
        }
    }
    b.build().expect("well-formed pair")
}

/// The mirror image of a machine: node 1 receives each symbol node 0
/// sends and sends each symbol node 0 receives, so both project alike.
pub fn mirrored_pair(rows: &[(usize, bool, usize, usize)], symbols: usize) -> Protocol {
    let mirror: Vec<_> = rows.iter().map(|&(f, s, y, t)| (f, !s, y, t)).collect();
    sr_pair(rows, &mirror, symbols)
}

/// A random tag system over the first `symbols` letters of `ab…`, with
/// productions of length at most `max_prod` and a start word of length
/// `1..=max_start`.
pub fn random_tag(rng: &mut impl rand::RngCore, symbols: usize, max_prod: usize, max_start: usize) -> TagSystem {
    let sigma: Vec<char> = ('a'..='z').take(symbols.clamp(1, 26)).collect();
    let word = |rng: &mut dyn rand::RngCore, len: usize| -> Vec<char> {
        (0..len).map(|_| sigma[rng.gen_range(0..sigma.len())]).collect()
    };
    let mut productions = BTreeMap::new();
    for &c in &sigma {
        let len = rng.gen_range(0..=max_prod);
        productions.insert(c, word(rng, len));
    }
    let len = rng.gen_range(1..=max_start.max(1));
    let start = word(rng, len);
    TagSystem::new(productions, start).expect("closed alphabet")
}

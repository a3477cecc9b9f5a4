//! Analyses of two-machine send/receive protocols: projections, send and
//! receive cycles, the channel growth bound and the decision procedure for
//! affine pairs without send cycles.

mod balance;

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::explore::{bounded_channels, deadlocks, reach, Budget, Verdict};
use crate::lang::Sym;
use crate::model::{classify, Action, ChannelId, Dir, Machine, Protocol, StateId, Transition};

pub use balance::{includes, Inclusion};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SrError {
    #[error("protocol `{0}` is not a pair of SR machines")]
    NotSrPair(String),
}

/// Symbols of `w` that travel on `channel`, in order.
pub fn project(w: &[Action], channel: ChannelId) -> Vec<Sym> {
    w.iter().filter(|a| a.channel == channel).map(|a| a.sym).collect()
}

/// One directed cycle per nontrivial strongly connected component of the
/// subgraph of `dir` transitions.
pub fn cycles(m: &Machine, dir: Dir) -> Vec<Vec<Transition>> {
    let edges: Vec<Transition> = m.transitions.iter().copied().filter(|t| t.action.dir == dir).collect();
    let n = m.num_states();
    let comp = scc(n, &edges);
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for t in &edges {
        let c = comp[t.from as usize];
        if c != comp[t.to as usize] || !done.insert(c) {
            continue;
        }
        // Close the cycle with a shortest path back inside the component.
        let mut prev: Vec<Option<Transition>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([t.to]);
        seen[t.to as usize] = true;
        while let Some(v) = queue.pop_front() {
            if v == t.from {
                break;
            }
            for e in edges.iter().filter(|e| e.from == v && comp[e.to as usize] == c) {
                if !seen[e.to as usize] {
                    seen[e.to as usize] = true;
                    prev[e.to as usize] = Some(*e);
                    queue.push_back(e.to);
                }
            }
        }
        let mut back = Vec::new();
        let mut v = t.from;
        while v != t.to {
            let e = prev[v as usize].expect("path inside component");
            back.push(e);
            v = e.from;
        }
        back.reverse();
        let mut cyc = vec![*t];
        cyc.extend(back);
        out.push(cyc);
    }
    out
}

pub fn send_cycles(m: &Machine) -> Vec<Vec<Transition>> {
    cycles(m, Dir::Send)
}

pub fn receive_cycles(m: &Machine) -> Vec<Vec<Transition>> {
    cycles(m, Dir::Recv)
}

/// Strongly connected component index per state.
fn scc(n: usize, edges: &[Transition]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    let mut radj = vec![Vec::new(); n];
    for e in edges {
        adj[e.from as usize].push(e.to as usize);
        radj[e.to as usize].push(e.from as usize);
    }
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (v, ref mut k)) = stack.last_mut() {
            if let Some(&w) = adj[v].get(*k) {
                *k += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(v) = stack.pop() {
            for &w in &radj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

/// Channel indices `(alpha, beta)`: alpha runs from node 0 to node 1.
pub fn pair_channels(p: &Protocol) -> Result<(ChannelId, ChannelId), SrError> {
    let err = || SrError::NotSrPair(p.name.clone());
    if !classify(p).is_sr_pair {
        return Err(err());
    }
    let alpha = p.channels.iter().position(|c| c.from == 0 && c.to == 1).ok_or_else(err)?;
    let beta = p.channels.iter().position(|c| c.from == 1 && c.to == 0).ok_or_else(err)?;
    Ok((alpha, beta))
}

/// `k0 (k1 - 1) + 1`, with `k` the machine state counts.
pub fn growth_bound(p: &Protocol) -> Result<usize, SrError> {
    pair_channels(p)?;
    Ok(bound_for(p.machines[0].num_states(), p.machines[1].num_states()))
}

fn bound_for(k_sender: usize, k_receiver: usize) -> usize {
    k_sender * k_receiver.saturating_sub(1) + 1
}

/// Three-field verdict with the reasoning behind each field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineReport {
    pub affine: Verdict,
    pub deadlock_free: Verdict,
    pub bounded: Verdict,
    pub rationale: Vec<String>,
}

/// Balance-check state limit.
const BALANCE_STATES: usize = 200_000;

/// Affinity of the two machines by bounded-balance inclusion both ways.
pub fn affine_by_balance(p: &Protocol, bound: usize) -> (Verdict, Option<String>) {
    let n = p.channels.len();
    let (m0, m1) = (&p.machines[0], &p.machines[1]);
    let render = |w: &[(ChannelId, Sym)]| {
        let parts: Vec<String> = (0..n)
            .map(|c| {
                let s: Vec<Sym> = w.iter().filter(|l| l.0 == c).map(|l| l.1).collect();
                format!("{}={}", p.channels[c].name, p.word_name(c, &s))
            })
            .collect();
        parts.join(", ")
    };
    let mut verdict = Verdict::Yes;
    for (a, b, an, bn) in [(m0, m1, 0, 1), (m1, m0, 1, 0)] {
        let inc = includes(a, b, n, bound, BALANCE_STATES);
        match inc.holds {
            Verdict::No => {
                let w = inc.witness.unwrap_or_default();
                return (
                    Verdict::No,
                    Some(format!(
                        "home cycle of {} with projections ({}) has no counterpart in {}",
                        p.nodes[an],
                        render(&w),
                        p.nodes[bn]
                    )),
                );
            }
            Verdict::Unknown => verdict = Verdict::Unknown,
            Verdict::Yes => {}
        }
    }
    (verdict, None)
}

/// Decision procedure for SR pairs. Without send cycles: explore with the
/// growth thresholds as caps; a hit refutes affinity, otherwise the space
/// is finite and deadlock, boundedness and affinity are decided exactly.
/// With a send cycle, affinity is left open and the other two fields come
/// from a budgeted exploration.
pub fn decide_affine_deadlock(p: &Protocol, budget: &Budget) -> Result<AffineReport, SrError> {
    let (alpha, beta) = pair_channels(p)?;
    let (k0, k1) = (p.machines[0].num_states(), p.machines[1].num_states());
    let mut rationale = Vec::new();
    let cyc: Vec<(usize, Vec<Transition>)> = (0..2)
        .flat_map(|j| send_cycles(&p.machines[j]).into_iter().map(move |c| (j, c)))
        .collect();
    if let Some((j, c)) = cyc.first() {
        let labels: Vec<String> = c.iter().map(|t| p.action_name(&t.action)).collect();
        rationale.push(format!("node {} has send cycle {}", p.nodes[*j], labels.join(" ")));
        let sg = reach(p, budget, None);
        let d = deadlocks(&sg, p);
        let deadlock_free = if !d.states.is_empty() {
            rationale.push(format!("deadlock reachable: {}", sg.state(d.states[0]).display(p)));
            Verdict::No
        } else if sg.exhausted {
            Verdict::Yes
        } else {
            Verdict::Unknown
        };
        let bounded = if sg.exhausted { Verdict::Yes } else { Verdict::Unknown };
        let affine = if deadlock_free == Verdict::Yes && bounded == Verdict::Yes {
            rationale.push(
                "deadlock-free and bounded despite a send cycle, which is impossible for affine pairs".into(),
            );
            Verdict::No
        } else {
            rationale.push("affinity with send cycles is not decided; if affine, the pair is not both deadlock-free and bounded".into());
            Verdict::Unknown
        };
        return Ok(AffineReport {
            affine,
            deadlock_free,
            bounded,
            rationale,
        });
    }
    rationale.push("no send cycles".into());
    let (ta, tb) = (bound_for(k0, k1), bound_for(k1, k0));
    let filter = move |g: &crate::explore::GlobalState| g.channel(alpha).len() <= ta && g.channel(beta).len() <= tb;
    let capped = Budget {
        max_channel_len: None,
        max_total_len: None,
        ..*budget
    };
    let sg = reach(p, &capped, Some(&filter));
    let hit = sg
        .states()
        .find(|g| g.channel(alpha).len() >= ta || g.channel(beta).len() >= tb);
    if let Some(g) = hit {
        rationale.push(format!(
            "channel length threshold ({} for {}, {} for {}) reached at {}: not affine",
            ta,
            p.channels[alpha].name,
            tb,
            p.channels[beta].name,
            g.display(p)
        ));
        let full = reach(p, budget, None);
        let d = deadlocks(&full, p);
        let deadlock_free = if !d.states.is_empty() {
            rationale.push(format!("deadlock reachable: {}", full.state(d.states[0]).display(p)));
            Verdict::No
        } else if full.exhausted {
            Verdict::Yes
        } else {
            Verdict::Unknown
        };
        let bounded = if full.exhausted { Verdict::Yes } else { Verdict::Unknown };
        return Ok(AffineReport {
            affine: Verdict::No,
            deadlock_free,
            bounded,
            rationale,
        });
    }
    if !sg.exhausted {
        rationale.push("state limit reached below the thresholds".into());
        return Ok(AffineReport {
            affine: Verdict::Unknown,
            deadlock_free: if deadlocks(&sg, p).states.is_empty() { Verdict::Unknown } else { Verdict::No },
            bounded: Verdict::Unknown,
            rationale,
        });
    }
    let d = deadlocks(&sg, p);
    let deadlock_free = if d.states.is_empty() {
        Verdict::Yes
    } else {
        rationale.push(format!("deadlock reachable: {}", sg.state(d.states[0]).display(p)));
        Verdict::No
    };
    let b = bounded_channels(&sg);
    rationale.push(format!(
        "thresholds never reached; {} global states, channel bound {}",
        sg.len(),
        b.max_seen
    ));
    let (affine, why) = affine_by_balance(p, ta.max(tb));
    rationale.extend(why);
    if affine == Verdict::Unknown {
        rationale.push("balance bound exceeded before affinity was settled".into());
    }
    Ok(AffineReport {
        affine,
        deadlock_free,
        bounded: Verdict::Yes,
        rationale,
    })
}

/// Home-to-home projection pairs of machine `m` from paths of at most
/// `max_len` transitions, as `(channel, symbol)` words split per channel.
pub fn home_cycle_projections(m: &Machine, channels: usize, max_len: usize) -> BTreeSet<Vec<Vec<Sym>>> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<(StateId, Vec<Vec<Sym>>, usize)> = vec![(m.start, vec![Vec::new(); channels], 0)];
    while let Some((q, w, len)) = stack.pop() {
        if q == m.start {
            out.insert(w.clone());
        }
        if len == max_len {
            continue;
        }
        for t in m.outgoing(q) {
            let mut nw = w.clone();
            nw[t.action.channel].push(t.action.sym);
            stack.push((t.to, nw, len + 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_protocol;

    const PAIR: &str = "protocol pair\nnode 0\nnode 1\nchannel alpha from 0 to 1\nchannel beta from 1 to 0\n\
        alphabet alpha d\nalphabet beta b\n\
        machine 0 start h0\ntrans 0 h0 -d@alpha p\ntrans 0 p +b@beta h0\n\
        machine 1 start h1\ntrans 1 h1 +d@alpha q\ntrans 1 q -b@beta h1\n";

    #[test]
    fn projection_example() {
        let p = parse_protocol(
            "protocol x\nnode 0\nnode 1\nchannel alpha from 1 to 0\nchannel beta from 0 to 1\n\
             alphabet alpha d1 d2\nalphabet beta b1 b2\nmachine 0 start s\n",
        )
        .unwrap();
        let (d1, d2, b1, b2) = (0, 1, 0, 1);
        let w = [
            Action::recv(0, d1),
            Action::recv(0, d2),
            Action::send(1, b1),
            Action::recv(0, d1),
            Action::send(1, b2),
            Action::send(1, b2),
        ];
        assert_eq!(project(&w, 0), vec![d1, d2, d1]);
        assert_eq!(project(&w, 1), vec![b1, b2, b2]);
        assert!(project(&[], 0).is_empty());
        assert_eq!(p.channels.len(), 2);
    }

    #[test]
    fn cycles_and_bounds() {
        let p = parse_protocol(PAIR).unwrap();
        assert!(send_cycles(&p.machines[0]).is_empty());
        assert!(receive_cycles(&p.machines[1]).is_empty());
        assert_eq!(growth_bound(&p).unwrap(), 3);
        assert_eq!(bound_for(3, 4), 10);
        let selfloop = parse_protocol(
            "protocol s\nnode 0\nnode 1\nchannel a from 0 to 1\nalphabet a x\nmachine 0 start q\ntrans 0 q -x@a q\n",
        )
        .unwrap();
        let c = send_cycles(&selfloop.machines[0]);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 1);
    }

    #[test]
    fn derived_pair_is_affine() {
        let p = parse_protocol(PAIR).unwrap();
        let r = decide_affine_deadlock(&p, &Budget::default()).unwrap();
        assert_eq!(r.affine, Verdict::Yes, "{:?}", r.rationale);
        assert_eq!(r.deadlock_free, Verdict::Yes);
        assert_eq!(r.bounded, Verdict::Yes);
    }

    #[test]
    fn double_send_is_not_affine() {
        let text = PAIR.replace("trans 1 q -b@beta h1\n", "trans 1 q -b@beta r\ntrans 1 r -b@beta h1\n");
        let p = parse_protocol(&text).unwrap();
        let r = decide_affine_deadlock(&p, &Budget::default()).unwrap();
        assert_eq!(r.affine, Verdict::No, "{:?}", r.rationale);
        let z0 = home_cycle_projections(&p.machines[0], 2, 4);
        let z1 = home_cycle_projections(&p.machines[1], 2, 4);
        assert!(z0.contains(&vec![vec![0], vec![0]]));
        assert!(!z1.contains(&vec![vec![0], vec![0]]));
        assert!(z1.contains(&vec![vec![0], vec![0, 0]]));
    }

    #[test]
    fn non_pair_is_rejected() {
        let p = parse_protocol(
            "protocol one\nnode 0\nnode 1\nchannel a from 0 to 1\nalphabet a x\nmachine 0 start q\ntrans 0 q -x@a q\n",
        )
        .unwrap();
        assert!(decide_affine_deadlock(&p, &Budget::default()).is_err());
    }
}

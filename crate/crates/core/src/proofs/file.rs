use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{DeclaredOn, ProofError, RecognizableTable, RegularTable, Restriction, Space};
use crate::lang::{parse_regex, Dfa, RecRel};
use crate::model::{ChannelId, CompositeState, Protocol, StateId};

/// A parsed proof file.
#[derive(Clone, Debug)]
pub enum ProofTable {
    Regular(RegularTable),
    Recognizable {
        table: RecognizableTable,
        restriction: Option<Restriction>,
    },
}

fn perr(line: usize, msg: impl Into<String>) -> ProofError {
    ProofError::Parse { line, msg: msg.into() }
}

/// Parses `proof regular channel <c>` or `proof recognizable` files. Body
/// lines are `Q <states> = <regex>`, `R <states> = <relation>`,
/// `V <node> <state,...>`, `feedback <states> ...`, `restrict <cap,...>`
/// (caps are numbers or `*`) and `default empty`. `#` starts a comment.
pub fn parse_proof(p: &Protocol, text: &str) -> Result<ProofTable, ProofError> {
    let alphabets = p.alphabets();
    let mut header: Option<Option<ChannelId>> = None;
    let mut regular = BTreeMap::new();
    let mut relations = BTreeMap::new();
    let mut v: Vec<Option<BTreeSet<StateId>>> = vec![None; p.nodes.len()];
    let mut any_v = false;
    let mut feedback: Option<BTreeSet<CompositeState>> = None;
    let mut clauses = Vec::new();
    let mut default_empty = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(kind) = header else {
            header = Some(match toks.as_slice() {
                ["proof", "regular", "channel", c] => Some(
                    p.channel_index(c)
                        .ok_or_else(|| perr(line, format!("unknown channel `{c}`")))?,
                ),
                ["proof", "recognizable"] => None,
                _ => return Err(perr(line, "expected `proof regular channel <c>` or `proof recognizable`")),
            });
            continue;
        };
        let composite = |s: &str| p.parse_composite(s).map_err(|e| perr(line, e.to_string()));
        match toks[0] {
            "Q" | "R" => {
                let rest = body[1..].trim();
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(line, "expected `<states> = <expression>`"))?;
                let s = composite(lhs)?;
                let dup = match (toks[0], kind) {
                    ("Q", Some(c)) => {
                        let r = parse_regex(rhs.trim(), &p.channels[c].alphabet).map_err(|e| perr(line, e.to_string()))?;
                        let d = Dfa::compile(&r, p.channels[c].alphabet.clone()).minimize();
                        regular.insert(s.clone(), d).is_some()
                    }
                    ("R", None) => {
                        let r = RecRel::parse(rhs.trim(), &alphabets).map_err(|e| perr(line, e.to_string()))?;
                        relations.insert(s.clone(), r).is_some()
                    }
                    ("Q", None) => return Err(perr(line, "`Q` entries belong in regular proofs")),
                    _ => return Err(perr(line, "`R` entries belong in recognizable proofs")),
                };
                if dup {
                    return Err(perr(line, format!("duplicate entry for {}", p.composite_name(&s))));
                }
            }
            "V" => {
                let [_, node, states] = toks.as_slice() else {
                    return Err(perr(line, "expected `V <node> <state,...>`"));
                };
                let j = p.node_index(node).ok_or_else(|| perr(line, format!("unknown node `{node}`")))?;
                let set = states
                    .split(',')
                    .map(|q| {
                        p.machines[j]
                            .state_index(q.trim())
                            .ok_or_else(|| perr(line, format!("unknown state `{q}` of node {node}")))
                    })
                    .collect::<Result<BTreeSet<_>, _>>()?;
                if v[j].replace(set).is_some() {
                    return Err(perr(line, format!("duplicate V for node {node}")));
                }
                any_v = true;
            }
            "feedback" => {
                let set = feedback.get_or_insert_with(BTreeSet::new);
                for t in &toks[1..] {
                    set.insert(composite(t)?);
                }
            }
            "restrict" => {
                let caps: Vec<Option<usize>> = toks[1..]
                    .join("")
                    .split(',')
                    .map(|c| match c.trim() {
                        "*" => Ok(None),
                        n => n.parse().map(Some).map_err(|_| perr(line, format!("bad cap `{n}`"))),
                    })
                    .collect::<Result<_, _>>()?;
                if caps.len() != p.channels.len() {
                    return Err(perr(line, format!("restriction needs {} caps", p.channels.len())));
                }
                clauses.push(caps);
            }
            "default" if toks.get(1) == Some(&"empty") && toks.len() == 2 => default_empty = true,
            _ => return Err(perr(line, format!("unrecognized line `{body}`"))),
        }
    }
    let kind = header.ok_or_else(|| perr(1, "empty proof file"))?;
    let declared_on = match (any_v, feedback) {
        (true, Some(_)) => return Err(perr(1, "both `V` and `feedback` declarations")),
        (true, None) => DeclaredOn::Product(
            v.into_iter()
                .enumerate()
                .map(|(j, s)| s.unwrap_or_else(|| (0..p.machines[j].num_states() as StateId).collect()))
                .collect(),
        ),
        (false, Some(f)) => DeclaredOn::Feedback(f),
        (false, None) => DeclaredOn::Full,
    };
    match kind {
        Some(channel) => {
            if !clauses.is_empty() {
                return Err(perr(1, "restrictions apply to recognizable proofs"));
            }
            if matches!(declared_on, DeclaredOn::Feedback(_)) {
                return Err(perr(1, "`feedback` applies to recognizable proofs"));
            }
            Ok(ProofTable::Regular(RegularTable {
                channel,
                entries: regular,
                declared_on,
                default_empty,
            }))
        }
        None => Ok(ProofTable::Recognizable {
            table: RecognizableTable {
                entries: relations,
                declared_on,
                default_empty,
            },
            restriction: if clauses.is_empty() { None } else { Some(Restriction::new(clauses)?) },
        }),
    }
}

fn bare(p: &Protocol, s: &[StateId]) -> String {
    let n = p.composite_name(s);
    n[1..n.len() - 1].to_string()
}

fn write_v(out: &mut String, p: &Protocol, d: &DeclaredOn) {
    match d {
        DeclaredOn::Full => {}
        DeclaredOn::Product(v) => {
            for (j, vj) in v.iter().enumerate() {
                let names: Vec<&str> = vj.iter().map(|&q| p.machines[j].states[q as usize].as_str()).collect();
                writeln!(out, "V {} {}", p.nodes[j], names.join(",")).expect("string");
            }
        }
        DeclaredOn::Feedback(f) => {
            for s in f {
                writeln!(out, "feedback {}", bare(p, s)).expect("string");
            }
        }
    }
}

/// Renders a regular table in proof-file form, in composite-state order.
pub fn format_regular(p: &Protocol, t: &RegularTable) -> String {
    let mut out = format!("proof regular channel {}\n", p.channels[t.channel].name);
    write_v(&mut out, p, &t.declared_on);
    if t.default_empty {
        out.push_str("default empty\n");
    }
    let space = Space::new(p);
    for i in 0..space.len() {
        let s = space.decode(i);
        if let Some(d) = t.entries.get(&s) {
            writeln!(out, "Q {} = {}", bare(p, &s), d.to_regex().display(d.alphabet())).expect("string");
        }
    }
    out
}

/// Renders a recognizable table in proof-file form.
pub fn format_recognizable(p: &Protocol, t: &RecognizableTable) -> String {
    let mut out = String::from("proof recognizable\n");
    write_v(&mut out, p, &t.declared_on);
    if t.default_empty {
        out.push_str("default empty\n");
    }
    let space = Space::new(p);
    for i in 0..space.len() {
        let s = space.decode(i);
        if let Some(r) = t.entries.get(&s) {
            writeln!(out, "R {} = {}", bare(p, &s), r.to_expression()).expect("string");
        }
    }
    out
}

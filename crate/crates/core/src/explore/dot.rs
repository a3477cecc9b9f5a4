use std::fmt::Write;

use super::StateGraph;
use crate::model::Protocol;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering with stable numbering: node `i` is state index `i`.
pub fn to_dot(p: &Protocol, sg: &StateGraph) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(&p.name)).unwrap();
    writeln!(out, "  node [shape=box, fontname=\"monospace\"];").unwrap();
    for (i, g) in sg.states().enumerate() {
        let chans: Vec<String> = g
            .channels()
            .iter()
            .enumerate()
            .map(|(c, w)| format!("{}: {}", p.channels[c].name, p.word_name(c, w)))
            .collect();
        let label = format!("{}\\n{}", p.composite_name(g.composite()), chans.join("\\n"));
        let style = if i == 0 { ", penwidth=2" } else { "" };
        writeln!(out, "  s{i} [label=\"{}\"{style}];", escape(&label).replace("\\\\n", "\\n")).unwrap();
    }
    for e in sg.edges() {
        writeln!(
            out,
            "  s{} -> s{} [label=\"{}\"];",
            e.from,
            e.to,
            escape(&p.action_name(&e.action))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

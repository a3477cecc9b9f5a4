//! Command implementations.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cfsm::explore::{
    bounded_channels, deadlocks, executable_receptions, format_path, half_duplex, reach, stable_states,
    to_dot, well_formed, Arrival, Budget, StateGraph, WellFormedViolation,
};
use cfsm::flowctl::{parse_node_list, parse_node_sets, scheduled_reach, PriorityScheme};
use cfsm::gen::{fixture, fixture_file, fixture_files, fixture_source, tag_to_protocol, TagSystem};
use cfsm::model::{classify, parse_protocol, validate as diagnose, Protocol, Severity};
use cfsm::proofs::{
    check_recognizable_consistency, check_regular_consistency, extend_recognizable, extend_regular,
    format_recognizable, format_regular, parse_proof, prove_deadlock_free, prove_no_arrival, Certificate,
    Consistency, DeclaredOn, ProofTable, RecognizableTable,
};
use cfsm::sr::decide_affine_deadlock;

use crate::report::{Outcome, Report};
use crate::{GenAction, Input, Limits, ProofAction, Property, SrAction};

fn load(input: &Input) -> Result<Protocol> {
    match (&input.fixture, &input.file) {
        (Some(name), _) => Ok(fixture(name)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_protocol(&text).with_context(|| format!("parsing {}", path.display()))
        }
        (None, None) => bail!("give a protocol file or --fixture <name>"),
    }
}

fn budget(limits: &Limits) -> Budget {
    Budget {
        max_states: Some(limits.max_states),
        max_channel_len: Some(limits.max_channel),
        max_total_len: limits.max_total,
    }
}

fn scheme(p: &Protocol, flow: &str) -> Result<PriorityScheme> {
    let (kind, arg) = flow
        .split_once(':')
        .ok_or_else(|| anyhow!("--flow expects cyclic:<channel>, smooth:<file> or chain:<nodes>"))?;
    Ok(match kind {
        "cyclic" => PriorityScheme::Cyclic(
            p.channel_index(arg)
                .ok_or_else(|| anyhow!("unknown channel `{arg}`"))?,
        ),
        "smooth" => {
            let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
            PriorityScheme::Smooth(parse_node_sets(p, &text)?)
        }
        "chain" => PriorityScheme::BlockingChain(parse_node_list(p, arg)?),
        other => bail!("unknown flow scheme `{other}`"),
    })
}

fn explore_graph(p: &Protocol, limits: &Limits) -> Result<StateGraph> {
    let b = budget(limits);
    match &limits.flow {
        None => Ok(reach(p, &b, None)),
        Some(flow) => Ok(scheduled_reach(p, &scheme(p, flow)?, &b)?),
    }
}

fn summarize(r: &mut Report, sg: &StateGraph) {
    r.line("states", sg.len());
    r.line("exhausted", yes_no(sg.exhausted));
    if sg.exhausted {
        r.line("summary", format!("definitive, {} states", sg.len()));
    } else {
        r.line("summary", format!("budget reached after {} states", sg.len()));
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn witness_path(r: &mut Report, p: &Protocol, sg: &StateGraph, i: usize) {
    for line in format_path(p, sg, &sg.path_to(i)) {
        r.line("witness", line.trim_start());
    }
}

/// Exhausted search without a witness refutes; otherwise the answer is open.
fn closed(sg: &StateGraph) -> Outcome {
    if sg.exhausted {
        Outcome::Refuted
    } else {
        Outcome::Unknown
    }
}

pub fn validate(input: &Input) -> Result<Outcome> {
    let p = load(input)?;
    let mut r = Report::new();
    let diags = diagnose(&p);
    for d in &diags {
        r.line("diagnostic", d);
    }
    let c = classify(&p);
    r.line("nodes", p.nodes.len());
    r.line("channels", p.channels.len());
    r.line("cyclic", yes_no(c.is_cyclic));
    r.line("sr-pair", yes_no(c.is_sr_pair));
    let bad = diags.iter().any(|d| d.severity == Severity::Error);
    Ok(r.verdict(if bad { Outcome::Refuted } else { Outcome::Holds }))
}

pub fn explore(input: &Input, limits: &Limits, dot_out: Option<&Path>) -> Result<Outcome> {
    let p = load(input)?;
    let sg = explore_graph(&p, limits)?;
    let mut r = Report::new();
    summarize(&mut r, &sg);
    r.line("stable", stable_states(&sg).states.len());
    r.line("deadlocks", deadlocks(&sg, &p).states.len());
    r.line("max-total-length", bounded_channels(&sg).max_seen);
    if let Some(path) = dot_out {
        fs::write(path, to_dot(&p, &sg)).with_context(|| format!("writing {}", path.display()))?;
        r.line("dot", path.display());
    }
    Ok(r.verdict(if sg.exhausted { Outcome::Holds } else { Outcome::Unknown }))
}

pub fn dot(input: &Input, limits: &Limits) -> Result<Outcome> {
    let p = load(input)?;
    let sg = explore_graph(&p, limits)?;
    Report::new().raw(&to_dot(&p, &sg));
    Ok(Outcome::Holds)
}

pub fn check(property: &Property) -> Result<Outcome> {
    match property {
        Property::Deadlock { input, limits } => {
            let p = load(input)?;
            let sg = explore_graph(&p, limits)?;
            let mut r = Report::new();
            r.line("property", "deadlock-free");
            summarize(&mut r, &sg);
            let d = deadlocks(&sg, &p);
            Ok(match d.states.first() {
                Some(&i) => {
                    witness_path(&mut r, &p, &sg, i);
                    r.verdict(Outcome::Refuted)
                }
                None if sg.exhausted => r.verdict(Outcome::Holds),
                None => r.verdict(Outcome::Unknown),
            })
        }
        Property::Stable { state, input, limits } => {
            let p = load(input)?;
            let s = p.parse_composite(state)?;
            let sg = explore_graph(&p, limits)?;
            let mut r = Report::new();
            r.line("property", format!("stable {}", p.composite_name(&s)));
            summarize(&mut r, &sg);
            let hit = (0..sg.len()).find(|&i| {
                let g = sg.state(i);
                g.channels_empty() && g.composite() == s.as_slice()
            });
            Ok(match hit {
                Some(i) => {
                    witness_path(&mut r, &p, &sg, i);
                    r.verdict(Outcome::Holds)
                }
                None => r.verdict(closed(&sg)),
            })
        }
        Property::Arrival {
            state,
            message,
            input,
            limits,
        } => arrival(input, limits, state, message),
        Property::HalfDuplex { input, limits } => {
            let p = load(input)?;
            let sg = explore_graph(&p, limits)?;
            let (v, w) = half_duplex(&sg, &p).map_err(|e| anyhow!(e))?;
            let mut r = Report::new();
            r.line("property", "half-duplex");
            summarize(&mut r, &sg);
            if let Some(i) = w {
                witness_path(&mut r, &p, &sg, i);
            }
            Ok(r.verdict(v.into()))
        }
        Property::Bounded { input, limits } => {
            let p = load(input)?;
            let sg = explore_graph(&p, limits)?;
            let b = bounded_channels(&sg);
            let mut r = Report::new();
            r.line("property", "bounded");
            summarize(&mut r, &sg);
            r.line("max-total-length", b.max_seen);
            Ok(match b.bound {
                Some(n) => {
                    r.line("bound", n);
                    r.verdict(Outcome::Holds)
                }
                None => r.verdict(Outcome::Unknown),
            })
        }
        Property::WellFormed { input, limits } => {
            let p = load(input)?;
            let sg = explore_graph(&p, limits)?;
            let w = well_formed(&sg, &p);
            let mut r = Report::new();
            r.line("property", "well-formed");
            summarize(&mut r, &sg);
            for v in &w.violations {
                let (what, a) = match v {
                    WellFormedViolation::UnspecifiedReception(a) => ("unspecified-reception", a),
                    WellFormedViolation::UselessEdge(a) => ("useless-edge", a),
                };
                r.line("violation", format!("{what} {}", arrival_name(&p, a)));
            }
            Ok(r.verdict(w.holds.into()))
        }
    }
}

fn arrival_name(p: &Protocol, a: &Arrival) -> String {
    format!(
        "{}@{} at {}",
        p.channels[a.channel].alphabet.name(a.sym),
        p.channels[a.channel].name,
        p.machines[a.node].states[a.state as usize]
    )
}

fn arrival(input: &Input, limits: &Limits, state: &str, message: &str) -> Result<Outcome> {
    let p = load(input)?;
    let (sym, chan) = message
        .split_once('@')
        .ok_or_else(|| anyhow!("message must be <symbol>@<channel>"))?;
    let (channel, sym) = p.symbol(chan, sym)?;
    let node = p.channels[channel].to;
    let q = p.machines[node]
        .state_index(state)
        .ok_or_else(|| anyhow!("node {} has no state `{state}`", p.nodes[node]))?;
    let target = Arrival {
        node,
        state: q,
        channel,
        sym,
    };
    let sg = explore_graph(&p, limits)?;
    let mut r = Report::new();
    r.line("property", format!("arrival {}", arrival_name(&p, &target)));
    summarize(&mut r, &sg);
    if executable_receptions(&sg, &p).pairs.contains(&target) {
        let i = (0..sg.len())
            .find(|&i| {
                let g = sg.state(i);
                g.composite()[node] == q && g.channel(channel).first() == Some(&sym)
            })
            .expect("reception came from some state");
        witness_path(&mut r, &p, &sg, i);
        return Ok(r.verdict(Outcome::Holds));
    }
    Ok(r.verdict(closed(&sg)))
}

fn proof_text(name: &str) -> Result<String> {
    let path = Path::new(name);
    if path.exists() {
        return fs::read_to_string(path).with_context(|| format!("reading {name}"));
    }
    fixture_file(name)
        .map(str::to_string)
        .ok_or_else(|| anyhow!("no proof file `{name}` on disk or among the fixtures"))
}

fn consistency_lines(r: &mut Report, p: &Protocol, c: &Consistency) -> Outcome {
    match c {
        Consistency::Consistent { obligations } => {
            r.line("obligations", obligations);
            r.line("consistent", "yes");
            Outcome::Holds
        }
        Consistency::Violated(v) => {
            r.line("consistent", "no");
            r.line("witness", v.describe(p));
            Outcome::Refuted
        }
    }
}

fn certificate_line(r: &mut Report, key: &str, c: &Certificate) {
    match c {
        Certificate::Certified(why) => r.line(key, format!("certified: {why}")),
        Certificate::Inapplicable(why) => r.line(key, format!("inapplicable: {why}")),
    }
}

fn initial_admitted(p: &Protocol, t: &RecognizableTable) -> Result<bool> {
    let empty = vec![Vec::new(); p.channels.len()];
    Ok(t.entries
        .get(&p.initial())
        .map(|r| r.member(&empty))
        .transpose()?
        .unwrap_or(false))
}

pub fn proof(action: &ProofAction) -> Result<Outcome> {
    let (input, name, out) = match action {
        ProofAction::Check { input, proof } => (input, proof, None),
        ProofAction::Extend { input, proof, out } => (input, proof, Some(out.as_deref())),
    };
    let p = load(input)?;
    let table = parse_proof(&p, &proof_text(name)?).with_context(|| format!("in {name}"))?;
    let mut r = Report::new();
    match table {
        ProofTable::Regular(t) => {
            r.line("proof", format!("regular on channel {}", p.channels[t.channel].name));
            let full = match t.declared_on {
                DeclaredOn::Full => t.clone(),
                _ => extend_regular(&p, &t)?.table,
            };
            r.line("entries", full.entries.len());
            let consistency = check_regular_consistency(&p, &full)?;
            let outcome = consistency_lines(&mut r, &p, &consistency);
            if let Some(out) = out {
                write_table(&mut r, out, &format_regular(&p, &full))?;
            } else if outcome == Outcome::Holds {
                certificate_line(&mut r, "deadlock-free", &prove_deadlock_free(&p, &full)?);
            }
            Ok(r.verdict(outcome))
        }
        ProofTable::Recognizable { table, restriction } => {
            r.line("proof", "recognizable");
            let full = match table.declared_on {
                DeclaredOn::Full => table.clone(),
                _ => {
                    if restriction.is_some() {
                        bail!("restrictions apply to fully declared tables");
                    }
                    extend_recognizable(&p, &table)?.table
                }
            };
            r.line("entries", full.entries.len());
            if let Some(res) = &restriction {
                r.line("restriction-clauses", res.clauses.len());
            }
            let consistency = check_recognizable_consistency(&p, &full, restriction.as_ref())?;
            let outcome = consistency_lines(&mut r, &p, &consistency);
            r.line("initial-admitted", yes_no(initial_admitted(&p, &full)?));
            if let Some(out) = out {
                write_table(&mut r, out, &format_recognizable(&p, &full))?;
            } else if outcome == Outcome::Holds && restriction.is_none() {
                for (node, m) in p.machines.iter().enumerate() {
                    for q in 0..m.num_states() as u32 {
                        let muted = p.inputs(node).iter().all(|&ch| {
                            (0..p.channels[ch].alphabet.len() as u32).all(|b| {
                                prove_no_arrival(&p, &full, q, ch, b).is_ok_and(|c| c.is_certified())
                            })
                        });
                        if muted && !p.inputs(node).is_empty() {
                            r.line("no-arrival", format!("node {} state {}", p.nodes[node], m.states[q as usize]));
                        }
                    }
                }
            }
            Ok(r.verdict(outcome))
        }
    }
}

fn write_table(r: &mut Report, out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            r.line("wrote", path.display());
        }
        None => r.raw(text),
    }
    Ok(())
}

pub fn sr(action: &SrAction) -> Result<Outcome> {
    let SrAction::Affine { input, limits } = action;
    let p = load(input)?;
    let report = decide_affine_deadlock(&p, &budget(limits))?;
    let mut r = Report::new();
    r.line("affine", report.affine);
    r.line("deadlock-free", report.deadlock_free);
    r.line("bounded", report.bounded);
    for why in &report.rationale {
        r.line("rationale", why);
    }
    Ok(r.verdict(report.affine.into()))
}

pub fn gen(action: &GenAction) -> Result<Outcome> {
    let mut r = Report::new();
    match action {
        GenAction::Tag { file, out } => {
            let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let t = TagSystem::parse(&text).with_context(|| format!("parsing {}", file.display()))?;
            let protocol = tag_to_protocol(&t).to_string();
            match out {
                Some(path) => {
                    fs::write(path, protocol).with_context(|| format!("writing {}", path.display()))?;
                    r.line("wrote", path.display());
                }
                None => r.raw(&protocol),
            }
        }
        GenAction::Fixture { name, dir } => {
            let source = fixture_source(name)?;
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let main = dir.join(format!("{name}.cfsm"));
            fs::write(&main, source).with_context(|| format!("writing {}", main.display()))?;
            r.line("wrote", main.display());
            for (file, text) in fixture_files(name)? {
                let path = dir.join(file);
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                r.line("wrote", path.display());
            }
        }
    }
    Ok(Outcome::Holds)
}

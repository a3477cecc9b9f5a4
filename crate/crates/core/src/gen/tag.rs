use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::GenError;
use crate::model::{Dir, Protocol, ProtocolBuilder};

/// A tag system with deletion number 2: alphabet, productions and start
/// word. Symbols are characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSystem {
    pub productions: BTreeMap<char, Vec<char>>,
    pub start: Vec<char>,
}

impl TagSystem {
    /// Checks that every symbol used has a production.
    pub fn new(productions: BTreeMap<char, Vec<char>>, start: Vec<char>) -> Result<Self, GenError> {
        for c in start.iter().chain(productions.values().flatten()) {
            if !productions.contains_key(c) {
                return Err(GenError::Invalid(format!("symbol `{c}` has no production")));
            }
        }
        Ok(TagSystem { productions, start })
    }

    pub fn alphabet(&self) -> BTreeSet<char> {
        self.productions.keys().copied().collect()
    }

    /// Shortest production length.
    pub fn min_production(&self) -> usize {
        self.productions.values().map(Vec::len).min().unwrap_or(0)
    }

    /// Longest production length.
    pub fn max_production(&self) -> usize {
        self.productions.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Parses `tag` / `prod <sym> <word|eps>` / `start <word|eps>`.
    pub fn parse(text: &str) -> Result<Self, GenError> {
        let err = |line: usize, msg: &str| GenError::Parse {
            line,
            msg: msg.to_string(),
        };
        let word = |w: &str| -> Vec<char> {
            if w == "eps" {
                Vec::new()
            } else {
                w.chars().collect()
            }
        };
        let mut header = false;
        let mut productions = BTreeMap::new();
        let mut start = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["tag"] if !header => header = true,
                _ if !header => return Err(err(line, "expected `tag` header")),
                ["prod", sym, w] => {
                    let mut cs = sym.chars();
                    let (Some(c), None) = (cs.next(), cs.next()) else {
                        return Err(err(line, "production symbol must be one character"));
                    };
                    if productions.insert(c, word(w)).is_some() {
                        return Err(err(line, &format!("duplicate production for `{c}`")));
                    }
                }
                ["start", w] => {
                    if start.replace(word(w)).is_some() {
                        return Err(err(line, "duplicate start word"));
                    }
                }
                _ => return Err(err(line, &format!("unrecognized line `{}`", raw.trim()))),
            }
        }
        if !header {
            return Err(err(1, "expected `tag` header"));
        }
        let start = start.ok_or_else(|| err(text.lines().count().max(1), "missing start word"))?;
        TagSystem::new(productions, start)
    }

    /// One step: λ when `|w| ≤ 1`, otherwise drop two symbols and append
    /// the production of the first.
    pub fn step(&self, w: &[char]) -> Vec<char> {
        if w.len() <= 1 {
            return Vec::new();
        }
        let mut out = w[2..].to_vec();
        out.extend_from_slice(&self.productions[&w[0]]);
        out
    }

    /// Iterates from the start word until λ, a repeated word, or
    /// `max_steps` steps.
    pub fn run(&self, max_steps: usize) -> TagRun {
        let mut words = vec![self.start.clone()];
        let mut index: HashMap<Vec<char>, usize> = HashMap::from([(self.start.clone(), 0)]);
        loop {
            let last = words.last().expect("nonempty");
            if last.is_empty() {
                return TagRun {
                    words,
                    outcome: TagOutcome::Halt,
                };
            }
            if words.len() > max_steps {
                return TagRun {
                    words,
                    outcome: TagOutcome::Budget,
                };
            }
            let next = self.step(last);
            if let Some(&first) = index.get(&next) {
                return TagRun {
                    words,
                    outcome: TagOutcome::Cycle { first },
                };
            }
            index.insert(next.clone(), words.len());
            words.push(next);
        }
    }
}

impl std::fmt::Display for TagSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let word = |w: &[char]| if w.is_empty() { "eps".to_string() } else { w.iter().collect() };
        writeln!(f, "tag")?;
        for (c, w) in &self.productions {
            writeln!(f, "prod {c} {}", word(w))?;
        }
        writeln!(f, "start {}", word(&self.start))
    }
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagOutcome {
    /// λ was reached (it is the last word).
    Halt,
    /// The next word equals `words[first]`; the sequence is bounded.
    Cycle { first: usize },
    /// The step budget ran out.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagRun {
    /// `s_0, s_1, …` as far as computed, without the repeated word.
    pub words: Vec<Vec<char>>,
    pub outcome: TagOutcome,
}

/// Name fragment for a tag symbol.
pub fn symbol_stem(c: char) -> String {
    if c.is_ascii_alphanumeric() {
        c.to_string()
    } else {
        format!("u{:04x}", c as u32)
    }
}

/// The two-machine simulation of a tag system. Node 0 repeats every
/// symbol it receives on `beta` back on `alpha`; node 1 first sends the
/// start word on `beta`, then repeatedly receives two symbols on `alpha`
/// and sends the production of the first. A never-used reception of
/// `dummy` from `q` back to the start keeps node 1 strongly connected.
pub fn tag_to_protocol(t: &TagSystem) -> Protocol {
    let a = |c: char| format!("{}_a", symbol_stem(c));
    let b = |c: char| format!("{}_b", symbol_stem(c));
    let sigma: Vec<char> = t.alphabet().into_iter().collect();
    let mut pb = ProtocolBuilder::new("tag");
    pb.node("0").expect("fresh");
    pb.node("1").expect("fresh");
    pb.channel("alpha", "0", "1").expect("fresh");
    pb.channel("beta", "1", "0").expect("fresh");
    let mut ma: Vec<String> = sigma.iter().map(|&c| a(c)).collect();
    ma.push("dummy".into());
    let mb: Vec<String> = sigma.iter().map(|&c| b(c)).collect();
    pb.symbols("alpha", &ma).expect("fresh");
    pb.symbols("beta", &mb).expect("fresh");

    pb.start("0", "h0").expect("known");
    for &c in &sigma {
        let pc = format!("p_{}", symbol_stem(c));
        pb.trans("0", "h0", Dir::Recv, &b(c), "beta", &pc).expect("known");
        pb.trans("0", &pc, Dir::Send, &a(c), "alpha", "h0").expect("known");
    }

    let start = if t.start.is_empty() { "q" } else { "h1" };
    pb.start("1", start).expect("known");
    let m = t.start.len();
    for (i, &c) in t.start.iter().enumerate() {
        let from = if i == 0 { "h1".to_string() } else { format!("w{i}") };
        let to = if i + 1 == m { "q".to_string() } else { format!("w{}", i + 1) };
        pb.trans("1", &from, Dir::Send, &b(c), "beta", &to).expect("known");
    }
    for &d in &sigma {
        let s = symbol_stem(d);
        let qd = format!("q_{s}");
        pb.trans("1", "q", Dir::Recv, &a(d), "alpha", &qd).expect("known");
        let g = &t.productions[&d];
        let after = if g.is_empty() { "q".to_string() } else { format!("r_{s}") };
        for &c in &sigma {
            pb.trans("1", &qd, Dir::Recv, &a(c), "alpha", &after).expect("known");
        }
        for (i, &c) in g.iter().enumerate() {
            let from = if i == 0 { format!("r_{s}") } else { format!("g_{s}_{i}") };
            let to = if i + 1 == g.len() { "q".to_string() } else { format!("g_{s}_{}", i + 1) };
            pb.trans("1", &from, Dir::Send, &b(c), "beta", &to).expect("known");
        }
    }
    pb.trans("1", "q", Dir::Recv, "dummy", "alpha", start).expect("known");
    pb.build().expect("well-formed tag protocol")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> TagSystem {
        TagSystem::parse("tag\nprod a bb\nprod b a\nstart aaa\n").unwrap()
    }

    #[test]
    fn steps_and_runs() {
        let t = example();
        assert_eq!(t.step(&['a']), Vec::<char>::new());
        assert_eq!(t.step(&['a', 'a', 'a']), vec!['a', 'b', 'b']);
        assert_eq!(t.step(&['b', 'a']), vec!['a']);
        let run = t.run(100);
        assert_eq!(run.outcome, TagOutcome::Halt);
        let words: Vec<String> = run.words.iter().map(|w| w.iter().collect()).collect();
        assert_eq!(words, ["aaa", "abb", "bbb", "ba", "a", ""]);
        let pad = TagSystem::parse("tag\nprod # ##\nstart ##\n").unwrap();
        assert_eq!(pad.run(10).outcome, TagOutcome::Cycle { first: 0 });
        let empty = TagSystem::parse("tag\nprod a a\nstart eps\n").unwrap();
        assert_eq!(empty.run(10).outcome, TagOutcome::Halt);
        assert_eq!(empty.run(10).words.len(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(TagSystem::parse("prod a b\n").is_err());
        assert!(TagSystem::parse("tag\nprod a b\nstart a\n").is_err());
        assert!(TagSystem::parse("tag\nprod ab b\nstart a\n").is_err());
        let t = example();
        assert_eq!(TagSystem::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn protocol_shape() {
        let t = example();
        let p = tag_to_protocol(&t);
        assert_eq!(p.machines[0].num_states(), 1 + 2);
        let expect = 3 + (2 + 1) + (1 + 1) + 1;
        assert_eq!(p.machines[1].num_states(), expect);
        assert_eq!(symbol_stem('#'), "u0023");
    }
}

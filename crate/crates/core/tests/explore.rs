use std::collections::BTreeSet;

use cfsm::explore::{
    blocked_channels, bounded_channels, deadlocks, executable_receptions, half_duplex, reach,
    stable_states, successors, to_dot, well_formed, BlockVerdict, Budget, GlobalState, Verdict,
};
use cfsm::gen::{fixture, fixture_file, fixture_names};
use cfsm::model::{classify, parse_protocol, validate, Protocol, Severity};

fn golden_states(p: &Protocol) -> BTreeSet<GlobalState> {
    let text = fixture_file("fig8_2.states").expect("golden file");
    let mut out = BTreeSet::new();
    for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let fields: Vec<&str> = line.splitn(2, ' ').collect();
        let parts: Vec<&str> = fields[1].split('|').map(str::trim).collect();
        let comp = p.parse_composite(parts[0]).unwrap();
        let chans: Vec<Vec<u32>> = parts[1..]
            .iter()
            .enumerate()
            .map(|(c, w)| {
                if *w == "eps" {
                    Vec::new()
                } else {
                    w.split_whitespace()
                        .map(|s| p.channels[c].alphabet.index(s).expect("symbol"))
                        .collect()
                }
            })
            .collect();
        let refs: Vec<&[u32]> = chans.iter().map(|c| c.as_slice()).collect();
        out.insert(GlobalState::new(&comp, &refs));
    }
    out
}

#[test]
fn flowctl2_matches_golden_state_space() {
    let p = fixture("flowctl2").unwrap();
    let sg = reach(&p, &Budget::default(), None);
    assert!(sg.exhausted);
    assert_eq!(sg.len(), 59);
    let golden = golden_states(&p);
    assert_eq!(golden.len(), 59);
    let got: BTreeSet<GlobalState> = sg.states().cloned().collect();
    assert_eq!(got, golden);
    assert_eq!(successors(&p, sg.state(0)).len(), 4);
}

#[test]
fn flowctl2_properties() {
    let p = fixture("flowctl2").unwrap();
    let sg = reach(&p, &Budget::default(), None);
    let st = stable_states(&sg);
    assert!(st.definitive);
    let names: BTreeSet<String> = st.states.iter().map(|s| p.composite_name(s)).collect();
    let expect: BTreeSet<String> = [
        "(00,10)", "(00,14)", "(03,11)", "(03,12)", "(01,13)", "(02,13)", "(04,10)", "(04,14)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(names, expect);
    let d = deadlocks(&sg, &p);
    assert!(d.definitive && d.states.is_empty());
    assert_eq!(bounded_channels(&sg).bound, Some(2));
    assert_eq!(half_duplex(&sg, &p).unwrap().0, Verdict::No);
    let rec = executable_receptions(&sg, &p);
    assert!(rec.definitive);
    let n0 = p.machines[0].state_index("02").unwrap();
    assert!(!rec.pairs.iter().any(|a| a.node == 0 && a.state == n0));
}

#[test]
fn counter_caps() {
    let p = fixture("counter").unwrap();
    let by_channel = reach(&p, &Budget::with_channel_cap(3), None);
    assert_eq!(by_channel.len(), 14);
    assert!(!by_channel.exhausted);
    let by_total = reach(
        &p,
        &Budget {
            max_total_len: Some(3),
            ..Budget::default()
        },
        None,
    );
    assert_eq!(by_total.len(), 8);
    assert!(!by_total.exhausted);
    let cls = classify(&p);
    assert!(!cls.is_cyclic);
    assert_eq!(cls.node_in_degrees["1"], 2);
    assert_eq!(bounded_channels(&by_total).bound, None);
}

#[test]
fn access_properties() {
    let p = fixture("access").unwrap();
    let sg = reach(&p, &Budget::default(), None);
    assert!(sg.exhausted);
    assert_eq!(sg.len(), 8);
    assert_eq!(stable_states(&sg).states.len(), 4);
    assert_eq!(bounded_channels(&sg).bound, Some(1));
    assert_eq!(half_duplex(&sg, &p).unwrap().0, Verdict::Yes);
    let d = deadlocks(&sg, &p);
    assert_eq!(d.states.len(), 1);
    assert_eq!(p.composite_name(sg.state(d.states[0]).composite()), "(03,13)");
    assert_eq!(well_formed(&sg, &p).holds, Verdict::Yes);
}

#[test]
fn fixtures_validate_cleanly() {
    for name in fixture_names() {
        let p = fixture(name).unwrap();
        let errs: Vec<_> = validate(&p)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        assert!(errs.is_empty(), "{name}: {errs:?}");
        let again = parse_protocol(&p.to_string()).unwrap();
        assert_eq!(again, p, "{name} round trip");
    }
}

#[test]
fn ring_is_cyclic() {
    let text = "protocol ring\nnode a\nnode b\nnode c\nnode d\n\
        channel w from a to b\nchannel x from b to c\nchannel y from c to d\nchannel z from d to a\n\
        alphabet w m_w\nalphabet x m_x\nalphabet y m_y\nalphabet z m_z\n\
        machine a start 0\ntrans a 0 -m_w@w 1\ntrans a 1 +m_z@z 0\n\
        machine b start 0\ntrans b 0 +m_w@w 1\ntrans b 1 -m_x@x 0\n\
        machine c start 0\ntrans c 0 +m_x@x 1\ntrans c 1 -m_y@y 0\n\
        machine d start 0\ntrans d 0 +m_y@y 1\ntrans d 1 -m_z@z 0\n";
    let p = parse_protocol(text).unwrap();
    assert!(classify(&p).is_cyclic);
    let sg = reach(&p, &Budget::default(), None);
    assert!(sg.exhausted);
    assert_eq!(sg.len(), 8);
    assert_eq!(bounded_channels(&sg).bound, Some(1));
}

#[test]
fn exploration_is_deterministic_and_monotone() {
    let p = fixture("altbit-demons").unwrap();
    let a = reach(&p, &Budget::with_channel_cap(1), None);
    let b = reach(&p, &Budget::with_channel_cap(1), None);
    assert_eq!(a.states().collect::<Vec<_>>(), b.states().collect::<Vec<_>>());
    assert_eq!(a.edges(), b.edges());
    let big = reach(&p, &Budget::with_channel_cap(2), None);
    for g in a.states() {
        assert!(big.index_of(g).is_some());
    }
    let mut has_in = vec![false; big.len()];
    for e in big.edges() {
        has_in[e.to as usize] = true;
    }
    assert!(has_in.iter().skip(1).all(|&x| x));
}

#[test]
fn edges_replay_local_moves() {
    let p = fixture("flowctl2").unwrap();
    let sg = reach(&p, &Budget::default(), None);
    for e in sg.edges() {
        let from = sg.state(e.from as usize);
        let to = sg.state(e.to as usize);
        let actor = cfsm::explore::actor(&p, &e.action);
        for (j, (&a, &b)) in from.composite().iter().zip(to.composite()).enumerate() {
            if j != actor {
                assert_eq!(a, b);
            }
        }
        assert!(p.machines[actor]
            .transitions
            .iter()
            .any(|t| t.from == from.composite()[actor]
                && t.to == to.composite()[actor]
                && t.action == e.action));
        for c in 0..p.channels.len() {
            if c != e.action.channel {
                assert_eq!(from.channel(c), to.channel(c));
            }
        }
        let path = sg.path_to(e.to as usize);
        assert_eq!(path.last().map(|l| l.to), if e.to == 0 { None } else { Some(e.to) });
    }
}

#[test]
fn blocked_channel_on_terminal_state() {
    let text = "protocol stuck\nnode p\nnode q\nchannel c from p to q\nchannel r from q to p\n\
        alphabet c m\nalphabet r n\n\
        machine p start 0\ntrans p 0 -m@c 1\n\
        machine q start 0\n";
    let p = parse_protocol(text).unwrap();
    let sg = reach(&p, &Budget::default(), None);
    let b = blocked_channels(&sg, &p);
    assert_eq!(b, vec![(1, 0, BlockVerdict::Blocked)]);
    let wf = well_formed(&sg, &p);
    assert_eq!(wf.holds, Verdict::No);
    assert!(to_dot(&p, &sg).contains("-m@c"));
}

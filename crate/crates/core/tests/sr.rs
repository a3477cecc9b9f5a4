use cfsm::explore::{reach, Budget, Verdict};
use cfsm::gen::{mirrored_pair, random_sr_machine, sr_pair, SrShape};
use cfsm::model::{classify, Action, Dir, Machine};
use cfsm::sr::{
    decide_affine_deadlock, growth_bound, home_cycle_projections, project, receive_cycles,
    send_cycles,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Rows = Vec<(usize, bool, usize, usize)>;

fn rows(seed: u64) -> (Rows, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = rng.gen_range(1..=2);
    let shape = SrShape {
        states: rng.gen_range(2..=4),
        symbols,
        extra: rng.gen_range(0..=4),
    };
    (random_sr_machine(&mut rng, shape), symbols)
}

/// Every path of `n` transitions from any state contains a move in `dir`.
fn paths_contain(m: &Machine, n: usize, dir: Dir) -> bool {
    fn go(m: &Machine, q: u32, left: usize, dir: Dir) -> bool {
        if left == 0 {
            return false;
        }
        m.outgoing(q)
            .all(|t| t.action.dir == dir || go(m, t.to, left - 1, dir))
    }
    (0..m.num_states() as u32).all(|q| m.outgoing(q).next().is_none() || go(m, q, n, dir))
}

#[test]
fn mirrored_pairs_are_affine_and_bounded() {
    for seed in 0..20 {
        let (r, k) = rows(seed);
        let p = mirrored_pair(&r, k);
        assert!(classify(&p).is_sr_pair, "seed {seed}");
        assert!(send_cycles(&p.machines[0]).is_empty() && send_cycles(&p.machines[1]).is_empty());
        let rep = decide_affine_deadlock(&p, &Budget::default()).unwrap();
        assert_eq!(rep.affine, Verdict::Yes, "seed {seed}: {:?}", rep.rationale);
        assert_eq!(rep.bounded, Verdict::Yes);
        assert!(receive_cycles(&p.machines[1]).is_empty());
    }
}

#[test]
fn growth_threshold_not_reached_on_mirrored_pairs() {
    for seed in 100..120 {
        let (r, k) = rows(seed);
        let p = mirrored_pair(&r, k);
        let t = growth_bound(&p).unwrap();
        let sg = reach(&p, &Budget::with_channel_cap(t), None);
        assert!(sg.exhausted);
        assert!(!sg.states().any(|g| g.channel(0).len() >= t && g.channel(1).is_empty()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_distributes(a in prop::collection::vec((0usize..2, 0u32..3, any::<bool>()), 0..8),
                              b in prop::collection::vec((0usize..2, 0u32..3, any::<bool>()), 0..8)) {
        let mk = |v: &[(usize, u32, bool)]| -> Vec<Action> {
            v.iter().map(|&(c, s, snd)| if snd { Action::send(c, s) } else { Action::recv(c, s) }).collect()
        };
        let (u, v) = (mk(&a), mk(&b));
        let uv: Vec<Action> = u.iter().chain(v.iter()).copied().collect();
        for ch in 0..2 {
            let mut joined = project(&u, ch);
            joined.extend(project(&v, ch));
            prop_assert_eq!(project(&uv, ch), joined);
        }
    }

    #[test]
    fn no_send_cycle_means_receives_recur(seed in any::<u64>()) {
        let (r, k) = rows(seed);
        let p = mirrored_pair(&r, k);
        for m in &p.machines {
            let n = m.num_states() + 1;
            prop_assert_eq!(send_cycles(m).is_empty(), paths_contain(m, n, Dir::Recv));
            prop_assert_eq!(receive_cycles(m).is_empty(), paths_contain(m, n, Dir::Send));
        }
    }

    #[test]
    fn affinity_agrees_with_bounded_enumeration(s0 in any::<u64>(), s1 in any::<u64>()) {
        let (r0, k) = rows(s0);
        let (mut r1, _) = rows(s1);
        // Node 1 sends where the generator says send; reuse the symbol range.
        for row in &mut r1 { row.2 %= k; }
        let p = sr_pair(&r0, &r1, k);
        prop_assume!(classify(&p).is_sr_pair);
        let rep = decide_affine_deadlock(&p, &Budget::default()).unwrap();
        let z0 = home_cycle_projections(&p.machines[0], 2, 8);
        let z1 = home_cycle_projections(&p.machines[1], 2, 8);
        if z0 != z1 {
            prop_assert_ne!(rep.affine, Verdict::Yes, "{:?}", rep.rationale);
        }
        if rep.affine == Verdict::Yes {
            prop_assert!(receive_cycles(&p.machines[1]).is_empty() || !send_cycles(&p.machines[0]).is_empty());
        }
    }

    #[test]
    fn perturbed_mirror_matches_enumeration(seed in any::<u64>(), pick in any::<usize>()) {
        let (r, k) = rows(seed);
        prop_assume!(k == 2);
        let mut m: Rows = r.iter().map(|&(f, s, y, t)| (f, !s, y, t)).collect();
        let i = pick % m.len();
        m[i].2 = 1 - m[i].2;
        let p = sr_pair(&r, &m, k);
        prop_assume!(classify(&p).is_sr_pair);
        let rep = decide_affine_deadlock(&p, &Budget::default()).unwrap();
        let z0 = home_cycle_projections(&p.machines[0], 2, 8);
        let z1 = home_cycle_projections(&p.machines[1], 2, 8);
        if z0 != z1 {
            prop_assert_ne!(rep.affine, Verdict::Yes);
        } else {
            prop_assert_ne!(rep.affine, Verdict::No, "{:?}", rep.rationale);
        }
    }

    #[test]
    fn long_channel_implies_long_channel_with_other_empty(seed in any::<u64>(), s1 in any::<u64>()) {
        let (r0, k) = rows(seed);
        let (mut r1, _) = rows(s1);
        for row in &mut r1 { row.2 %= k; }
        let p = sr_pair(&r0, &r1, k);
        let sg = reach(&p, &Budget { max_states: Some(20_000), ..Budget::with_channel_cap(6) }, None);
        prop_assume!(sg.exhausted);
        for g in sg.states() {
            let len = g.channel(0).len();
            let p0 = g.composite()[0];
            prop_assert!(sg.states().any(|h| h.composite()[0] == p0 && h.channel(1).is_empty() && h.channel(0).len() >= len));
        }
    }
}

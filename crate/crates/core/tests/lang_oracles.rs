//! Regular languages and recognizable relations checked against brute force.

mod common;

use common::*;

use cfsm::lang::{parse_regex, Dfa, RecRel, Regex, Sym};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn documented_examples() {
    let db = alphabet(&["d", "b"]);
    let d = parse_regex("(d)*", &db).unwrap();
    let dd = Dfa::compile(&d, db.clone());
    assert_eq!(dd.num_states(), 2);
    for w in all_words(2, 4) {
        assert_eq!(dd.accepts(&w), w.iter().all(|&s| s == 0));
    }
    assert_eq!(Dfa::compile(&Regex::Empty, db.clone()).num_states(), 1);

    let ab = alphabet(&["a", "b"]);
    let r = parse_regex("a | b . b", &ab).unwrap();
    let members: Vec<Vec<Sym>> = Dfa::compile(&r, ab.clone()).members_up_to(3);
    assert_eq!(members, vec![vec![0], vec![1, 1]]);

    let ded = alphabet(&["ED", "EV"]);
    let eds = Dfa::compile(&parse_regex("ED*", &ded).unwrap(), ded.clone());
    assert!(eds.accepts(&[]) && eds.accepts(&[0]) && eds.accepts(&[0, 0]));

    let dstar = Dfa::compile(&parse_regex("d*", &db).unwrap(), db.clone());
    let dstarb = Dfa::compile(&parse_regex("d* . b", &db).unwrap(), db.clone());
    assert_eq!(dstar.inclusion_witness(&dstarb).unwrap(), Some(vec![1]));
    assert!(Dfa::universal(db.clone()).includes(&dstarb).unwrap());
    assert!(dstar.left_quotient_symbol(1).is_empty());

    let dsbs = Dfa::compile(&parse_regex("d* . b*", &db).unwrap(), db.clone());
    assert!(dsbs.left_quotient_language(&dstar).unwrap().equivalent(&dsbs).unwrap());
    let two = Dfa::word(ded.clone(), &[0, 0]);
    let q = two.left_quotient_language(&eds).unwrap();
    assert_eq!(q.members_up_to(4), vec![vec![], vec![0], vec![0, 0]]);

    let ev = Dfa::compile(&parse_regex("EV*", &ded).unwrap(), ded.clone());
    let evp = Dfa::compile(&parse_regex("EV . EV*", &ded).unwrap(), ded.clone());
    assert!(ev.append_symbol(1).equivalent(&evp).unwrap());
}

#[test]
fn relation_examples() {
    let chans = [
        alphabet(&["ED", "EV", "OD"]),
        alphabet(&["EDb", "EVb", "ODb"]),
        alphabet(&["EDA", "EVA", "ODA"]),
        alphabet(&["EDAd", "EVAd", "ODAd"]),
    ];
    let row = RecRel::parse("(ED*, EDb*, EDA*, EDAd*)", &chans).unwrap();
    assert!(row.member(&[vec![0], vec![0], vec![0], vec![]]).unwrap());
    let q = row.quotient_channel(0, 0).unwrap();
    assert!(q.member(&[vec![], vec![0], vec![0], vec![]]).unwrap());
    assert!(RecRel::full(&chans).includes(&row).unwrap());

    // Length-two contents with a one-sided cap.
    let dra = [alphabet(&["D", "R", "A"]), alphabet(&["Db", "Rb", "Ab"])];
    let l1 = "(D | R | A)";
    let l1b = "(Db | Rb | Ab)";
    let text = format!("({l1} . {l1}, eps) + ({l1}, {l1b}) + (eps, {l1b} . {l1b})");
    let r = RecRel::parse(&text, &dra).unwrap();
    assert_eq!(r.members_up_to(2).len(), 27);
    let cut = r
        .restrict_lengths(&[vec![Some(1), None], vec![None, Some(1)]])
        .unwrap();
    assert_eq!(cut.members_up_to(2).len(), 27);
    let tight = r.restrict_lengths(&[vec![Some(1), Some(1)]]).unwrap();
    assert_eq!(tight.members_up_to(2).len(), 9);
}

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compile_matches_recursive_oracle(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let k = rng.gen_range(1..=3);
        let names: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
        let a = alphabet(&names.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        let r = random_regex(&mut rng, k, 4);
        let d = Dfa::compile(&r, a.clone());
        for w in all_words(k, 6) {
            prop_assert_eq!(d.accepts(&w), regex_matches(&r, &w));
        }
        let printed = r.display(&a).to_string();
        let back = parse_regex(&printed, &a).unwrap();
        prop_assert!(Dfa::compile(&back, a.clone()).equivalent(&d).unwrap());
        prop_assert!(d.minimize().equivalent(&d).unwrap());
        let re = d.to_regex();
        prop_assert!(Dfa::compile(&re, a.clone()).equivalent(&d).unwrap());
    }

    #[test]
    fn inclusion_agrees_with_complement(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = alphabet(&["x", "y"]);
        let p = compile(&random_regex(&mut rng, 2, 4), &a);
        let q = compile(&random_regex(&mut rng, 2, 4), &a);
        let via_ops = p.complement().intersect(&q).unwrap().is_empty();
        prop_assert_eq!(p.includes(&q).unwrap(), via_ops);
        let brute = all_words(2, 6).iter().all(|w| !q.accepts(w) || p.accepts(w));
        if !brute {
            prop_assert!(!p.includes(&q).unwrap());
        }
        if let Some(w) = p.inclusion_witness(&q).unwrap() {
            prop_assert!(q.accepts(&w) && !p.accepts(&w));
        }
    }

    #[test]
    fn quotient_and_append_identities(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = alphabet(&["x", "y", "z"]);
        let r = random_regex(&mut rng, 3, 4);
        let l = compile(&r, &a);
        let b = rng.gen_range(0..3);
        let c = rng.gen_range(0..3);
        let bl = compile(&Regex::concat(Regex::Sym(b), r.clone()), &a);
        prop_assert!(bl.left_quotient_symbol(b).equivalent(&l).unwrap());
        let qa = l.append_symbol(c).left_quotient_symbol(b);
        for w in all_words(3, 5) {
            let mut bw = vec![b];
            bw.extend(&w);
            let brute = bw.last() == Some(&c) && l.accepts(&bw[..bw.len() - 1]);
            prop_assert_eq!(qa.accepts(&w), brute);
            let mut wc = w.clone();
            wc.push(c);
            prop_assert_eq!(l.append_symbol(c).accepts(&wc), l.accepts(&w));
        }
        // q_b(L·c) = q_b(L)·c, plus λ when b = c and λ ∈ L.
        let mut rhs = l.left_quotient_symbol(b).append_symbol(c);
        if b == c && l.accepts_epsilon() {
            rhs = rhs.union(&Dfa::epsilon(a.clone())).unwrap();
        }
        prop_assert!(qa.equivalent(&rhs).unwrap());
        let x = compile(&random_regex(&mut rng, 3, 3), &a);
        let lq = l.left_quotient_language(&x).unwrap();
        let xs: Vec<Vec<Sym>> = x.members_up_to(3);
        for y in all_words(3, 3) {
            let brute = xs.iter().any(|u| {
                let mut uy = u.clone();
                uy.extend(&y);
                l.accepts(&uy)
            });
            if brute {
                prop_assert!(lq.accepts(&y));
            }
        }
    }

    #[test]
    fn relation_round_trip_and_boolean_ops(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let chans = [alphabet(&["a", "b"]), alphabet(&["c", "d"])];
        let (r, rt) = random_relation(&mut rng, &chans, 3);
        let (s, st) = random_relation(&mut rng, &chans, 3);
        let back = RecRel::parse(&r.to_expression(), &chans).unwrap();
        prop_assert_eq!(&back, &r);
        let prods = RecRel::from_products(&chans, &r.to_products()).unwrap();
        prop_assert_eq!(&prods, &r);
        let u = r.union(&s).unwrap();
        let i = r.intersect(&s).unwrap();
        let d = r.difference(&s).unwrap();
        let c = r.complement().unwrap();
        let mut sub = true;
        for v in all_vectors(&[2, 2], 3) {
            let (mr, ms) = (terms_member(&rt, &v), terms_member(&st, &v));
            prop_assert_eq!(r.member(&v).unwrap(), mr);
            prop_assert_eq!(u.member(&v).unwrap(), mr || ms);
            prop_assert_eq!(i.member(&v).unwrap(), mr && ms);
            prop_assert_eq!(d.member(&v).unwrap(), mr && !ms);
            prop_assert_eq!(c.member(&v).unwrap(), !mr);
            sub &= !ms || mr;
        }
        if !sub {
            prop_assert!(!r.includes(&s).unwrap());
        }
        if let Some(w) = r.inclusion_witness(&s).unwrap() {
            prop_assert!(s.member(&w).unwrap() && !r.member(&w).unwrap());
        }
        prop_assert!(u.includes(&r).unwrap() && u.includes(&s).unwrap());
        prop_assert!(r.includes(&i).unwrap());
    }

    #[test]
    fn relation_channel_transforms(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let chans = [alphabet(&["a", "b"]), alphabet(&["c", "d"])];
        let (r, _) = random_relation(&mut rng, &chans, 3);
        let ch = rng.gen_range(0..2);
        let b = rng.gen_range(0..2);
        let q = r.quotient_channel(ch, b).unwrap();
        let ap = r.append_channel(ch, b).unwrap();
        let caps: Vec<Option<usize>> = (0..2).map(|_| {
            if rng.gen_bool(0.5) { Some(rng.gen_range(0..3)) } else { None }
        }).collect();
        let caps2: Vec<Option<usize>> = caps.iter().rev().cloned().collect();
        let cut = r.restrict_lengths(&[caps.clone(), caps2.clone()]).unwrap();
        for v in all_vectors(&[2, 2], 3) {
            let mut bv = v.clone();
            bv[ch].insert(0, b);
            prop_assert_eq!(q.member(&v).unwrap(), r.member(&bv).unwrap());
            let mut vb = v.clone();
            vb[ch].push(b);
            prop_assert_eq!(ap.member(&vb).unwrap(), r.member(&v).unwrap());
            if v[ch].last() != Some(&b) {
                prop_assert!(!ap.member(&v).unwrap());
            }
            let fits = |cs: &[Option<usize>]| v.iter().zip(cs).all(|(w, c)| c.is_none_or(|n| w.len() <= n));
            prop_assert_eq!(cut.member(&v).unwrap(), r.member(&v).unwrap() && (fits(&caps) || fits(&caps2)));
        }
        let qa = ap.quotient_channel(ch, b).unwrap();
        for v in all_vectors(&[2, 2], 2) {
            let mut bv = v.clone();
            bv[ch].insert(0, b);
            let brute = bv[ch].last() == Some(&b) && {
                bv[ch].pop();
                r.member(&bv).unwrap()
            };
            prop_assert_eq!(qa.member(&v).unwrap(), brute);
        }
        let x = compile(&random_regex(&mut rng, 2, 3), &chans[ch]);
        let lq = r.quotient_channel_language(ch, &x).unwrap();
        let xs = x.members_up_to(3);
        for v in all_vectors(&[2, 2], 2) {
            let brute = xs.iter().any(|u| {
                let mut uv = v.clone();
                let mut w = u.clone();
                w.extend(&v[ch]);
                uv[ch] = w;
                r.member(&uv).unwrap()
            });
            if brute {
                prop_assert!(lq.member(&v).unwrap());
            }
        }
    }

    #[test]
    fn minus_quotient_on_finite_relations(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let chans = [alphabet(&["a", "b"]), alphabet(&["c", "d"])];
        let finite = |rng: &mut ChaCha8Rng| loop {
            let r = random_regex(rng, 2, 3);
            if !format!("{:?}", r).contains("Star") {
                return r;
            }
        };
        let terms: Vec<Vec<Regex>> = (0..rng.gen_range(1..3))
            .map(|_| vec![finite(&mut rng), random_regex(&mut rng, 2, 3)])
            .collect();
        let l = RecRel::from_regex_terms(&chans, &terms).unwrap();
        let r = compile(&random_regex(&mut rng, 2, 3), &chans[0]);
        let m = RecRel::minus_quotient(&l, &r).unwrap();
        let zs = all_words(2, 8);
        for v in all_vectors(&[2, 2], 2) {
            let brute = zs.iter().any(|z| {
                let mut zx = z.clone();
                zx.extend(&v[0]);
                r.accepts(&zx) && l.member(&[z.clone(), v[1].clone()]).unwrap()
            });
            prop_assert_eq!(m.member(&v).unwrap(), brute);
        }
    }
}

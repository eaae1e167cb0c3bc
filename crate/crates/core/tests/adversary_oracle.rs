mod common;

use cap_core::adversary::BUILTINS;
use cap_core::oracle::{
    classify, find_special_pair, letter_pairs, pair_step, special_pair_product, Family, Witness,
};
use cap_core::index::is_special_pair;
use cap_core::{AdversaryAutomaton, Lasso, Letter, Word};
use common::*;
use num_bigint::BigUint;
use std::collections::BTreeMap;

fn sample(stream: u64, alphabet: &[Letter], n: usize) -> Vec<Lasso> {
    let mut r = rng(stream);
    (0..n).map(|_| random_lasso(&mut r, alphabet, 4, 3)).collect()
}

fn alphabet_of(name: &str) -> &'static [Letter] {
    if name == "S2" {
        &Letter::ALL
    } else {
        &Letter::GAMMA
    }
}

#[test]
fn builtin_membership() {
    for (i, (name, _)) in BUILTINS.iter().enumerate() {
        let a = adv(name);
        for l in sample(i as u64, alphabet_of(name), 200) {
            assert_eq!(a.contains(&l).unwrap(), builtin_member(name, &l), "{name} {l}");
        }
    }
}

#[test]
fn boolean_operations_sample() {
    let gamma: Vec<&str> = BUILTINS.iter().map(|b| b.0).filter(|&n| n != "S2").collect();
    for (i, &x) in gamma.iter().enumerate() {
        let a = adv(x);
        let not_a = a.complement();
        let lassos = sample(100 + i as u64, &Letter::GAMMA, 200);
        for l in &lassos {
            assert_eq!(not_a.contains(l).unwrap(), !builtin_member(x, l), "not {x} {l}");
        }
        for &y in &gamma {
            let b = adv(y);
            let both = a.intersect(&b).unwrap();
            let either = a.union(&b).unwrap();
            for l in lassos.iter().take(50) {
                let (p, q) = (builtin_member(x, l), builtin_member(y, l));
                assert_eq!(both.contains(l).unwrap(), p && q, "{x} & {y} {l}");
                assert_eq!(either.contains(l).unwrap(), p || q, "{x} | {y} {l}");
            }
        }
    }
}

#[test]
fn fairness_machine() {
    let f = AdversaryAutomaton::fairness();
    for l in sample(7, &Letter::GAMMA, 500) {
        assert_eq!(f.contains(&l).unwrap(), fair_ref(&l), "{l}");
        assert_eq!(l.is_fair(), fair_ref(&l), "{l}");
    }
}

#[test]
fn difference_membership() {
    let mut r = rng(11);
    for _ in 0..30 {
        let (text, excluded) = random_difference(&mut r);
        let a = adv(&text);
        let mut probes = sample(12, &Letter::GAMMA, 60);
        probes.extend(excluded.iter().cloned());
        for l in probes {
            assert_eq!(a.contains(&l).unwrap(), !excluded.contains(&l), "{text} {l}");
        }
    }
}

#[test]
fn emptiness() {
    let r1 = adv("R1");
    assert!(r1.complement().is_empty().is_none());
    assert!(adv("S0").intersect(&adv("TW").complement()).unwrap().is_empty().is_none());
    assert!(adv("TW").intersect(&adv("S0").complement()).unwrap().is_empty().is_some());
    let tw_tb = adv("TW").intersect(&adv("TB")).unwrap();
    assert_eq!(tw_tb.is_empty(), Some(l("(OK)^w")));
    for (name, _) in BUILTINS {
        let a = adv(name);
        for m in [a.clone(), a.complement()] {
            if let Some(w) = m.is_empty() {
                assert!(m.contains(&w).unwrap(), "{name}: {w}");
            }
        }
    }
}

#[test]
fn prefix_sets_are_monotone() {
    for (name, _) in BUILTINS {
        let a = adv(name);
        let mut previous = a.prefixes(0).unwrap();
        for r in 1..=5 {
            let next = a.prefixes(r).unwrap();
            for w in &next {
                assert!(previous.contains(&w.prefix(r - 1)), "{name} {w}");
            }
            previous = next;
        }
    }
}

/// `ind(w') - ind(w)` over every prefix, if it stays in {0, 1}.
fn brute_difference(w: &Word, w2: &Word) -> Option<u8> {
    let mut d = 0;
    for k in 1..=w.len() {
        let (a, b) = (ind_ref(&w.letters()[..k]), ind_ref(&w2.letters()[..k]));
        if b < a || &b - &a > BigUint::from(1u32) {
            return None;
        }
        d = if a == b { 0 } else { 1 };
    }
    Some(d)
}

#[test]
fn pair_machine_matches_brute_force() {
    let full = adv("R1");
    let product = special_pair_product(&full).unwrap();
    let live = product.live_states();
    for r in 1..=5 {
        let words = gamma_words(r);
        for w in &words {
            for w2 in &words {
                let expected = brute_difference(w, w2);
                let mut state = Some((0u8, false));
                let mut q = product.initial();
                for (&a, &b) in w.letters().iter().zip(w2.letters()) {
                    state = state.and_then(|(d, odd)| pair_step(d, odd, a, b));
                    q = product.step(q, (a, b)).unwrap();
                }
                let odd = ind_ref(w.letters()).bit(0);
                assert_eq!(state, expected.map(|d| (d, odd)), "{w} / {w2}");
                assert_eq!(live[q], expected.is_some(), "{w} / {w2}");
            }
        }
    }
    assert_eq!(product.symbols().len(), letter_pairs().len());
}

/// Lassos with the same limit: prefix indexes within one of each other.
fn same_limit_ref(a: &Lasso, b: &Lasso) -> bool {
    (1..=48).all(|r| {
        let (x, y) = (ind_ref(a.prefix(r).letters()), ind_ref(b.prefix(r).letters()));
        let d = if x > y { x - y } else { y - x };
        d <= BigUint::from(1u32)
    })
}

fn solvable_ref(excluded: &[Lasso]) -> bool {
    let corner = |l: &Lasso| *l == Lasso::constant(Letter::Lb) || *l == Lasso::constant(Letter::Lw);
    excluded.iter().any(|e| fair_ref(e) || corner(e))
        || excluded.iter().enumerate().any(|(i, a)| {
            excluded[i + 1..].iter().any(|b| same_limit_ref(a, b))
        })
}

fn check_witness(a: &AdversaryAutomaton, w: &Witness) {
    match w {
        Witness::Fair { lasso } => {
            assert!(fair_ref(lasso) && !a.contains(lasso).unwrap(), "{lasso}");
        }
        Witness::Corner { lasso } => {
            assert!(!a.contains(lasso).unwrap());
            assert_eq!(lasso.stem().len() + lasso.cycle().len(), 1);
        }
        Witness::SpecialPair { first, second } => {
            assert!(is_special_pair(first, second));
            assert!(!a.contains(first).unwrap() && !a.contains(second).unwrap());
        }
    }
}

#[test]
fn random_differences_agree_with_reference() {
    let mut r = rng(12);
    let mut by_outcome = BTreeMap::new();
    for _ in 0..50 {
        let (text, excluded) = random_difference(&mut r);
        let a = adv(&text);
        let v = classify(&a).unwrap();
        assert_eq!(v.solvable, solvable_ref(&excluded), "{text}");
        assert_eq!(v.solvable, v.witness.is_some());
        if let Some(w) = &v.witness {
            check_witness(&a, w);
        }
        *by_outcome.entry(v.solvable).or_insert(0) += 1;
    }
    // the sample exercises both verdicts
    assert_eq!(by_outcome.len(), 2, "{by_outcome:?}");
}

#[test]
fn builtin_witnesses() {
    for (name, _) in BUILTINS.iter().filter(|b| b.0 != "S2") {
        let a = adv(name);
        let v = classify(&a).unwrap();
        if let Some(w) = &v.witness {
            check_witness(&a, w);
        }
    }
    let pair = adv("GAMMA^w \\ { OK (LW)^w , LB (LW)^w }");
    let (x, y) = find_special_pair(&adv("R1")).unwrap().unwrap();
    assert!(is_special_pair(&x, &y));
    assert_eq!(classify(&pair).unwrap().families, vec![Family::F2]);
}

#[test]
fn monotone_along_inclusions() {
    let chain = ["S0", "TW", "S1", "R1"];
    for pair in chain.windows(2) {
        let (small, big) = (adv(pair[0]), adv(pair[1]));
        assert!(small.intersect(&big.complement()).unwrap().is_empty().is_none());
        let v = classify(&big).unwrap();
        if let Some(Witness::Fair { lasso }) = &v.witness {
            assert!(!small.contains(lasso).unwrap());
            assert!(classify(&small).unwrap().solvable, "{}", pair[0]);
        }
    }
}

mod common;

use cap_core::bivalency::{find_decisive, ExploreConfig, Unrolling, Valency};
use cap_core::protocol::{
    simulate, verify, AlgW, Bit, ConsensusAlgorithm, FixedRound, Property, Transcript, VerifyConfig,
    INPUTS,
};
use cap_core::{Lasso, Letter, Word};
use common::*;
use num_bigint::BigUint;

/// Index of each process after `r` rounds (initial state for `r = 0`).
fn inds(t: &Transcript, r: usize) -> [BigUint; 2] {
    let s = if r == 0 { &t.initial } else { &t.records[r - 1].states };
    [s[0].ind.clone(), s[1].ind.clone()]
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a > b {
        a - b
    } else {
        b - a
    }
}

fn check_indexes(t: &Transcript) {
    for (k, rec) in t.records.iter().enumerate() {
        let [w, b] = &rec.states;
        if w.halted || b.halted {
            break;
        }
        let v = ind_ref(t.scenario.prefix(k + 1).letters());
        let even = !v.bit(0);
        assert_eq!(abs_diff(&w.ind, &b.ind), BigUint::from(1u32), "{}", t.scenario);
        assert_eq!(b.ind > w.ind, even, "{} round {}", t.scenario, k + 1);
        assert_eq!(w.ind.clone().min(b.ind.clone()), v, "{}", t.scenario);
    }
}

#[test]
fn indexes_track_the_scenario() {
    let algs: Vec<Box<dyn ConsensusAlgorithm>> = vec![
        Box::new(FixedRound { rounds: 6 }),
        Box::new(AlgW::new(l("LW LB (OK)^w")).unwrap()),
    ];
    for alg in &algs {
        for r in 0..=5 {
            for p in gamma_words(r) {
                for tail in [Letter::Ok, Letter::Lw, Letter::Lb] {
                    let s = Lasso::constant(tail).prepend(&p);
                    for inputs in INPUTS {
                        check_indexes(&simulate(alg.as_ref(), &s, inputs, 8));
                    }
                }
            }
        }
    }
}

fn halting_sides(t: &Transcript, w: &Lasso) -> Vec<bool> {
    let mut sides = Vec::new();
    for i in 0..2 {
        if let Some(r) = t.outcome.halting_rounds[i] {
            let iw = ind_ref(w.prefix(r).letters());
            let ind = &inds(t, r)[i];
            assert_ne!(*ind, iw);
            sides.push(*ind < iw);
        }
    }
    sides
}

#[test]
fn exit_sides_and_halting_gap() {
    let cases = [
        ("C1", "(LW LB)^w"),
        ("S1", "(LW LB)^w"),
        ("GAMMA^w \\ { LW LB (OK)^w }", "LW LB (OK)^w"),
        ("GAMMA^w \\ { OK (LW)^w , LB (LW)^w }", "OK (LW)^w"),
    ];
    for (text, w) in cases {
        let a = adv(text);
        let w = l(w);
        let alg = AlgW::new(w.clone()).unwrap();
        for s in VerifyConfig::new(4).scenarios(&a).unwrap() {
            for inputs in INPUTS {
                let t = simulate(&alg, &s, inputs, 60);
                assert!(t.outcome.terminated && t.outcome.fault.is_none(), "{text} {s}");
                let sides = halting_sides(&t, &w);
                assert!(sides.windows(2).all(|p| p[0] == p[1]), "{text} {s} {inputs:?}");
                let hr = t.outcome.halting_rounds.map(Option::unwrap);
                let first = hr[0].min(hr[1]);
                let late = if hr[0] > hr[1] { 0 } else { 1 };
                let iw = ind_ref(w.prefix(first).letters());
                let ind = &inds(&t, first)[late];
                if hr[late] > first && abs_diff(ind, &iw) == BigUint::from(2u32) {
                    assert!(hr[late] <= first + 1, "{text} {s} {inputs:?}");
                }
            }
        }
    }
}

#[test]
fn runs_on_the_excluded_word_stay_close() {
    for w in ["LW LB (OK)^w", "(LW LB)^w", "OK (LW)^w", "(OK LW LB)^w"] {
        let w = l(w);
        let t = simulate(&AlgW::new(w.clone()).unwrap(), &w, [0, 1], 200);
        assert_eq!(t.outcome.halting_rounds, [None, None]);
        assert_eq!(t.records.len(), 200);
        for r in 0..=200 {
            let iw = ind_ref(w.prefix(r).letters());
            for ind in inds(&t, r) {
                assert!(abs_diff(&ind, &iw) <= BigUint::from(2u32), "{w} round {r}");
            }
        }
    }
}

#[test]
fn no_process_outputs_a_missing_value() {
    for (text, w) in [("C1", "(LW LB)^w"), ("R1", "(OK)^w"), ("TW", "(LB)^w"), ("S0", "(LW)^w")] {
        let alg = AlgW::new(l(w)).unwrap();
        let report = verify(&alg, &adv(text), &VerifyConfig::new(3)).unwrap();
        assert!(report.violations.iter().all(|v| v.property != Property::Fault), "{text}");
    }
}

fn walk(u: &Unrolling, v: &Word, seen: &mut Vec<(Word, Valency)>) {
    let val = u.valency(v).unwrap().valency;
    seen.push((v.clone(), val));
    let children = u.children(v);
    let child_vals: Vec<Valency> = children.iter().map(|c| u.valency(c).unwrap().valency).collect();
    match val {
        Valency::ZeroValent => assert!(!child_vals.contains(&Valency::OneValent), "{v}"),
        Valency::OneValent => assert!(!child_vals.contains(&Valency::ZeroValent), "{v}"),
        Valency::Bivalent if !children.is_empty() => {
            let split = child_vals.contains(&Valency::Bivalent)
                || (child_vals.contains(&Valency::ZeroValent) && child_vals.contains(&Valency::OneValent))
                || child_vals.contains(&Valency::Undetermined);
            assert!(split, "{v}");
        }
        _ => {}
    }
    for c in children {
        walk(u, &c, seen);
    }
}

#[test]
fn valencies_are_consistent() {
    let cfg = ExploreConfig::new(4);
    for (text, w) in [
        ("C1", "(LW LB)^w"),
        ("GAMMA^w \\ { LW LB (OK)^w }", "LW LB (OK)^w"),
        ("R1", "(OK)^w"),
    ] {
        let a = adv(text);
        let alg = AlgW::new(l(w)).unwrap();
        for inputs in INPUTS {
            let u = Unrolling::new(&alg, &a, &Word::empty(), inputs, &cfg).unwrap();
            let mut seen = Vec::new();
            walk(&u, &Word::empty(), &mut seen);
            if text != "R1" {
                // a correct algorithm leaves nothing undetermined
                assert!(seen.iter().all(|(_, v)| *v != Valency::Undetermined), "{text}");
            }
            let unanimous: Option<Bit> = (inputs[0] == inputs[1]).then_some(inputs[0]);
            if let (Some(b), true) = (unanimous, text != "R1") {
                let want = if b == 0 { Valency::ZeroValent } else { Valency::OneValent };
                assert!(seen.iter().all(|(_, v)| *v == want), "{text} {inputs:?}");
            }
        }
        let search = find_decisive(&alg, &a, [0, 1], &cfg).unwrap();
        if text == "C1" {
            assert_eq!(search.decisive, vec![Word::empty()]);
        }
    }
}

//! Reference implementations used as oracles by the integration tests.
//! They are written independently of the library code they check.
#![allow(dead_code)]

use cap_core::{parse_adversary, AdversaryAutomaton, Lasso, Letter, Word};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_cafe;

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

/// Index by the leading letter: Γ^r is laid out as three blocks of 3^(r-1)
/// words (LB, OK, LW), the middle block in reversed order.
pub fn ind_ref(w: &[Letter]) -> BigUint {
    let Some((&first, rest)) = w.split_first() else {
        return BigUint::zero();
    };
    let block = BigUint::from(3u32).pow(rest.len() as u32);
    let inner = ind_ref(rest);
    match first {
        Letter::Lb => inner,
        Letter::Ok => &block + (&block - BigUint::one() - inner),
        Letter::Lw => block * 2u32 + inner,
        Letter::Ll => panic!("LL has no index"),
    }
}

pub fn gamma_words(r: usize) -> Vec<Word> {
    Word::all_of_length(&Letter::GAMMA, r)
}

/// Both processes hear from each other infinitely often.
pub fn fair_ref(l: &Lasso) -> bool {
    let c = l.cycle().letters();
    let white_heard = c.iter().any(|&a| a == Letter::Ok || a == Letter::Lb);
    let black_heard = c.iter().any(|&a| a == Letter::Ok || a == Letter::Lw);
    white_heard && black_heard
}

/// Every letter occurring infinitely often or at all, in first-occurrence order.
pub fn occurring(l: &Lasso) -> Vec<Letter> {
    let mut v: Vec<Letter> = l.stem().letters().to_vec();
    v.extend_from_slice(l.cycle().letters());
    v.sort();
    v.dedup();
    v
}

pub fn random_word(rng: &mut impl Rng, alphabet: &[Letter], max: usize, min: usize) -> Word {
    let n = rng.gen_range(min..=max);
    Word::new((0..n).map(|_| *alphabet.choose(rng).unwrap()).collect())
}

pub fn random_lasso(rng: &mut impl Rng, alphabet: &[Letter], stem: usize, cycle: usize) -> Lasso {
    let s = random_word(rng, alphabet, stem, 0);
    let c = random_word(rng, alphabet, cycle, 1);
    Lasso::new(s, c).unwrap()
}

/// `GAMMA^w \ {…}` with 1 to 3 excluded lassos (stem ≤ 3, cycle ≤ 2).
pub fn random_difference(rng: &mut impl Rng) -> (String, Vec<Lasso>) {
    let n = rng.gen_range(1..=3);
    let mut excluded: Vec<Lasso> = (0..n)
        .map(|_| random_lasso(rng, &Letter::GAMMA, 3, 2))
        .collect();
    excluded.sort();
    excluded.dedup();
    let list: Vec<String> = excluded.iter().map(|l| l.to_string()).collect();
    (format!("GAMMA^w \\ {{ {} }}", list.join(" , ")), excluded)
}

pub fn adv(text: &str) -> AdversaryAutomaton {
    AdversaryAutomaton::from_dsl(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Membership for the built-ins, by their definitions.
pub fn builtin_member(name: &str, l: &Lasso) -> bool {
    let letters = occurring(l);
    let within = |set: &[Letter]| letters.iter().all(|a| set.contains(a));
    let cyc = l.cycle().letters();
    match name {
        "S0" => within(&[Letter::Ok]),
        "TW" => within(&[Letter::Ok, Letter::Lw]),
        "TB" => within(&[Letter::Ok, Letter::Lb]),
        "S1" => within(&[Letter::Ok, Letter::Lw]) || within(&[Letter::Ok, Letter::Lb]),
        "R1" => within(&Letter::GAMMA),
        "S2" => true,
        "C1" => {
            // OK^ω, or OK* followed by LW^ω or LB^ω
            let stem_ok = l.stem().letters().iter().all(|&a| a == Letter::Ok);
            stem_ok && cyc.len() == 1 && cyc[0] != Letter::Ll
        }
        _ => panic!("unknown built-in {name}"),
    }
}

pub fn parse(text: &str) -> cap_core::AdversaryExpr {
    parse_adversary(text).unwrap()
}

pub fn l(text: &str) -> Lasso {
    cap_core::parse_lasso(text).unwrap()
}

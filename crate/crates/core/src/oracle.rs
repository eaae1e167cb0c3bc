//! Solvability of consensus for a message adversary over Γ.
//!
//! An adversary `L ⊆ Γ^ω` is solvable iff it misses a fair word (F1), both
//! members of a special pair (F2), `LB^ω` (F3) or `LW^ω` (F4). Each check is
//! an emptiness query; non-empty answers come with witnesses.

use serde::Serialize;

use crate::adversary::{AdversaryAutomaton, Alphabet};
use crate::automaton::{Acceptance, Automaton};
use crate::error::{Error, Result};
use crate::index::{ind_limit, parity_step};
use crate::ternary::format_rational;
use crate::word::{Lasso, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    /// Some fair scenario is excluded.
    F1,
    /// Both members of some special pair are excluded.
    F2,
    /// `LB^ω` is excluded.
    F3,
    /// `LW^ω` is excluded.
    F4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Fair { lasso: Lasso },
    Corner { lasso: Lasso },
    SpecialPair { first: Lasso, second: Lasso },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub solvable: bool,
    pub families: Vec<Family>,
    pub witness: Option<Witness>,
    pub reason: String,
}

/// Symbols of the pair machine: `(a, a')` for the lower and upper word.
pub fn letter_pairs() -> Vec<(Letter, Letter)> {
    Letter::GAMMA
        .iter()
        .flat_map(|&a| Letter::GAMMA.iter().map(move |&b| (a, b)))
        .collect()
}

/// State of the special-pair machine after reading two words letterwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairState {
    /// `ind(w') - ind(w) = d ∈ {0, 1}`; `odd` is the parity of `ind(w)`.
    Tracking { q1: usize, q2: usize, d: u8, odd: bool },
    /// The difference left `{0, 1}`; it can never come back.
    Sink,
}

/// One step of the index-difference tracker, ignoring the automaton states.
/// Returns the new `(d, odd)` or `None` when the difference leaves `{0, 1}`.
pub fn pair_step(d: u8, odd: bool, a: Letter, b: Letter) -> Option<(u8, bool)> {
    use Letter::*;
    let next_odd = parity_step(odd, a).ok()?;
    let even = !odd;
    match d {
        0 if a == b => Some((0, next_odd)),
        0 => {
            let ok = if even {
                matches!((a, b), (Lb, Ok) | (Ok, Lw))
            } else {
                matches!((a, b), (Lw, Ok) | (Ok, Lb))
            };
            ok.then_some((1, next_odd))
        }
        _ => {
            let ok = a == b && ((even && a == Lw) || (!even && a == Lb));
            ok.then_some((1, next_odd))
        }
    }
}

/// Machine over letter pairs accepting `(w, w')` iff both are accepted by
/// `c`, `w ≠ w'`, and `ind(w'|r) - ind(w|r) ∈ {0, 1}` for every `r`.
/// Every special pair appears in exactly one orientation.
pub fn special_pair_product(c: &AdversaryAutomaton) -> Result<Automaton<(Letter, Letter)>> {
    if c.alphabet() != Alphabet::Gamma {
        return Err(Error::Unsupported("special pairs are defined over GAMMA".into()));
    }
    let m = c.machine();
    let t = m.tracks();
    let acceptance = Acceptance::And(vec![
        m.acceptance().clone(),
        m.acceptance().shift(t),
        Acceptance::Even(2 * t),
    ]);
    let start = PairState::Tracking {
        q1: m.initial(),
        q2: m.initial(),
        d: 0,
        odd: false,
    };
    Ok(Automaton::explore(letter_pairs(), 2 * t + 1, acceptance, start, |s, (a, b)| {
        match *s {
            PairState::Sink => (PairState::Sink, vec![1; 2 * t + 1]),
            PairState::Tracking { q1, q2, d, odd } => match pair_step(d, odd, a, b) {
                None => (PairState::Sink, vec![1; 2 * t + 1]),
                Some((d2, odd2)) => {
                    let (i, j) = (m.symbol_index(a).unwrap(), m.symbol_index(b).unwrap());
                    let mut colors = m.colors(q1, i).to_vec();
                    colors.extend_from_slice(m.colors(q2, j));
                    colors.push(if d2 == 1 { 0 } else { 1 });
                    let next = PairState::Tracking {
                        q1: m.next(q1, i),
                        q2: m.next(q2, j),
                        d: d2,
                        odd: odd2,
                    };
                    (next, colors)
                }
            },
        }
    }))
}

/// A special pair accepted by `c`, lower limit word first.
pub fn find_special_pair(c: &AdversaryAutomaton) -> Result<Option<(Lasso, Lasso)>> {
    let machine = special_pair_product(c)?;
    Ok(machine.find_accepted().map(|(stem, cycle)| {
        let unzip = |pick: fn(&(Letter, Letter)) -> Letter| {
            Lasso::new(
                Word::new(stem.iter().map(pick).collect()),
                Word::new(cycle.iter().map(pick).collect()),
            )
            .expect("non-empty cycle")
        };
        (unzip(|p| p.0), unzip(|p| p.1))
    }))
}

/// Decides solvability. Families are checked in the order F3, F4, F1, F2;
/// the reported witness prefers a fair word, then a corner, then a pair.
pub fn classify(a: &AdversaryAutomaton) -> Result<Verdict> {
    if a.alphabet() != Alphabet::Gamma {
        return Err(Error::Unsupported(
            "solvability is decided for adversaries over GAMMA only".into(),
        ));
    }
    let lb = Lasso::constant(Letter::Lb);
    let lw = Lasso::constant(Letter::Lw);
    let mut families = Vec::new();
    let mut corner = None;
    if !a.contains(&lb)? {
        families.push(Family::F3);
        corner = Some(lb);
    }
    if !a.contains(&lw)? {
        families.push(Family::F4);
        corner = corner.or(Some(lw));
    }
    let c = a.complement();
    let fair = c.intersect(&AdversaryAutomaton::fairness())?.is_empty();
    if fair.is_some() {
        families.push(Family::F1);
    }
    let pair = find_special_pair(&c)?;
    if pair.is_some() {
        families.push(Family::F2);
    }
    families.sort();

    let witness = if let Some(f) = fair {
        Some(Witness::Fair { lasso: f })
    } else if let Some(l) = corner {
        Some(Witness::Corner { lasso: l })
    } else {
        pair.map(|(first, second)| Witness::SpecialPair { first, second })
    };
    let reason = match &witness {
        None => "every fair scenario, both corner scenarios and at least one member of every \
                 special pair belong to the adversary"
            .to_string(),
        Some(Witness::Fair { lasso }) => format!("the fair scenario {lasso} is excluded"),
        Some(Witness::Corner { lasso }) => format!("the corner scenario {lasso} is excluded"),
        Some(Witness::SpecialPair { first, second }) => format!(
            "the special pair {first} / {second} (common limit index {}) is excluded",
            format_rational(&ind_limit(first)?)
        ),
    };
    Ok(Verdict {
        solvable: !families.is_empty(),
        families,
        witness,
        reason,
    })
}

/// The excluded scenario `w` used to instantiate the index-based algorithm.
pub fn select_forbidden_scenario(v: &Verdict) -> Result<Lasso> {
    match &v.witness {
        Some(Witness::Fair { lasso }) | Some(Witness::Corner { lasso }) => Ok(lasso.clone()),
        Some(Witness::SpecialPair { first, .. }) => Ok(first.clone()),
        None => Err(Error::domain("the adversary is an obstruction: no excluded scenario to use")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    /// Largest `r ≤ rmax` with `Pref_r(L) = Γ^r`: no algorithm decides in
    /// `r` rounds or fewer.
    pub rounds: usize,
    /// True when the bound reached `rmax`, so the real bound may be higher.
    pub saturated: bool,
}

/// Round lower bound from prefix inclusion of the full adversary `Γ^ω`.
pub fn round_lower_bound(a: &AdversaryAutomaton, rmax: usize) -> Result<LowerBound> {
    if rmax > 8 {
        return Err(Error::Range(format!("rmax {rmax} exceeds 8")));
    }
    if a.alphabet() != Alphabet::Gamma {
        return Err(Error::Unsupported("round bounds are computed over GAMMA only".into()));
    }
    let mut rounds = 0;
    for r in 1..=rmax {
        if a.prefixes(r)?.len() != 3usize.pow(r as u32) {
            break;
        }
        rounds = r;
    }
    Ok(LowerBound {
        rounds,
        saturated: rounds == rmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::is_special_pair;
    use crate::word::parse_lasso;

    fn adv(s: &str) -> AdversaryAutomaton {
        AdversaryAutomaton::from_dsl(s).unwrap()
    }

    fn l(s: &str) -> Lasso {
        parse_lasso(s).unwrap()
    }

    #[test]
    fn seven_cases() {
        for name in ["S0", "TW", "TB", "C1", "S1"] {
            assert!(classify(&adv(name)).unwrap().solvable, "{name}");
        }
        let r1 = classify(&adv("R1")).unwrap();
        assert!(!r1.solvable);
        assert!(r1.families.is_empty() && r1.witness.is_none());
        assert!(matches!(classify(&adv("S2")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn c1_has_fair_witness() {
        let v = classify(&adv("C1")).unwrap();
        let Some(Witness::Fair { lasso }) = &v.witness else {
            panic!("{v:?}")
        };
        assert!(lasso.is_fair());
        assert!(!adv("C1").contains(lasso).unwrap());
        assert_eq!(select_forbidden_scenario(&v).unwrap(), *lasso);
    }

    #[test]
    fn special_pair_exclusions() {
        let one = classify(&adv("GAMMA^w \\ { OK (LW)^w }")).unwrap();
        assert!(!one.solvable);
        let both = classify(&adv("GAMMA^w \\ { OK (LW)^w , LB (LW)^w }")).unwrap();
        assert_eq!(both.families, vec![Family::F2]);
        let Some(Witness::SpecialPair { first, second }) = &both.witness else {
            panic!()
        };
        assert!(is_special_pair(first, second));
        let mut pair = [first.clone(), second.clone()];
        pair.sort();
        assert_eq!(pair, [l("LB (LW)^w"), l("OK (LW)^w")]);
        let f = classify(&adv("GAMMA^w \\ { LW LB (OK)^w }")).unwrap();
        assert_eq!(f.families, vec![Family::F1]);
        assert_eq!(select_forbidden_scenario(&f).unwrap(), l("LW LB (OK)^w"));
        assert!(select_forbidden_scenario(&one).is_err());
    }

    #[test]
    fn corners() {
        let v = classify(&adv("GAMMA^w \\ { (LB)^w }")).unwrap();
        assert_eq!(v.families, vec![Family::F3]);
        assert_eq!(v.witness, Some(Witness::Corner { lasso: l("(LB)^w") }));
    }

    #[test]
    fn lower_bounds() {
        for (name, r) in [("C1", 1), ("S1", 1), ("S0", 0), ("TW", 0), ("TB", 0)] {
            let b = round_lower_bound(&adv(name), 4).unwrap();
            assert_eq!(b.rounds, r, "{name}");
            assert!(!b.saturated);
        }
        assert_eq!(
            round_lower_bound(&adv("R1"), 3).unwrap(),
            LowerBound { rounds: 3, saturated: true }
        );
        assert!(round_lower_bound(&adv("R1"), 9).is_err());
    }

    #[test]
    fn empty_complement_has_no_pairs() {
        assert!(find_special_pair(&adv("R1").complement()).unwrap().is_none());
    }
}

//! Compilation of adversary expressions into deterministic automata.
//!
//! Everything is built over all four letters and restricted to Γ at the end
//! when the expression does not mention LL.

use std::collections::HashSet;

use super::dsl::{AdversaryExpr, Alphabet};
use super::regex::Regex;
use crate::automaton::{Acceptance, Automaton};
use crate::error::Result;
use crate::word::{Lasso, Letter};

pub(crate) type Machine = Automaton<Letter>;

/// `A^ω` over the given symbols: one accepting loop and a rejecting sink.
pub(crate) fn omega_power(symbols: &[Letter], set: &[Letter]) -> Machine {
    Automaton::explore(symbols.to_vec(), 1, Acceptance::parity(), true, |&ok, a| {
        let stay = ok && set.contains(&a);
        (stay, vec![if stay { 0 } else { 1 }])
    })
}

/// Exactly one infinite word.
pub(crate) fn singleton(symbols: &[Letter], l: &Lasso) -> Machine {
    let s = l.stem().len();
    let c = l.cycle().len();
    Automaton::explore(symbols.to_vec(), 1, Acceptance::parity(), Some(0usize), |pos, a| match *pos {
        Some(i) if l.letter(i) == a => {
            let next = if i + 1 == s + c { s } else { i + 1 };
            (Some(next), vec![0])
        }
        _ => (None, vec![1]),
    })
}

/// Fair words over Γ: OK infinitely often, or both LW and LB infinitely often.
pub(crate) fn fairness() -> Machine {
    Automaton::explore(Letter::GAMMA.to_vec(), 1, Acceptance::parity(), Letter::Ok, |&last, a| {
        let good = a == Letter::Ok
            || (a == Letter::Lw && last == Letter::Lb)
            || (a == Letter::Lb && last == Letter::Lw);
        (a, vec![if good { 2 } else { 1 }])
    })
}

/// `R · E` by tracking, in order of age, the distinct states of every run
/// of `E` started after a word of `R`. Two runs reaching the same state
/// merge into the older one. The word is accepted iff for some position the
/// run occupying it eventually stays the same (its reset track is
/// eventually 0) and that run is accepting.
fn concat(r: &Regex, e: &Machine) -> Machine {
    let dfa = r.to_dfa();
    let live = e.live_states();
    let slots = e.num_states();
    let te = e.tracks();
    let width = 1 + te;
    let acceptance = Acceptance::Or(
        (0..slots)
            .map(|i| {
                Acceptance::And(vec![
                    Acceptance::Even(i * width),
                    e.acceptance().shift(i * width + 1),
                ])
            })
            .collect(),
    );
    let start_threads = if dfa.accepting[dfa.start] && live[e.initial()] {
        vec![e.initial()]
    } else {
        vec![]
    };
    Automaton::explore(
        e.symbols().to_vec(),
        slots * width,
        acceptance,
        (dfa.start, start_threads),
        |(q, threads), a| {
            let sym = e.symbol_index(a).unwrap();
            let q2 = dfa.step(*q, a);
            let mut next: Vec<usize> = Vec::with_capacity(threads.len() + 1);
            let mut origin: Vec<Option<usize>> = Vec::new();
            let mut colors = vec![0u32; slots * width];
            for (k, &t) in threads.iter().enumerate() {
                let t2 = e.next(t, sym);
                if !live[t2] || next.contains(&t2) {
                    continue;
                }
                let i = next.len();
                colors[i * width + 1..(i + 1) * width].copy_from_slice(e.colors(t, sym));
                next.push(t2);
                origin.push(Some(k));
            }
            if dfa.accepting[q2] && live[e.initial()] && !next.contains(&e.initial()) {
                next.push(e.initial());
                origin.push(None);
            }
            for i in 0..slots {
                let same = i < next.len() && origin[i] == Some(i);
                colors[i * width] = if same { 0 } else { 1 };
            }
            ((q2, next), colors)
        },
    )
}

fn build(expr: &AdversaryExpr) -> Result<Machine> {
    let all = &Letter::ALL;
    Ok(match expr {
        AdversaryExpr::OmegaPower(set) => omega_power(all, set),
        AdversaryExpr::Singleton(l) => singleton(all, l),
        AdversaryExpr::Concat(r, e) => concat(r, &build(e)?),
        AdversaryExpr::Union(v) => {
            let mut it = v.iter();
            let first = it.next().map(build).transpose()?;
            let mut acc = first.unwrap_or_else(|| omega_power(all, &[]));
            for e in it {
                acc = acc.union(&build(e)?)?;
            }
            acc
        }
        AdversaryExpr::DifferenceFromFull { alphabet, excluded } => {
            let mut acc = omega_power(all, alphabet.letters());
            let mut seen = HashSet::new();
            for l in excluded {
                if seen.insert(l) {
                    acc = acc.intersect(&singleton(all, l).complement())?;
                }
            }
            acc
        }
        AdversaryExpr::Named(_) => build(&expr.expand())?,
    })
}

pub(crate) fn compile_machine(expr: &AdversaryExpr) -> Result<(Machine, Alphabet)> {
    let alphabet = expr.alphabet()?;
    let m = build(expr)?;
    let m = match alphabet {
        Alphabet::Gamma => m.restrict(&Letter::GAMMA)?,
        Alphabet::G2 => m,
    };
    Ok((m, alphabet))
}

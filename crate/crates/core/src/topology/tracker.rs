//! Scenarios converging to a given point of `[0, 1]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::adversary::{AdversaryAutomaton, Alphabet};
use crate::automaton::{Acceptance, Automaton};
use crate::error::{Error, Result};
use crate::index::parity_step;
use crate::ternary::format_rational;
use crate::word::{Lasso, Letter};

/// Safety automaton over Γ accepting exactly the scenarios whose limit index
/// is `z`: every prefix interval must contain `z`.
///
/// The state is `t = 3^r·z - ind(w|r)` (kept as a numerator over the
/// denominator of `z`) together with the parity of the index; it stays in
/// `[0, 1]` as long as the interval contains `z`.
pub fn z_tracker(z: &BigRational) -> Result<AdversaryAutomaton> {
    if z.is_negative() || z > &BigRational::one() {
        return Err(Error::Range(format!("{} is outside [0,1]", format_rational(z))));
    }
    let q = z.denom().clone();
    let start = Some((z.numer().clone(), false));
    let machine = Automaton::explore(
        Letter::GAMMA.to_vec(),
        1,
        Acceptance::Even(0),
        start,
        |s: &Option<(BigInt, bool)>, a| {
            let Some((m, odd)) = s else {
                return (None, vec![1]);
            };
            let mu = a.mu().expect("GAMMA letter");
            let j = if *odd { 1 - mu } else { 1 + mu };
            let m2: BigInt = m * BigInt::from(3) - BigInt::from(j) * &q;
            if m2.is_negative() || m2 > q {
                return (None, vec![1]);
            }
            (Some((m2, parity_step(*odd, a).expect("GAMMA letter"))), vec![0])
        },
    );
    Ok(AdversaryAutomaton::from_machine(
        machine,
        Alphabet::Gamma,
        format!("limit({})", format_rational(z)),
    ))
}

/// All scenarios with limit index `z` (at most two), sorted.
pub fn preimages(z: &BigRational) -> Result<Vec<Lasso>> {
    let t = z_tracker(z)?;
    let mut out = Vec::new();
    if let Some(first) = t.is_empty() {
        let rest = t.intersect(&AdversaryAutomaton::singleton(&first).complement())?;
        out.push(first);
        out.extend(rest.is_empty());
    }
    out.sort();
    Ok(out)
}

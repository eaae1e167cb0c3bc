//! The scenario index: an integer encoding of Γ-words that maps `Γ^r`
//! bijectively onto `0..3^r`, its normalization into `[0, 1]`, and exact
//! limits for lasso words.
//!
//! The recurrence is `ind(ε) = 0`, `ind(ua) = 3·ind(u) + (-1)^ind(u)·μ(a) + 1`
//! with `μ(LB) = -1`, `μ(OK) = 0`, `μ(LW) = 1`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ternary::{pow3, pow3_int, Ternary};
use crate::word::{Lasso, Letter, ProcessId, Word};

fn mu(letter: Letter) -> Result<i8> {
    letter
        .mu()
        .ok_or_else(|| Error::domain("the index is only defined on words without LL"))
}

/// One step of the index recurrence.
pub fn index_step(i: &BigUint, letter: Letter) -> Result<BigUint> {
    let m = mu(letter)?;
    let base = i * 3u32 + 1u32;
    let signed = if i.is_odd() { -m } else { m };
    Ok(match signed {
        1 => base + 1u32,
        -1 => base - 1u32,
        _ => base,
    })
}

/// Parity of the index after one step, from the parity before it.
pub fn parity_step(odd: bool, letter: Letter) -> Result<bool> {
    let m = mu(letter)?;
    // 3i + (±μ) + 1 ≡ i + |μ| + 1 (mod 2)
    Ok(odd ^ (m == 0))
}

/// `ind(w)`.
pub fn ind(w: &Word) -> Result<BigUint> {
    w.letters()
        .iter()
        .try_fold(BigUint::zero(), |i, &a| index_step(&i, a))
}

/// Indexes of all prefixes `w|0, w|1, …, w|len`.
pub fn prefix_indexes(w: &Word) -> Result<Vec<BigUint>> {
    let mut out = Vec::with_capacity(w.len() + 1);
    let mut i = BigUint::zero();
    out.push(i.clone());
    for &a in w.letters() {
        i = index_step(&i, a)?;
        out.push(i.clone());
    }
    Ok(out)
}

/// The unique `w ∈ Γ^r` with `ind(w) = k`.
pub fn ind_inverse(r: usize, k: &BigUint) -> Result<Word> {
    let bound = pow3(r as u32);
    if k >= &bound {
        return Err(Error::Range(format!("index {k} is not below 3^{r} = {bound}")));
    }
    let mut letters = Vec::with_capacity(r);
    let mut k = k.clone();
    for _ in 0..r {
        let (u, rho) = k.div_rem(&BigUint::from(3u32));
        let s = rho.to_i8().unwrap() - 1;
        let m = if u.is_odd() { -s } else { s };
        letters.push(match m {
            -1 => Letter::Lb,
            0 => Letter::Ok,
            _ => Letter::Lw,
        });
        k = u;
    }
    debug_assert!(k.is_zero());
    letters.reverse();
    Ok(Word::new(letters))
}

/// `ind(w) / 3^len(w)`.
pub fn ind_normalized(w: &Word) -> Result<Ternary> {
    Ok(Ternary::new(BigInt::from(ind(w)?), w.len() as u32))
}

/// The affine effect of reading the whole cycle once, from a start index of
/// the given parity: `i ↦ 3^|cycle|·i + offset`, plus the end parity.
fn cycle_map(cycle: &Word, odd: bool) -> Result<(BigUint, bool)> {
    let start = if odd { BigUint::one() } else { BigUint::zero() };
    let mut i = start.clone();
    for &a in cycle.letters() {
        i = index_step(&i, a)?;
    }
    let offset = &i - start * pow3(cycle.len() as u32);
    Ok((offset, i.is_odd()))
}

/// Exact limit of `ind_normalized` over the prefixes of a lasso.
///
/// The per-cycle map only depends on the parity at the start of the cycle, so
/// after at most two traversals the parity sequence is periodic and the tail
/// is a geometric series.
pub fn ind_limit(l: &Lasso) -> Result<BigRational> {
    let mut i = ind(l.stem())?;
    let mut len = l.stem().len() as u32;
    let c = l.cycle().len() as u32;

    let p0 = i.is_odd();
    let (off0, p1) = cycle_map(l.cycle(), p0)?;
    let (factor, offset) = if p1 == p0 {
        (pow3(c), off0)
    } else {
        let (off1, p2) = cycle_map(l.cycle(), p1)?;
        if p2 == p0 {
            (pow3(2 * c), &off0 * pow3(c) + off1)
        } else {
            // p2 == p1: one traversal of pre-period, then period one.
            i = &i * pow3(c) + off0;
            len += c;
            (pow3(c), off1)
        }
    };
    let head = BigRational::new(BigInt::from(i), pow3_int(len));
    let tail = BigRational::new(
        BigInt::from(offset),
        pow3_int(len) * (BigInt::from(factor) - 1),
    );
    Ok(head + tail)
}

/// Which arithmetic case makes `ind(v') = ind(v) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessorKind {
    /// `v = ua`, `v' = ua'`: the words differ only in the last letter.
    SamePrefix,
    /// `v = ua`, `v' = u'a` with `ind(u') = ind(u) + 1`.
    SameLastLetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuccessorCase {
    pub kind: SuccessorKind,
    /// Parity of `ind(v)`, the lower of the two indexes.
    pub lower_even: bool,
    /// Parity of `ind(u)` for the common (or lower) prefix `u`.
    pub prefix_even: bool,
    /// Last letters of `v` and `v'`.
    pub last: (Letter, Letter),
}

/// Same-prefix transitions: `(ind(u) even?, a, a')` with `ind(ua') = ind(ua) + 1`.
fn same_prefix_step(prefix_even: bool, a: Letter, b: Letter) -> bool {
    use Letter::*;
    match prefix_even {
        true => matches!((a, b), (Lb, Ok) | (Ok, Lw)),
        false => matches!((a, b), (Lw, Ok) | (Ok, Lb)),
    }
}

/// Shared-last-letter transitions preserve a difference of one only with LW
/// after an even prefix index and LB after an odd one.
fn shared_letter_step(prefix_even: bool, a: Letter) -> bool {
    (prefix_even && a == Letter::Lw) || (!prefix_even && a == Letter::Lb)
}

/// Decides `ind(v2) = ind(v) + 1` letter by letter and reports the case that
/// applies to the last letter.
pub fn is_index_successor(v: &Word, v2: &Word) -> Result<Option<SuccessorCase>> {
    if v.len() != v2.len() {
        return Err(Error::domain(format!(
            "words of different lengths ({} and {})",
            v.len(),
            v2.len()
        )));
    }
    if !v.is_gamma() || !v2.is_gamma() {
        return Err(Error::domain("the index is only defined on words without LL"));
    }
    let (a, b) = (v.letters(), v2.letters());
    let r = a.len();
    let Some(split) = (0..r).find(|&k| a[k] != b[k]) else {
        return Ok(None);
    };
    // parity of ind(v|k) for k = 0..=r
    let mut even = Vec::with_capacity(r + 1);
    let mut odd = false;
    even.push(true);
    for &x in a {
        odd = parity_step(odd, x)?;
        even.push(!odd);
    }
    if !same_prefix_step(even[split], a[split], b[split]) {
        return Ok(None);
    }
    for k in split + 1..r {
        if a[k] != b[k] || !shared_letter_step(even[k], a[k]) {
            return Ok(None);
        }
    }
    let kind = if split == r - 1 {
        SuccessorKind::SamePrefix
    } else {
        SuccessorKind::SameLastLetter
    };
    Ok(Some(SuccessorCase {
        kind,
        lower_even: even[r],
        prefix_even: even[r - 1],
        last: (a[r - 1], b[r - 1]),
    }))
}

/// The process whose full-information state is identical after `v` and `v2`
/// when `ind(v2) = ind(v) + 1`: black if `ind(v)` is even, white otherwise.
pub fn indistinguishable_process(v: &Word, v2: &Word) -> Result<ProcessId> {
    let case = is_index_successor(v, v2)?.ok_or_else(|| {
        Error::domain(format!("ind({v2}) is not ind({v}) + 1"))
    })?;
    Ok(if case.lower_even {
        ProcessId::Black
    } else {
        ProcessId::White
    })
}

/// Two distinct lassos with the same limit index. Exact, since equal limits
/// characterize pairs whose prefix indexes never differ by more than one.
pub fn is_special_pair(l1: &Lasso, l2: &Lasso) -> bool {
    if l1 == l2 || !l1.is_gamma() || !l2.is_gamma() {
        return false;
    }
    match (ind_limit(l1), ind_limit(l2)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

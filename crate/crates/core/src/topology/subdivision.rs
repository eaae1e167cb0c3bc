//! Terminating subdivisions of the unit segment around a gap point, the
//! radius map η and the `Finished` predicate of the topological algorithm.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::complex::{Complex, Edge, Segment};
use super::tracker::z_tracker;
use crate::adversary::AdversaryAutomaton;
use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::index::{ind, ind_inverse};
use crate::ternary::{format_rational, rational_str, Ternary};
use crate::word::{Letter, Word};

/// Deepest level a subdivision will materialize.
pub const MAX_LEVEL: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableEdge {
    pub word: Word,
    pub level: usize,
    pub lo: Ternary,
    pub hi: Ternary,
}

impl StableEdge {
    fn of_word(word: Word) -> Result<Self> {
        let i = BigInt::from(ind(&word)?);
        let level = word.len();
        Ok(StableEdge {
            lo: Ternary::new(i.clone(), level as u32),
            hi: Ternary::new(i + 1, level as u32),
            word,
            level,
        })
    }

    fn contains(&self, p: &BigRational) -> bool {
        &self.lo.to_rational() <= p && p <= &self.hi.to_rational()
    }
}

#[derive(Debug, Clone)]
struct Builder {
    machine: Automaton<Letter>,
    live: Vec<bool>,
    /// Words of the current depth whose closed interval contains `z`,
    /// with their automaton state.
    frontier: Vec<(Word, usize)>,
}

/// Stable edges by level (`levels[k-1]` is Σ_k), either generated lazily
/// from an adversary and a gap point or given explicitly.
#[derive(Debug, Clone)]
pub struct TerminatingSubdivision {
    z: Option<BigRational>,
    levels: Vec<Vec<StableEdge>>,
    accumulation: Vec<BigRational>,
    builder: Option<Builder>,
}

impl TerminatingSubdivision {
    /// Σ_k holds the edges of `Pref_k(a)` whose closed interval avoids `z`
    /// while their parent's contains it. Fails when some scenario of `a`
    /// converges to `z`.
    pub fn build(a: &AdversaryAutomaton, z: &BigRational) -> Result<Self> {
        if a.alphabet() != crate::adversary::Alphabet::Gamma {
            return Err(Error::Unsupported("subdivisions are built over GAMMA only".into()));
        }
        let tracker = z_tracker(z)?;
        if let Some(l) = a.intersect(&tracker)?.is_empty() {
            return Err(Error::domain(format!(
                "{} is not a gap point: the scenario {l} converges to it",
                format_rational(z)
            )));
        }
        let machine = a.machine().clone();
        let live = machine.live_states();
        let frontier = if live[machine.initial()] {
            vec![(Word::empty(), machine.initial())]
        } else {
            Vec::new()
        };
        Ok(TerminatingSubdivision {
            z: Some(z.clone()),
            levels: Vec::new(),
            accumulation: vec![z.clone()],
            builder: Some(Builder {
                machine,
                live,
                frontier,
            }),
        })
    }

    /// A subdivision given level by level; nothing beyond is generated.
    pub fn from_levels(levels: Vec<Vec<StableEdge>>, accumulation: Vec<BigRational>) -> Self {
        TerminatingSubdivision {
            z: None,
            levels,
            accumulation,
            builder: None,
        }
    }

    pub fn z(&self) -> Option<&BigRational> {
        self.z.as_ref()
    }

    pub fn accumulation(&self) -> &[BigRational] {
        &self.accumulation
    }

    /// Levels available so far.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Generates levels up to `k`.
    pub fn materialize(&mut self, k: usize) -> Result<()> {
        if k > MAX_LEVEL {
            return Err(Error::Resource(format!("level {k} exceeds {MAX_LEVEL}")));
        }
        while self.levels.len() < k {
            let Some(b) = self.builder.as_mut() else {
                return Err(Error::Resource(format!(
                    "only {} levels are defined",
                    self.levels.len()
                )));
            };
            let z = self.z.as_ref().expect("generated subdivisions have a gap point");
            let mut stable = Vec::new();
            let mut frontier = Vec::new();
            for (w, q) in &b.frontier {
                for (i, &a) in b.machine.symbols().iter().enumerate() {
                    let q2 = b.machine.next(*q, i);
                    if !b.live[q2] {
                        continue;
                    }
                    let e = StableEdge::of_word(w.pushed(a))?;
                    if e.contains(z) {
                        frontier.push((e.word, q2));
                    } else {
                        stable.push(e);
                    }
                }
            }
            stable.sort_by(|x, y| x.lo.cmp(&y.lo));
            b.frontier = frontier;
            self.levels.push(stable);
        }
        Ok(())
    }

    /// Σ_k (empty for k = 0).
    pub fn level(&self, k: usize) -> Result<&[StableEdge]> {
        if k == 0 {
            return Ok(&[]);
        }
        self.levels
            .get(k - 1)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Resource(format!("level {k} is not materialized")))
    }

    /// Stable edges of levels `1..=r`.
    pub fn stable_edges(&self, r: usize) -> impl Iterator<Item = &StableEdge> {
        self.levels.iter().take(r).flatten()
    }

    /// `K_r` as a complex on the unit segment, edges tagged by level.
    pub fn complex(&self, r: usize) -> Complex {
        Complex {
            edges: self
                .stable_edges(r)
                .map(|e| Edge::new(Segment::Unit, e.lo.clone(), e.hi.clone()).with_level(e.level))
                .collect(),
            accumulation: self
                .accumulation
                .iter()
                .map(|p| (Segment::Unit, p.clone()))
                .collect(),
        }
    }

    /// Whether the stable words form an antichain for the prefix order.
    pub fn is_antichain(&self) -> bool {
        let words: Vec<&Word> = self.levels.iter().flatten().map(|e| &e.word).collect();
        words
            .iter()
            .enumerate()
            .all(|(i, u)| words.iter().enumerate().all(|(j, v)| i == j || !u.is_prefix_of(v)))
    }

    /// Whether `w` has a prefix of length `<= depth()` whose edge is stable.
    pub fn has_stable_prefix(&self, w: &Word) -> bool {
        (1..=self.depth().min(w.len())).any(|k| {
            let p = w.prefix(k);
            self.levels[k - 1].iter().any(|e| e.word == p)
        })
    }
}

/// The hand-coded subdivision whose stable edges cover `[0, 2/3)` and
/// `[2/3, 1]` without ever sharing the vertex 2/3: Σ_1 = {[0,1/3], [2/3,1]}
/// and, for r ≥ 2, the two level-r edges ending at `2/3 - 1/3^r`.
pub fn contrex(depth: usize) -> Result<TerminatingSubdivision> {
    if depth == 0 || depth > MAX_LEVEL {
        return Err(Error::Range(format!("depth must be in 1..={MAX_LEVEL}")));
    }
    let edge = |r: usize, k: BigInt| -> Result<StableEdge> {
        let k = k.to_biguint().expect("non-negative");
        StableEdge::of_word(ind_inverse(r, &k)?)
    };
    let mut levels = vec![vec![edge(1, BigInt::zero())?, edge(1, BigInt::from(2))?]];
    for r in 2..=depth {
        // 2/3 - 1/3^(r-1) = (2·3^(r-1) - 3)/3^r.
        let start: BigInt = BigInt::from(2) * crate::ternary::pow3_int(r as u32 - 1) - BigInt::from(3);
        levels.push(vec![edge(r, start.clone())?, edge(r, start + 1)?]);
    }
    let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
    Ok(TerminatingSubdivision::from_levels(levels, vec![two_thirds]))
}

/// The radius map of the topological algorithm.
///
/// Each stable vertex gets `min 1/3^(k+1)` over the levels `k` of the stable
/// edges it bounds. Points strictly inside a stable edge take the smaller
/// radius of its endpoints. When a gap point is known, every radius is further
/// capped by the largest power `3^-m` not exceeding half the distance to it,
/// so that no ball reaches the gap.
#[derive(Debug, Clone)]
pub struct Eta {
    z: Option<BigRational>,
    /// Vertex → (radius, first level at which it bounds a stable edge).
    radius: BTreeMap<Ternary, (Ternary, usize)>,
    /// Stable edges by lower end → (upper end, level).
    edges: BTreeMap<Ternary, Vec<(Ternary, usize)>>,
}

impl Eta {
    /// Radii from the materialized levels of `ts`.
    pub fn of(ts: &TerminatingSubdivision) -> Eta {
        let mut radius: BTreeMap<Ternary, (Ternary, usize)> = BTreeMap::new();
        let mut edges: BTreeMap<Ternary, Vec<(Ternary, usize)>> = BTreeMap::new();
        for e in ts.stable_edges(ts.depth()) {
            let r = Ternary::unit(e.level as u32 + 1);
            for v in [&e.lo, &e.hi] {
                radius
                    .entry(v.clone())
                    .and_modify(|(old, first)| {
                        if r < *old {
                            *old = r.clone();
                        }
                        *first = (*first).min(e.level);
                    })
                    .or_insert((r.clone(), e.level));
            }
            edges
                .entry(e.lo.clone())
                .or_default()
                .push((e.hi.clone(), e.level));
        }
        Eta {
            z: ts.z.clone(),
            radius,
            edges,
        }
    }

    /// Stable vertices with their radius, before capping.
    pub fn radii(&self) -> impl Iterator<Item = (&Ternary, &Ternary)> {
        self.radius.iter().map(|(v, (r, _))| (v, r))
    }

    pub fn radius(&self, v: &Ternary) -> Option<&Ternary> {
        self.radius.get(v).map(|(r, _)| r)
    }

    /// The stable edge of level `<= r` containing `y`, if any.
    fn edge_containing(&self, r: usize, y: &Ternary) -> Option<(&Ternary, &Ternary)> {
        self.edges.range(..=y.clone()).rev().take(2).find_map(|(lo, his)| {
            his.iter()
                .find(|(hi, level)| *level <= r && y <= hi)
                .map(|(hi, _)| (lo, hi))
        })
    }

    fn cap(&self, y: &Ternary) -> Option<Ternary> {
        let Some(z) = &self.z else {
            return Some(Ternary::one());
        };
        let d = (y.to_rational() - z).abs() / BigRational::from_integer(BigInt::from(2));
        Ternary::pow3_at_most(&d).map(Ternary::unit)
    }

    /// Radius at a point of `|K_r|`, `None` outside it or at the gap.
    pub fn at(&self, r: usize, y: &Ternary) -> Option<Ternary> {
        let (lo, hi) = self.edge_containing(r, y)?;
        let base = match self.radius.get(y) {
            Some((v, _)) => v.clone(),
            None => {
                let (a, b) = (&self.radius[lo].0, &self.radius[hi].0);
                a.min(b).clone()
            }
        };
        Some(base.min(self.cap(y)?))
    }

    /// Whether the closed ball of radius `3^-r` around `x`, intersected with
    /// `[0,1]`, lies in the open ball of radius `η(y)` around `y`.
    pub fn covers(&self, r: usize, x: &Ternary, y: &Ternary) -> bool {
        let Some(eta) = self.at(r, y) else {
            return false;
        };
        let step = Ternary::unit(r as u32);
        let lo = (x - &step).max(Ternary::zero());
        let hi = (x + &step).min(Ternary::one());
        y - &eta < lo && hi < y + &eta
    }

    /// A witness `y` for `Finished(r, x)`: a vertex of `Chr^r` inside `|K_r|`
    /// whose η-ball swallows the `3^-r`-ball around `x`. Candidates are `x`
    /// itself and the nearest stable vertices on either side of it.
    pub fn finished(&self, r: usize, x: &Ternary) -> Option<Ternary> {
        let mut candidates = vec![x.clone()];
        let first = |(v, (_, level)): (&Ternary, &(Ternary, usize))| (*level <= r).then(|| v.clone());
        candidates.extend(self.radius.range(..x.clone()).rev().find_map(first));
        candidates.extend(
            self.radius
                .range(x.clone()..)
                .filter(|(v, _)| *v != x)
                .find_map(first),
        );
        candidates.into_iter().find(|y| self.covers(r, x, y))
    }

    /// Whether `y` lies below the gap point (always true without one).
    pub fn below_gap(&self, y: &Ternary) -> bool {
        match &self.z {
            Some(z) => &y.to_rational() < z,
            None => true,
        }
    }
}

/// `Finished(r, x)` against a subdivision materialized to level `r`.
pub fn finished(r: usize, x: &Ternary, ts: &TerminatingSubdivision, eta: &Eta) -> Result<bool> {
    if ts.depth() < r {
        return Err(Error::Resource(format!(
            "subdivision materialized to level {} but round {r} was asked",
            ts.depth()
        )));
    }
    Ok(eta.finished(r, x).is_some())
}

/// JSON view of a subdivision.
#[derive(Serialize)]
pub(crate) struct SubdivisionDoc<'a> {
    pub schema_version: u32,
    pub kind: &'static str,
    #[serde(with = "option_rational")]
    pub z: Option<&'a BigRational>,
    pub accumulation: Vec<String>,
    pub levels: Vec<LevelDoc<'a>>,
}

#[derive(Serialize)]
pub(crate) struct LevelDoc<'a> {
    pub level: usize,
    pub edges: &'a [StableEdge],
}

mod option_rational {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(q: &Option<&BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match q {
            Some(q) => rational_str::serialize(q, s),
            None => s.serialize_none(),
        }
    }
}

impl TerminatingSubdivision {
    pub(crate) fn doc(&self) -> SubdivisionDoc<'_> {
        SubdivisionDoc {
            schema_version: crate::SCHEMA_VERSION,
            kind: "terminating_subdivision",
            z: self.z.as_ref(),
            accumulation: self.accumulation.iter().map(format_rational).collect(),
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(i, edges)| LevelDoc {
                    level: i + 1,
                    edges,
                })
                .collect(),
        }
    }
}

//! One-dimensional chromatic complexes on the unit segment or on the
//! input square (four segments glued at their corners).
//!
//! Positions follow the normalized index: on every segment, 0 is the white
//! corner and 1 the black corner, and a vertex at `k/3^r` is white iff `k`
//! is even.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::adversary::AdversaryAutomaton;
use crate::error::{Error, Result};
use crate::index::ind;
use crate::ternary::{pow3, Ternary};
use crate::word::{ProcessId, Word};

/// Carrier of a vertex or an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    Unit,
    /// The input edge joining white with input `iw` to black with input `ib`.
    Square { iw: u8, ib: u8 },
}

impl Segment {
    pub const SQUARE: [Segment; 4] = [
        Segment::Square { iw: 0, ib: 0 },
        Segment::Square { iw: 1, ib: 0 },
        Segment::Square { iw: 1, ib: 1 },
        Segment::Square { iw: 0, ib: 1 },
    ];

    pub fn label(self) -> String {
        match self {
            Segment::Unit => "unit".into(),
            Segment::Square { iw, ib } => format!("w{iw}b{ib}"),
        }
    }

    pub fn parse(s: &str) -> Option<Segment> {
        if s == "unit" {
            return Some(Segment::Unit);
        }
        let b = s.as_bytes();
        match b {
            [b'w', iw @ (b'0' | b'1'), b'b', ib @ (b'0' | b'1')] => Some(Segment::Square {
                iw: iw - b'0',
                ib: ib - b'0',
            }),
            _ => None,
        }
    }
}

/// Colour of the vertex at a position: white iff the reduced numerator is
/// even (dividing by 3 preserves parity).
pub fn color_at(position: &Ternary) -> ProcessId {
    if position.numerator().is_even() {
        ProcessId::White
    } else {
        ProcessId::Black
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Vertex {
    pub segment: Segment,
    pub position: Ternary,
    pub color: ProcessId,
}

impl Vertex {
    /// The representative of a vertex: square corners are shared by two
    /// segments and are named by the segment with the other input 0.
    pub fn canonical(segment: Segment, position: Ternary) -> Vertex {
        let segment = match segment {
            Segment::Square { iw, .. } if position.numerator().is_zero() => Segment::Square { iw, ib: 0 },
            Segment::Square { ib, .. } if position == Ternary::one() => Segment::Square { iw: 0, ib },
            s => s,
        };
        let color = color_at(&position);
        Vertex {
            segment,
            position,
            color,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub segment: Segment,
    pub lo: Ternary,
    pub hi: Ternary,
    /// Round at which the edge became stable, for subdivision edges.
    pub level: Option<usize>,
}

impl Edge {
    pub fn new(segment: Segment, lo: Ternary, hi: Ternary) -> Self {
        Edge {
            segment,
            lo,
            hi,
            level: None,
        }
    }

    pub fn with_level(mut self, level: usize) -> Self {
        self.level = Some(level);
        self
    }

    pub fn vertices(&self) -> [Vertex; 2] {
        [
            Vertex::canonical(self.segment, self.lo.clone()),
            Vertex::canonical(self.segment, self.hi.clone()),
        ]
    }

    pub fn is_chromatic(&self) -> bool {
        color_at(&self.lo) != color_at(&self.hi)
    }

    pub fn width(&self) -> Ternary {
        &self.hi - &self.lo
    }
}

/// A 1-dimensional complex given by its edges. `accumulation` lists limit
/// points of infinite edge families that the materialized edges approach;
/// it only matters for [`realization_components`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Complex {
    pub edges: BTreeSet<Edge>,
    pub accumulation: BTreeSet<(Segment, BigRational)>,
}

impl Complex {
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        Complex {
            edges: edges.into_iter().collect(),
            accumulation: BTreeSet::new(),
        }
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.edges.iter().flat_map(|e| e.vertices()).collect()
    }

    /// Every edge joins two colours.
    pub fn is_chromatic(&self) -> bool {
        self.edges.iter().all(Edge::is_chromatic)
    }

    /// Edges on the same segment meet at most in a shared endpoint.
    pub fn is_simplicial(&self) -> bool {
        let mut by_segment: BTreeMap<Segment, Vec<&Edge>> = BTreeMap::new();
        for e in &self.edges {
            by_segment.entry(e.segment).or_default().push(e);
        }
        by_segment.values().all(|v| {
            v.windows(2).all(|w| w[0].hi <= w[1].lo)
        })
    }
}

/// The unit segment: one edge from the white vertex 0 to the black vertex 1.
pub fn unit_segment() -> Complex {
    Complex::from_edges([Edge::new(Segment::Unit, Ternary::zero(), Ternary::one())])
}

/// The input complex of binary consensus: four edges glued at corners.
pub fn input_square() -> Complex {
    Complex::from_edges(
        Segment::SQUARE
            .iter()
            .map(|&s| Edge::new(s, Ternary::zero(), Ternary::one())),
    )
}

/// Chromatic subdivision: each edge `[a, b]` becomes three edges through
/// `a + (b-a)/3` (coloured like `b`) and `a + 2(b-a)/3` (coloured like `a`).
pub fn chr(c: &Complex) -> Complex {
    let third = Ternary::unit(1);
    let mut edges = BTreeSet::new();
    for e in &c.edges {
        let d = e.width();
        let step = Ternary::new(d.numerator().clone(), d.exponent() + third.exponent());
        let p1 = &e.lo + &step;
        let p2 = &p1 + &step;
        for (lo, hi) in [(e.lo.clone(), p1.clone()), (p1, p2.clone()), (p2, e.hi.clone())] {
            edges.insert(Edge::new(e.segment, lo, hi));
        }
    }
    Complex {
        edges,
        accumulation: c.accumulation.clone(),
    }
}

pub fn chr_power(c: &Complex, r: usize) -> Complex {
    (0..r).fold(c.clone(), |acc, _| chr(&acc))
}

/// `[ind(w)/3^r, (ind(w)+1)/3^r]` for `r = len(w)`.
pub fn word_to_edge(w: &Word) -> Result<(Ternary, Ternary)> {
    let i = BigInt::from(ind(w)?);
    let r = w.len() as u32;
    Ok((Ternary::new(i.clone(), r), Ternary::new(i + 1, r)))
}

/// The subcomplex of `Chr^r` of the input square whose edges are the
/// length-`r` prefixes of the adversary.
pub fn protocol_complex(a: &AdversaryAutomaton, r: usize) -> Result<Complex> {
    if r > 8 {
        return Err(Error::Resource(format!("protocol complex depth {r} exceeds 8")));
    }
    let mut edges = BTreeSet::new();
    for w in a.prefixes(r)? {
        let (lo, hi) = word_to_edge(&w)?;
        for &s in &Segment::SQUARE {
            edges.insert(Edge::new(s, lo.clone(), hi.clone()));
        }
    }
    Ok(Complex {
        edges,
        accumulation: BTreeSet::new(),
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a] = b;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// Connected components of the vertex/edge graph.
pub fn abstract_components(k: &Complex) -> usize {
    let vertices: Vec<Vertex> = k.vertices().into_iter().collect();
    let id: BTreeMap<&Vertex, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut uf = UnionFind::new(vertices.len());
    for e in &k.edges {
        let [a, b] = e.vertices();
        uf.union(id[&a], id[&b]);
    }
    uf.count()
}

/// Connected components of the geometric realization, with closures of
/// accumulating edge families: a gap of width at most `3^-(closure_depth-1)`
/// is bridged when one of its ends is an accumulation point that the
/// complex covers.
pub fn realization_components(k: &Complex, closure_depth: usize) -> usize {
    let limit = BigRational::new(BigInt::one(), BigInt::from(pow3(closure_depth.saturating_sub(1) as u32)));
    let mut by_segment: BTreeMap<Segment, Vec<(BigRational, BigRational)>> = BTreeMap::new();
    for e in &k.edges {
        by_segment
            .entry(e.segment)
            .or_default()
            .push((e.lo.to_rational(), e.hi.to_rational()));
    }
    // Merge touching intervals into blocks.
    let mut blocks: Vec<(Segment, BigRational, BigRational)> = Vec::new();
    for (seg, mut v) in by_segment {
        v.sort();
        let mut cur: Option<(BigRational, BigRational)> = None;
        for (lo, hi) in v {
            cur = match cur {
                Some((a, b)) if lo <= b => Some((a, b.max(hi))),
                Some((a, b)) => {
                    let bridged = &lo - &b <= limit
                        && (k.accumulation.contains(&(seg, b.clone()))
                            || k.accumulation.contains(&(seg, lo.clone())));
                    if bridged {
                        Some((a, hi))
                    } else {
                        blocks.push((seg, a, b));
                        Some((lo, hi))
                    }
                }
                None => Some((lo, hi)),
            };
        }
        if let Some((a, b)) = cur {
            blocks.push((seg, a, b));
        }
    }
    let mut uf = UnionFind::new(blocks.len());
    let mut corners: BTreeMap<Vertex, usize> = BTreeMap::new();
    let zero = BigRational::zero();
    let one = BigRational::one();
    for (i, (seg, a, b)) in blocks.iter().enumerate() {
        for (p, t) in [(a, Ternary::zero()), (b, Ternary::one())] {
            if (p == &zero && t == Ternary::zero()) || (p == &one && t == Ternary::one()) {
                let v = Vertex::canonical(*seg, t);
                match corners.get(&v) {
                    Some(&j) => uf.union(i, j),
                    None => {
                        corners.insert(v, i);
                    }
                }
            }
        }
    }
    uf.count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;

    fn t(p: i64, e: u32) -> Ternary {
        Ternary::new(p, e)
    }

    #[test]
    fn chr_of_segment() {
        let c = chr(&unit_segment());
        assert_eq!(c.edges.len(), 3);
        let colors: Vec<_> = c.vertices().iter().map(|v| v.color).collect();
        use ProcessId::*;
        assert_eq!(colors, vec![White, Black, White, Black]);
        assert_eq!(chr_power(&unit_segment(), 2).edges.len(), 9);
        let c3 = chr_power(&unit_segment(), 3);
        assert!(c3.is_chromatic() && c3.is_simplicial());
    }

    #[test]
    fn chr_of_square() {
        let s = input_square();
        assert_eq!(s.vertices().len(), 4);
        let c = chr(&s);
        assert_eq!(c.edges.len(), 12);
        assert_eq!(c.vertices().len(), 12);
        assert_eq!(abstract_components(&c), 1);
        assert_eq!(realization_components(&c, 1), 1);
    }

    #[test]
    fn edges_of_words() {
        assert_eq!(word_to_edge(&parse_word("LW").unwrap()).unwrap(), (t(2, 1), t(1, 0)));
        assert_eq!(word_to_edge(&parse_word("LW OK").unwrap()).unwrap(), (t(7, 2), t(8, 2)));
        assert_eq!(
            word_to_edge(&parse_word("LW OK LB").unwrap()).unwrap(),
            (t(23, 3), t(24, 3))
        );
    }

    #[test]
    fn protocol_complexes() {
        let r1 = AdversaryAutomaton::from_dsl("R1").unwrap();
        assert_eq!(protocol_complex(&r1, 1).unwrap(), chr(&input_square()));
        let s0 = AdversaryAutomaton::from_dsl("S0").unwrap();
        let p = protocol_complex(&s0, 2).unwrap();
        assert_eq!(p.edges.len(), 4);
        assert_eq!(abstract_components(&p), 4);
        assert!(protocol_complex(&r1, 9).is_err());
    }

    #[test]
    fn components() {
        let one = unit_segment();
        assert_eq!(abstract_components(&one), 1);
        assert_eq!(realization_components(&one, 3), 1);
        let two = Complex::from_edges([
            Edge::new(Segment::Unit, t(0, 0), t(1, 1)),
            Edge::new(Segment::Unit, t(2, 1), t(1, 0)),
        ]);
        assert_eq!(abstract_components(&two), 2);
        assert_eq!(realization_components(&two, 3), 2);
        assert_eq!(Segment::parse("w1b0"), Some(Segment::Square { iw: 1, ib: 0 }));
        assert_eq!(Segment::parse(&Segment::Unit.label()), Some(Segment::Unit));
    }
}

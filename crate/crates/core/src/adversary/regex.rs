//! Finite regular expressions over letters and their compilation to DFAs
//! (Thompson construction followed by the subset construction).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Regex {
    Epsilon,
    /// Any one letter of the set.
    Set(Vec<Letter>),
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn letter(a: Letter) -> Self {
        Regex::Set(vec![a])
    }

    pub fn word(w: &Word) -> Self {
        match w.len() {
            0 => Regex::Epsilon,
            1 => Regex::letter(w.letters()[0]),
            _ => Regex::Concat(w.letters().iter().map(|&a| Regex::letter(a)).collect()),
        }
    }

    /// Letters mentioned anywhere in the expression.
    pub fn letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<Letter>) {
        match self {
            Regex::Epsilon => {}
            Regex::Set(s) => out.extend(s.iter().copied()),
            Regex::Concat(v) | Regex::Union(v) => v.iter().for_each(|r| r.collect(out)),
            Regex::Star(r) => r.collect(out),
        }
    }

    /// The single word this expression denotes, if it is a plain
    /// concatenation of single letters.
    pub fn as_word(&self) -> Option<Word> {
        match self {
            Regex::Epsilon => Some(Word::empty()),
            Regex::Set(s) if s.len() == 1 => Some(Word::new(vec![s[0]])),
            Regex::Concat(v) => {
                let mut w = Word::empty();
                for r in v {
                    w = w.concat(&r.as_word()?);
                }
                Some(w)
            }
            _ => None,
        }
    }

    pub fn to_dfa(&self) -> Dfa {
        let mut nfa = Nfa::default();
        let start = nfa.add();
        let end = nfa.add();
        nfa.build(self, start, end);
        nfa.determinize(start, end)
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Regex::Epsilon => write!(f, "()"),
            Regex::Set(s) if s.len() == 1 => write!(f, "{}", s[0]),
            Regex::Set(s) => {
                write!(f, "{{")?;
                for (i, a) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "}}")
            }
            Regex::Concat(v) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                for (i, r) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    r.fmt_prec(f, 2)?;
                }
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Regex::Union(v) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                for (i, r) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    r.fmt_prec(f, 1)?;
                }
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Regex::Star(r) => {
                r.fmt_prec(f, 3)?;
                write!(f, "*")
            }
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Complete DFA over all four letters (indexed by `Letter::ALL` order).
#[derive(Debug, Clone)]
pub struct Dfa {
    pub start: usize,
    pub accepting: Vec<bool>,
    pub delta: Vec<[usize; 4]>,
}

impl Dfa {
    pub fn step(&self, q: usize, a: Letter) -> usize {
        self.delta[q][letter_slot(a)]
    }

    pub fn matches(&self, w: &Word) -> bool {
        let q = w.letters().iter().fold(self.start, |q, &a| self.step(q, a));
        self.accepting[q]
    }
}

pub(crate) fn letter_slot(a: Letter) -> usize {
    Letter::ALL.iter().position(|&x| x == a).unwrap()
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    edges: Vec<Vec<(Letter, usize)>>,
}

impl Nfa {
    fn add(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, r: &Regex, from: usize, to: usize) {
        match r {
            Regex::Epsilon => self.eps[from].push(to),
            Regex::Set(s) => {
                for &a in s {
                    self.edges[from].push((a, to));
                }
            }
            Regex::Concat(v) => {
                let mut cur = from;
                for (i, part) in v.iter().enumerate() {
                    let next = if i + 1 == v.len() { to } else { self.add() };
                    self.build(part, cur, next);
                    cur = next;
                }
                if v.is_empty() {
                    self.eps[from].push(to);
                }
            }
            Regex::Union(v) => {
                for part in v {
                    self.build(part, from, to);
                }
            }
            Regex::Star(inner) => {
                let hub = self.add();
                self.eps[from].push(hub);
                self.eps[hub].push(to);
                let back = self.add();
                self.build(inner, hub, back);
                self.eps[back].push(hub);
            }
        }
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &p in &self.eps[q] {
                if set.insert(p) {
                    stack.push(p);
                }
            }
        }
    }

    fn determinize(&self, start: usize, end: usize) -> Dfa {
        let mut first = BTreeSet::from([start]);
        self.closure(&mut first);
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::from([(first.clone(), 0)]);
        let mut sets = vec![first];
        let mut delta = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = [0usize; 4];
            for (slot, &a) in Letter::ALL.iter().enumerate() {
                let mut next: BTreeSet<usize> = sets[i]
                    .iter()
                    .flat_map(|&q| self.edges[q].iter())
                    .filter(|(b, _)| *b == a)
                    .map(|&(_, p)| p)
                    .collect();
                self.closure(&mut next);
                row[slot] = *ids.entry(next.clone()).or_insert_with(|| {
                    sets.push(next);
                    sets.len() - 1
                });
            }
            delta.push(row);
            i += 1;
        }
        let accepting = sets.iter().map(|s| s.contains(&end)).collect();
        Dfa {
            start: 0,
            accepting,
            delta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;
    use Letter::*;

    #[test]
    fn star_and_concat() {
        // OK* LW
        let r = Regex::Concat(vec![Regex::Star(Box::new(Regex::letter(Ok))), Regex::letter(Lw)]);
        let d = r.to_dfa();
        for (w, m) in [("LW", true), ("OK OK LW", true), ("", false), ("LW LW", false), ("OK", false)] {
            assert_eq!(d.matches(&parse_word(w).unwrap()), m, "{w}");
        }
    }

    #[test]
    fn union_and_epsilon() {
        let r = Regex::Union(vec![Regex::Epsilon, Regex::Set(vec![Lb, Ll])]);
        let d = r.to_dfa();
        assert!(d.matches(&Word::empty()));
        assert!(d.matches(&parse_word("LL").unwrap()));
        assert!(!d.matches(&parse_word("OK").unwrap()));
        assert_eq!(r.to_string(), "() | {LB,LL}");
    }
}

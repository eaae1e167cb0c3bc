//! Letters, finite words and ultimately periodic (lasso) words over the
//! per-round communication alphabet.
//!
//! Letter names: `OK` (both messages delivered), `LW` (white's message lost),
//! `LB` (black's message lost), `LL` (both lost). The three letters without
//! `LL` form the restricted alphabet Γ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One round of communication between the two processes.
///
/// The derived order `LB < OK < LW < LL` is the enumeration order used
/// everywhere output has to be deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Lb,
    Ok,
    Lw,
    Ll,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::Lb, Letter::Ok, Letter::Lw, Letter::Ll];
    pub const GAMMA: [Letter; 3] = [Letter::Lb, Letter::Ok, Letter::Lw];

    pub fn token(self) -> &'static str {
        match self {
            Letter::Lb => "LB",
            Letter::Ok => "OK",
            Letter::Lw => "LW",
            Letter::Ll => "LL",
        }
    }

    pub fn from_token(token: &str) -> Option<Letter> {
        match token {
            "LB" => Some(Letter::Lb),
            "OK" => Some(Letter::Ok),
            "LW" => Some(Letter::Lw),
            "LL" => Some(Letter::Ll),
            _ => None,
        }
    }

    pub fn is_gamma(self) -> bool {
        self != Letter::Ll
    }

    /// The signed weight used by the index recurrence: LB ↦ -1, OK ↦ 0, LW ↦ +1.
    pub fn mu(self) -> Option<i8> {
        match self {
            Letter::Lb => Some(-1),
            Letter::Ok => Some(0),
            Letter::Lw => Some(1),
            Letter::Ll => None,
        }
    }

    /// Whether white's message (white → black) gets through in this round.
    pub fn delivers_white(self) -> bool {
        matches!(self, Letter::Ok | Letter::Lb)
    }

    /// Whether black's message (black → white) gets through in this round.
    pub fn delivers_black(self) -> bool {
        matches!(self, Letter::Ok | Letter::Lw)
    }

    /// Exchanges the roles of the two processes.
    pub fn mirror(self) -> Letter {
        match self {
            Letter::Lb => Letter::Lw,
            Letter::Lw => Letter::Lb,
            other => other,
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Letter::from_token(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown letter \"{s}\"")))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The two processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProcessId {
    White,
    Black,
}

impl ProcessId {
    pub const BOTH: [ProcessId; 2] = [ProcessId::White, ProcessId::Black];

    pub fn other(self) -> ProcessId {
        match self {
            ProcessId::White => ProcessId::Black,
            ProcessId::Black => ProcessId::White,
        }
    }

    pub fn index(self) -> usize {
        match self {
            ProcessId::White => 0,
            ProcessId::Black => 1,
        }
    }
}

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessId::White => "WHITE",
            ProcessId::Black => "BLACK",
        })
    }
}

/// A finite word (partial scenario). The empty word is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn repeat(letter: Letter, n: usize) -> Self {
        Word(vec![letter; n])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_gamma(&self) -> bool {
        self.0.iter().all(|l| l.is_gamma())
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn pushed(&self, letter: Letter) -> Word {
        let mut w = self.clone();
        w.push(letter);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn prefix(&self, r: usize) -> Word {
        Word(self.0[..r.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn mirror(&self) -> Word {
        Word(self.0.iter().map(|l| l.mirror()).collect())
    }

    /// All words of length `r` over `alphabet`, in lexicographic order.
    pub fn all_of_length(alphabet: &[Letter], r: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..r {
            out = out
                .iter()
                .flat_map(|w| alphabet.iter().map(move |&a| w.pushed(a)))
                .collect();
        }
        out
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(l.token())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_word(&s).map_err(serde::de::Error::custom)
    }
}

/// Whitespace-separated tokens with their character offsets.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out.into_iter()
}

fn letter_at(position: usize, token: &str) -> Result<Letter> {
    Letter::from_token(token)
        .ok_or_else(|| Error::parse(position, format!("unknown token \"{token}\"")))
}

/// Parses a whitespace-separated sequence of `OK`/`LW`/`LB`/`LL` tokens.
/// A lone `ε` denotes the empty word.
pub fn parse_word(text: &str) -> Result<Word> {
    let mut letters = Vec::new();
    for (pos, tok) in tokens(text) {
        if tok == "ε" {
            continue;
        }
        letters.push(letter_at(pos, tok)?);
    }
    Ok(Word(letters))
}

/// An ultimately periodic infinite word `stem · cycle^ω`, always kept in
/// canonical form: primitive cycle and shortest stem.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lasso {
    stem: Word,
    cycle: Word,
}

impl Lasso {
    pub fn new(stem: Word, cycle: Word) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::domain("lasso cycle must be non-empty"));
        }
        Ok(Self::canonical(stem.0, cycle.0))
    }

    /// `letter^ω`.
    pub fn constant(letter: Letter) -> Self {
        Lasso {
            stem: Word::empty(),
            cycle: Word(vec![letter]),
        }
    }

    fn canonical(mut stem: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        let n = cycle.len();
        let period = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[i % d]))
            .unwrap_or(n);
        let mut cycle: Vec<Letter> = cycle[..period].to_vec();
        // Absorb stem letters into the cycle by rotating it to the right.
        while let Some(&last) = stem.last() {
            if last != *cycle.last().unwrap() {
                break;
            }
            stem.pop();
            cycle.rotate_right(1);
        }
        Lasso {
            stem: Word(stem),
            cycle: Word(cycle),
        }
    }

    pub fn stem(&self) -> &Word {
        &self.stem
    }

    pub fn cycle(&self) -> &Word {
        &self.cycle
    }

    pub fn is_gamma(&self) -> bool {
        self.stem.is_gamma() && self.cycle.is_gamma()
    }

    /// The letter at 0-based position `i`.
    pub fn letter(&self, i: usize) -> Letter {
        let s = self.stem.len();
        if i < s {
            self.stem.0[i]
        } else {
            self.cycle.0[(i - s) % self.cycle.len()]
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..).map(move |i| self.letter(i))
    }

    /// The first `r` letters of the infinite word.
    pub fn prefix(&self, r: usize) -> Word {
        Word((0..r).map(|i| self.letter(i)).collect())
    }

    /// `w · self`.
    pub fn prepend(&self, w: &Word) -> Lasso {
        Self::canonical(w.concat(&self.stem).0, self.cycle.0.clone())
    }

    /// The suffix starting at position `i`.
    pub fn suffix(&self, i: usize) -> Lasso {
        let s = self.stem.len();
        if i <= s {
            Self::canonical(self.stem.0[i..].to_vec(), self.cycle.0.clone())
        } else {
            let mut cycle = self.cycle.0.clone();
            let shift = (i - s) % cycle.len();
            cycle.rotate_left(shift);
            Self::canonical(Vec::new(), cycle)
        }
    }

    /// Fair iff the cycle is neither contained in {LL, LW} nor in {LL, LB}:
    /// both processes get messages through infinitely often.
    pub fn is_fair(&self) -> bool {
        let c = self.cycle.letters();
        let white_starved = c.iter().all(|l| matches!(l, Letter::Ll | Letter::Lw));
        let black_starved = c.iter().all(|l| matches!(l, Letter::Ll | Letter::Lb));
        !white_starved && !black_starved
    }

    pub fn mirror(&self) -> Lasso {
        Self::canonical(self.stem.mirror().0, self.cycle.mirror().0)
    }
}

/// First `r` letters of the infinite word denoted by `l`.
pub fn lasso_prefix(l: &Lasso, r: usize) -> Word {
    l.prefix(r)
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.stem.is_empty() {
            write!(f, "{} ", self.stem)?;
        }
        write!(f, "({})^w", self.cycle)
    }
}

impl FromStr for Lasso {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_lasso(s)
    }
}

impl Serialize for Lasso {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Lasso {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_lasso(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses `"<stem> ( <cycle> )^w"`; `^ω` is accepted for `^w`.
pub fn parse_lasso(text: &str) -> Result<Lasso> {
    let open = text
        .find('(')
        .ok_or_else(|| Error::parse(text.len(), "expected \"(\" opening the cycle"))?;
    let close = text[open..]
        .find(')')
        .map(|i| i + open)
        .ok_or_else(|| Error::parse(text.len(), "expected \")\" closing the cycle"))?;
    let tail = text[close + 1..].trim();
    if tail != "^w" && tail != "^ω" {
        return Err(Error::parse(close + 1, format!("expected \"^w\" after cycle, found \"{tail}\"")));
    }
    let stem = parse_word(&text[..open])?;
    let cycle = parse_word(&text[open + 1..close]).map_err(|e| match e {
        Error::Parse { position, message } => Error::Parse {
            position: position + open + 1,
            message,
        },
        other => other,
    })?;
    if cycle.is_empty() {
        return Err(Error::parse(open, "empty cycle"));
    }
    Lasso::new(stem, cycle)
}

//! Text syntax for message adversaries.
//!
//! ```text
//! expr    := term { "|" term }
//! term    := factor { ["."] factor }
//! factor  := atom { "*" | "^w" } [ "\" "{" lasso { "," lasso } "}" ]
//! atom    := LETTER | "{" LETTER { "," LETTER } "}" | "GAMMA" | "G2"
//!          | NAME | "(" expr ")"
//! ```
//!
//! Finite sub-expressions are regular expressions; the whole expression must
//! denote a set of infinite words. `^w` applies to a letter set (all infinite
//! words over it) or to a single finite word `u` (the word `u^ω`).

use std::fmt;

use serde::{Serialize, Serializer};

use super::regex::Regex;
use crate::error::{Error, Result};
use crate::word::{parse_lasso, Lasso, Letter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    /// `{OK, LW, LB}`.
    Gamma,
    /// All four letters.
    G2,
}

impl Alphabet {
    pub fn letters(self) -> &'static [Letter] {
        match self {
            Alphabet::Gamma => &Letter::GAMMA,
            Alphabet::G2 => &Letter::ALL,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Alphabet::Gamma => "GAMMA",
            Alphabet::G2 => "G2",
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AdversaryExpr {
    /// `A^ω` for a letter set `A`.
    OmegaPower(Vec<Letter>),
    /// A single ultimately periodic word.
    Singleton(Lasso),
    /// `R · E`: a finite word of `R` followed by an infinite word of `E`.
    Concat(Regex, Box<AdversaryExpr>),
    Union(Vec<AdversaryExpr>),
    /// `Σ^ω` minus finitely many lassos.
    DifferenceFromFull {
        alphabet: Alphabet,
        excluded: Vec<Lasso>,
    },
    /// A built-in adversary, see [`BUILTINS`].
    Named(String),
}

/// Built-in adversaries by name, with their definitions in the DSL.
pub const BUILTINS: [(&str, &str); 7] = [
    ("S0", "(OK)^w"),
    ("TW", "{OK,LW}^w"),
    ("TB", "{OK,LB}^w"),
    ("C1", "(OK)^w | OK* . ((LW)^w | (LB)^w)"),
    ("S1", "TW | TB"),
    ("R1", "{OK,LW,LB}^w"),
    ("S2", "G2^w"),
];

pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, d)| *d)
}

impl AdversaryExpr {
    /// Replaces every built-in name by its definition, recursively.
    pub fn expand(&self) -> AdversaryExpr {
        match self {
            AdversaryExpr::Named(n) => {
                let text = builtin(n).expect("names are checked at parse time");
                parse_adversary(text).expect("built-ins parse").expand()
            }
            AdversaryExpr::Concat(r, e) => AdversaryExpr::Concat(r.clone(), Box::new(e.expand())),
            AdversaryExpr::Union(v) => AdversaryExpr::Union(v.iter().map(|e| e.expand()).collect()),
            other => other.clone(),
        }
    }

    /// Γ unless the expression mentions LL or G2 anywhere.
    pub fn alphabet(&self) -> Result<Alphabet> {
        let g2 = |b: bool| if b { Alphabet::G2 } else { Alphabet::Gamma };
        Ok(match self.expand() {
            AdversaryExpr::OmegaPower(s) => g2(s.contains(&Letter::Ll)),
            AdversaryExpr::Singleton(l) => g2(!l.is_gamma()),
            AdversaryExpr::Concat(r, e) => {
                let a = e.alphabet()?;
                if r.letters().contains(&Letter::Ll) {
                    Alphabet::G2
                } else {
                    a
                }
            }
            AdversaryExpr::Union(v) => v
                .iter()
                .map(|e| e.alphabet())
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(Alphabet::Gamma),
            AdversaryExpr::DifferenceFromFull { alphabet, excluded } => {
                if alphabet == Alphabet::Gamma {
                    if let Some(l) = excluded.iter().find(|l| !l.is_gamma()) {
                        return Err(Error::Alphabet(format!(
                            "excluded word {l} uses LL but the difference is taken from GAMMA^w"
                        )));
                    }
                }
                alphabet
            }
            AdversaryExpr::Named(_) => unreachable!("expanded"),
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            AdversaryExpr::OmegaPower(s) => {
                if s == &Letter::GAMMA {
                    write!(f, "GAMMA^w")
                } else if s == &Letter::ALL {
                    write!(f, "G2^w")
                } else {
                    write!(f, "{}^w", Regex::Set(s.clone()))
                }
            }
            AdversaryExpr::Singleton(l) => {
                if prec > 1 && !l.stem().is_empty() {
                    write!(f, "({l})")
                } else {
                    write!(f, "{l}")
                }
            }
            AdversaryExpr::Concat(r, e) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                let rs = match r {
                    Regex::Union(_) => format!("({r})"),
                    _ => r.to_string(),
                };
                write!(f, "{rs} . ")?;
                e.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            AdversaryExpr::Union(v) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    e.fmt_prec(f, 1)?;
                }
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            AdversaryExpr::DifferenceFromFull { alphabet, excluded } => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                write!(f, "{alphabet}^w \\ {{ ")?;
                for (i, l) in excluded.iter().enumerate() {
                    if i > 0 {
                        write!(f, " , ")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, " }}")?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            AdversaryExpr::Named(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for AdversaryExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Parses an adversary expression. Built-in names are kept as
/// [`AdversaryExpr::Named`]; see [`AdversaryExpr::expand`].
pub fn parse_adversary(text: &str) -> Result<AdversaryExpr> {
    let mut p = Parser { text, pos: 0 };
    let syn = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(Error::parse(p.pos, format!("unexpected \"{}\"", p.rest_token())));
    }
    syn.into_omega(0)
}

/// Surface syntax before the finite/infinite split.
#[derive(Debug, Clone)]
enum Syn {
    Letters(Vec<Letter>),
    Name(String),
    Concat(Vec<(usize, Syn)>),
    Union(Vec<(usize, Syn)>),
    Star(Box<Syn>),
    Omega(Box<Syn>),
    Diff(Alphabet, Vec<Lasso>),
}

impl Syn {
    fn is_omega(&self) -> bool {
        match self {
            Syn::Letters(_) | Syn::Star(_) => false,
            Syn::Name(_) | Syn::Omega(_) | Syn::Diff(..) => true,
            Syn::Concat(v) => v.last().is_some_and(|(_, s)| s.is_omega()),
            Syn::Union(v) => v.iter().any(|(_, s)| s.is_omega()),
        }
    }

    fn into_regex(self, pos: usize) -> Result<Regex> {
        Ok(match self {
            Syn::Letters(s) => Regex::Set(s),
            Syn::Concat(v) => Regex::Concat(
                v.into_iter()
                    .map(|(p, s)| s.into_regex(p))
                    .collect::<Result<_>>()?,
            ),
            Syn::Union(v) => Regex::Union(
                v.into_iter()
                    .map(|(p, s)| s.into_regex(p))
                    .collect::<Result<_>>()?,
            ),
            Syn::Star(inner) => {
                if inner.is_omega() {
                    return Err(Error::Unsupported(format!(
                        "ω-expression under a star (position {pos})"
                    )));
                }
                Regex::Star(Box::new(inner.into_regex(pos)?))
            }
            _ => {
                return Err(Error::parse(
                    pos,
                    "infinite-word expression where a finite regular expression is expected",
                ))
            }
        })
    }

    fn into_omega(self, pos: usize) -> Result<AdversaryExpr> {
        match self {
            Syn::Name(n) => Ok(AdversaryExpr::Named(n)),
            Syn::Diff(alphabet, excluded) => Ok(AdversaryExpr::DifferenceFromFull { alphabet, excluded }),
            Syn::Omega(inner) => match *inner {
                Syn::Letters(s) => Ok(AdversaryExpr::OmegaPower(s)),
                other if !other.is_omega() => {
                    let r = other.into_regex(pos)?;
                    match r.as_word() {
                        Some(w) if !w.is_empty() => Ok(AdversaryExpr::Singleton(Lasso::new(
                            crate::word::Word::empty(),
                            w,
                        )?)),
                        _ => Err(Error::Unsupported(format!(
                            "\"^w\" applies to a letter set or a single word (position {pos})"
                        ))),
                    }
                }
                _ => Err(Error::Unsupported(format!(
                    "\"^w\" applied to an infinite-word expression (position {pos})"
                ))),
            },
            Syn::Concat(mut v) => {
                let (lp, last) = v.pop().expect("concatenations are non-empty");
                if !last.is_omega() {
                    return Err(Error::parse(
                        lp,
                        "a concatenation must end with an infinite-word expression",
                    ));
                }
                let prefix = v
                    .into_iter()
                    .map(|(p, s)| s.into_regex(p))
                    .collect::<Result<Vec<_>>>()?;
                let r = if prefix.len() == 1 {
                    prefix.into_iter().next().unwrap()
                } else {
                    Regex::Concat(prefix)
                };
                Ok(AdversaryExpr::Concat(r, Box::new(last.into_omega(lp)?)))
            }
            Syn::Union(v) => Ok(AdversaryExpr::Union(
                v.into_iter()
                    .map(|(p, s)| s.into_omega(p))
                    .collect::<Result<_>>()?,
            )),
            Syn::Star(inner) if inner.is_omega() => Err(Error::Unsupported(format!(
                "ω-expression under a star (position {pos})"
            ))),
            Syn::Letters(_) | Syn::Star(_) => Err(Error::parse(
                pos,
                "expected an infinite-word expression (missing \"^w\"?)",
            )),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(
                self.pos,
                format!("expected \"{c}\", found \"{}\"", self.rest_token()),
            ))
        }
    }

    fn rest_token(&self) -> &str {
        let rest = &self.text[self.pos..];
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if end == 0 {
            "end of input"
        } else {
            &rest[..end]
        }
    }

    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((start, &rest[..len]))
    }

    fn expr(&mut self) -> Result<Syn> {
        let start = self.pos;
        let mut terms = vec![(start, self.term()?)];
        while self.eat('|') {
            let p = self.pos;
            terms.push((p, self.term()?));
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap().1
        } else {
            Syn::Union(terms)
        })
    }

    fn term(&mut self) -> Result<Syn> {
        self.skip_ws();
        let mut factors = vec![(self.pos, self.factor()?)];
        loop {
            let dotted = self.eat('.');
            match self.peek() {
                Some(c) if c == '(' || c == '{' || c.is_ascii_alphanumeric() => {
                    let p = self.pos;
                    factors.push((p, self.factor()?));
                }
                _ if dotted => {
                    return Err(Error::parse(
                        self.pos,
                        format!("expected an expression after \".\", found \"{}\"", self.rest_token()),
                    ))
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap().1
        } else {
            Syn::Concat(factors)
        })
    }

    fn omega_suffix(&mut self) -> Result<bool> {
        if self.peek() != Some('^') {
            return Ok(false);
        }
        let at = self.pos;
        self.pos += 1;
        match self.peek_raw() {
            Some(c @ ('w' | 'ω')) => {
                self.pos += c.len_utf8();
                Ok(true)
            }
            _ => Err(Error::parse(at, "expected \"^w\"")),
        }
    }

    fn factor(&mut self) -> Result<Syn> {
        let mut f = self.atom()?;
        loop {
            if self.eat('*') {
                f = Syn::Star(Box::new(f));
            } else if self.omega_suffix()? {
                f = Syn::Omega(Box::new(f));
            } else {
                break;
            }
        }
        if self.peek() == Some('\\') {
            let at = self.pos;
            self.pos += 1;
            let alphabet = match &f {
                Syn::Omega(inner) => match inner.as_ref() {
                    Syn::Letters(s) if s.as_slice() == Letter::GAMMA => Alphabet::Gamma,
                    Syn::Letters(s) if s.as_slice() == Letter::ALL => Alphabet::G2,
                    _ => return Err(Error::parse(at, "\"\\\" must follow GAMMA^w or G2^w")),
                },
                _ => return Err(Error::parse(at, "\"\\\" must follow GAMMA^w or G2^w")),
            };
            self.expect('{')?;
            let body_start = self.pos;
            let close = self.text[body_start..]
                .find('}')
                .map(|i| i + body_start)
                .ok_or_else(|| Error::parse(self.text.len(), "unterminated \"{\""))?;
            let mut excluded = Vec::new();
            let mut offset = body_start;
            for part in self.text[body_start..close].split(',') {
                let l = parse_lasso(part).map_err(|e| match e {
                    Error::Parse { position, message } => Error::parse(offset + position, message),
                    other => other,
                })?;
                excluded.push(l);
                offset += part.len() + 1;
            }
            self.pos = close + 1;
            f = Syn::Diff(alphabet, excluded);
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Syn> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('{') => {
                self.pos += 1;
                let mut set = Vec::new();
                loop {
                    let (at, id) = self.ident().ok_or_else(|| {
                        Error::parse(self.pos, format!("expected a letter, found \"{}\"", self.rest_token()))
                    })?;
                    let a = Letter::from_token(id)
                        .ok_or_else(|| Error::parse(at, format!("unknown letter \"{id}\"")))?;
                    if !set.contains(&a) {
                        set.push(a);
                    }
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect('}')?;
                set.sort();
                Ok(Syn::Letters(set))
            }
            _ => {
                let (at, id) = self.ident().ok_or_else(|| {
                    Error::parse(self.pos, format!("unexpected \"{}\"", self.rest_token()))
                })?;
                if let Some(a) = Letter::from_token(id) {
                    Ok(Syn::Letters(vec![a]))
                } else if id == "GAMMA" {
                    Ok(Syn::Letters(Letter::GAMMA.to_vec()))
                } else if id == "G2" {
                    Ok(Syn::Letters(Letter::ALL.to_vec()))
                } else if builtin(id).is_some() {
                    Ok(Syn::Name(id.to_string()))
                } else {
                    Err(Error::parse(at, format!("unknown identifier \"{id}\"")))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_lasso;
    use Letter::*;

    fn p(s: &str) -> AdversaryExpr {
        parse_adversary(s).unwrap()
    }

    #[test]
    fn builtins_expand() {
        let c1 = p("C1").expand();
        let expected = AdversaryExpr::Union(vec![
            AdversaryExpr::OmegaPower(vec![Ok]),
            AdversaryExpr::Concat(
                Regex::Star(Box::new(Regex::letter(Ok))),
                Box::new(AdversaryExpr::Union(vec![
                    AdversaryExpr::OmegaPower(vec![Lw]),
                    AdversaryExpr::OmegaPower(vec![Lb]),
                ])),
            ),
        ]);
        assert_eq!(c1, expected);
        assert_eq!(p("{OK,LW,LB}^w"), AdversaryExpr::OmegaPower(vec![Lb, Ok, Lw]));
        assert_eq!(p("R1").expand(), p("GAMMA^w"));
    }

    #[test]
    fn difference() {
        assert_eq!(
            p("GAMMA^w \\ { (LW)^w }"),
            AdversaryExpr::DifferenceFromFull {
                alphabet: Alphabet::Gamma,
                excluded: vec![parse_lasso("(LW)^w").unwrap()],
            }
        );
        let e = p("GAMMA^w \\ { OK (LW)^w , LB (LW)^w }");
        let AdversaryExpr::DifferenceFromFull { excluded, .. } = &e else {
            panic!()
        };
        assert_eq!(excluded.len(), 2);
        assert!(matches!(
            p("GAMMA^w \\ { (LL)^w }").alphabet(),
            Err(Error::Alphabet(_))
        ));
    }

    #[test]
    fn singletons_and_concat() {
        assert_eq!(p("LW LB (OK)^w"), p("LW . LB . OK^w"));
        assert_eq!(
            p("(LW OK)^w"),
            AdversaryExpr::Singleton(parse_lasso("(LW OK)^w").unwrap())
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_adversary("OK*"), Err(Error::Parse { .. })));
        assert!(matches!(parse_adversary("((OK)^w)*"), Err(Error::Unsupported(_))));
        assert!(matches!(parse_adversary("XX^w"), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse_adversary("(OK)^w |"), Err(Error::Parse { .. })));
        assert!(matches!(parse_adversary("{OK,LW}^w \\ {(OK)^w}"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_adversary("GAMMA^w \\ { OK () ^w }"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "C1",
            "(OK)^w | OK* . ((LW)^w | (LB)^w)",
            "GAMMA^w \\ { OK (LW)^w , LB (LW)^w }",
            "{OK,LW}^w | {OK,LB}^w",
            "(LW | LB) OK* . G2^w",
            "LW LB (OK)^w",
        ] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} -> {e}");
        }
        assert_eq!(AdversaryExpr::Named("S1".into()).alphabet().unwrap(), Alphabet::Gamma);
        assert_eq!(p("S2").alphabet().unwrap(), Alphabet::G2);
    }
}

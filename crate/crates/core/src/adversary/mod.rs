//! Message adversaries: a small language for sets of infinite scenarios,
//! compiled to deterministic ω-automata.

mod compile;
pub mod dsl;
pub mod regex;

use serde_json::{json, Value};

pub use dsl::{builtin, parse_adversary, AdversaryExpr, Alphabet, BUILTINS};

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::word::{Lasso, Letter, Word};

/// Longest prefixes [`AdversaryAutomaton::prefixes`] enumerates by default.
pub const DEFAULT_PREFIX_BOUND: usize = 12;

/// A message adversary as a deterministic complete automaton over Γ or G2.
#[derive(Debug, Clone)]
pub struct AdversaryAutomaton {
    machine: Automaton<Letter>,
    alphabet: Alphabet,
    source: String,
}

impl AdversaryAutomaton {
    pub fn compile(expr: &AdversaryExpr) -> Result<Self> {
        let (machine, alphabet) = compile::compile_machine(expr)?;
        Ok(AdversaryAutomaton {
            machine,
            alphabet,
            source: expr.to_string(),
        })
    }

    pub(crate) fn from_machine(machine: Automaton<Letter>, alphabet: Alphabet, source: String) -> Self {
        AdversaryAutomaton {
            machine,
            alphabet,
            source,
        }
    }

    /// Parses and compiles.
    pub fn from_dsl(text: &str) -> Result<Self> {
        Self::compile(&parse_adversary(text)?)
    }

    /// Fair scenarios over Γ.
    pub fn fairness() -> Self {
        AdversaryAutomaton {
            machine: compile::fairness(),
            alphabet: Alphabet::Gamma,
            source: "FAIR".into(),
        }
    }

    /// The adversary containing exactly `l`.
    pub fn singleton(l: &Lasso) -> Self {
        let alphabet = if l.is_gamma() { Alphabet::Gamma } else { Alphabet::G2 };
        AdversaryAutomaton {
            machine: compile::singleton(alphabet.letters(), l),
            alphabet,
            source: l.to_string(),
        }
    }

    pub fn machine(&self) -> &Automaton<Letter> {
        &self.machine
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Human-readable description of what this automaton recognizes.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn num_states(&self) -> usize {
        self.machine.num_states()
    }

    fn check_lasso(&self, l: &Lasso) -> Result<()> {
        if self.alphabet == Alphabet::Gamma && !l.is_gamma() {
            return Err(Error::Alphabet(format!("{l} uses LL but the adversary is over GAMMA")));
        }
        Ok(())
    }

    pub fn contains(&self, l: &Lasso) -> Result<bool> {
        self.check_lasso(l)?;
        self.machine.accepts(l.stem().letters(), l.cycle().letters())
    }

    pub fn complement(&self) -> Self {
        AdversaryAutomaton {
            machine: self.machine.complement(),
            alphabet: self.alphabet,
            source: format!("complement({})", self.source),
        }
    }

    fn same_alphabet(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::Alphabet(format!(
                "cannot combine an adversary over {} with one over {}",
                self.alphabet, other.alphabet
            )));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.same_alphabet(other)?;
        Ok(AdversaryAutomaton {
            machine: self.machine.intersect(&other.machine)?,
            alphabet: self.alphabet,
            source: format!("intersect({}, {})", self.source, other.source),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_alphabet(other)?;
        Ok(AdversaryAutomaton {
            machine: self.machine.union(&other.machine)?,
            alphabet: self.alphabet,
            source: format!("union({}, {})", self.source, other.source),
        })
    }

    /// The same adversary intersected with Γ^ω.
    pub fn restrict_to_gamma(&self) -> Self {
        AdversaryAutomaton {
            machine: self.machine.restrict(&Letter::GAMMA).expect("Γ ⊂ G2"),
            alphabet: Alphabet::Gamma,
            source: format!("restrict({})", self.source),
        }
    }

    /// `None` if the language is empty, otherwise an accepted lasso.
    pub fn is_empty(&self) -> Option<Lasso> {
        self.machine
            .find_accepted()
            .map(|(s, c)| Lasso::new(Word::new(s), Word::new(c)).expect("cycles are non-empty"))
    }

    /// Whether `w` is a prefix of some word of the adversary.
    pub fn has_prefix(&self, w: &Word) -> Result<bool> {
        let live = self.machine.live_states();
        let mut q = self.machine.initial();
        for &a in w.letters() {
            q = self
                .machine
                .step(q, a)
                .ok_or_else(|| Error::Alphabet(format!("{a} is not in {}", self.alphabet)))?;
        }
        Ok(live[q])
    }

    /// `Pref_r(L)` in lexicographic order (LB < OK < LW < LL).
    pub fn prefixes(&self, r: usize) -> Result<Vec<Word>> {
        self.prefixes_bounded(r, DEFAULT_PREFIX_BOUND)
    }

    pub fn prefixes_bounded(&self, r: usize, bound: usize) -> Result<Vec<Word>> {
        if r > bound {
            return Err(Error::Resource(format!(
                "prefix length {r} exceeds the bound {bound}"
            )));
        }
        let live = self.machine.live_states();
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(r);
        self.collect_prefixes(self.machine.initial(), r, &live, &mut word, &mut out);
        Ok(out)
    }

    fn collect_prefixes(
        &self,
        q: usize,
        r: usize,
        live: &[bool],
        word: &mut Vec<Letter>,
        out: &mut Vec<Word>,
    ) {
        if !live[q] {
            return;
        }
        if word.len() == r {
            out.push(Word::new(word.clone()));
            return;
        }
        for (i, &a) in self.machine.symbols().iter().enumerate() {
            word.push(a);
            self.collect_prefixes(self.machine.next(q, i), r, live, word, out);
            word.pop();
        }
    }

    /// Stable JSON rendering of states, transitions and colours.
    pub fn to_json(&self) -> Value {
        let m = &self.machine;
        let transitions: Vec<Value> = (0..m.num_states())
            .flat_map(|q| {
                m.symbols().iter().enumerate().map(move |(i, a)| {
                    json!({
                        "from": q,
                        "letter": a.token(),
                        "to": m.next(q, i),
                        "colors": m.colors(q, i),
                    })
                })
            })
            .collect();
        json!({
            "schema_version": crate::SCHEMA_VERSION,
            "source": self.source,
            "alphabet": self.alphabet.name(),
            "states": m.num_states(),
            "initial": m.initial(),
            "tracks": m.tracks(),
            "acceptance": m.acceptance().to_string(),
            "transitions": transitions,
        })
    }
}

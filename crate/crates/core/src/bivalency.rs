//! Valencies of partial scenarios for a fixed algorithm.
//!
//! A prefix `v` is `i`-valent when every explored completion of `v` in the
//! adversary decides `i`, and bivalent when both values occur. Exploration
//! is bounded: extensions up to a fixed length, completed by a finite tail
//! set, each run for a bounded number of rounds. Results are evidence about
//! the given algorithm, not statements about every algorithm.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::AdversaryAutomaton;
use crate::error::{Error, Result};
use crate::protocol::{run, Bit, ConsensusAlgorithm, Transcript};
use crate::word::{Lasso, Word};

/// Longest extension the explorer enumerates.
pub const MAX_DEPTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Valency {
    ZeroValent,
    OneValent,
    Bivalent,
    /// Some run did not decide within the bound (or nothing could be run).
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct ExploreConfig {
    /// Length to which prefixes are extended before a tail is appended.
    pub depth: usize,
    pub tails: Vec<Lasso>,
    /// Default `depth + 40`.
    pub max_rounds: Option<usize>,
}

impl ExploreConfig {
    pub fn new(depth: usize) -> Self {
        ExploreConfig {
            depth,
            tails: crate::protocol::default_tails(),
            max_rounds: None,
        }
    }

    pub fn round_bound(&self) -> usize {
        self.max_rounds.unwrap_or(self.depth + 40)
    }
}

/// What the completions below one extension did.
#[derive(Debug, Clone, Default)]
struct Leaf {
    decided: BTreeSet<Bit>,
    runs: usize,
    undecided: usize,
    disagreement: Option<Transcript>,
}

impl Leaf {
    fn merge(&mut self, other: &Leaf) {
        self.decided.extend(&other.decided);
        self.runs += other.runs;
        self.undecided += other.undecided;
        if self.disagreement.is_none() {
            self.disagreement = other.disagreement.clone();
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValencyReport {
    pub valency: Valency,
    pub decided: Vec<Bit>,
    pub runs: usize,
    pub undecided: usize,
    /// A run in which the two processes decided differently.
    pub disagreement: Option<Transcript>,
}

fn classify_leaf(l: &Leaf) -> Valency {
    if l.decided.len() == 2 {
        Valency::Bivalent
    } else if l.undecided > 0 || l.runs == 0 {
        Valency::Undetermined
    } else if l.decided.contains(&0) {
        Valency::ZeroValent
    } else {
        Valency::OneValent
    }
}

/// Outcomes of all completions of the extensions of `root` to a fixed length.
pub struct Unrolling {
    root: Word,
    inputs: [Bit; 2],
    leaves: BTreeMap<Word, Leaf>,
}

impl Unrolling {
    pub fn new(
        alg: &dyn ConsensusAlgorithm,
        adversary: &AdversaryAutomaton,
        root: &Word,
        inputs: [Bit; 2],
        cfg: &ExploreConfig,
    ) -> Result<Self> {
        let length = cfg.depth.max(root.len());
        if length > MAX_DEPTH {
            return Err(Error::Resource(format!("extension length {length} exceeds {MAX_DEPTH}")));
        }
        if inputs.iter().any(|&b| b > 1) {
            return Err(Error::domain("inputs must be bits"));
        }
        let m = adversary.machine();
        let live = m.live_states();
        let mut q = m.initial();
        for &a in root.letters() {
            q = m
                .step(q, a)
                .ok_or_else(|| Error::Alphabet(format!("{a} is not in {}", adversary.alphabet())))?;
        }
        if !live[q] {
            return Err(Error::domain(format!("{root} is not a prefix of the adversary")));
        }
        let mut words = Vec::new();
        let mut stack = vec![(root.clone(), q)];
        while let Some((w, q)) = stack.pop() {
            if w.len() == length {
                words.push(w);
                continue;
            }
            for (i, &a) in m.symbols().iter().enumerate() {
                let q2 = m.next(q, i);
                if live[q2] {
                    stack.push((w.pushed(a), q2));
                }
            }
        }
        let bound = cfg.round_bound();
        let leaves = words
            .into_par_iter()
            .map(|w| {
                let mut leaf = Leaf::default();
                for t in &cfg.tails {
                    let l = t.prepend(&w);
                    if !adversary.contains(&l)? {
                        continue;
                    }
                    let tr = run(alg, &l, inputs, bound, false);
                    leaf.runs += 1;
                    if !tr.outcome.terminated {
                        leaf.undecided += 1;
                    }
                    leaf.decided.extend(tr.outcome.decisions.iter().flatten());
                    if let [Some(a), Some(b)] = tr.outcome.decisions {
                        if a != b && leaf.disagreement.is_none() {
                            leaf.disagreement = Some(run(alg, &l, inputs, bound, true));
                        }
                    }
                }
                Ok((w, leaf))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Unrolling {
            root: root.clone(),
            inputs,
            leaves,
        })
    }

    pub fn inputs(&self) -> [Bit; 2] {
        self.inputs
    }

    fn aggregate(&self, v: &Word) -> Result<Leaf> {
        if !self.root.is_prefix_of(v) {
            return Err(Error::domain(format!("{v} does not extend {}", self.root)));
        }
        let mut acc = Leaf::default();
        let mut found = false;
        for (w, leaf) in self.leaves.range(v.clone()..) {
            if !v.is_prefix_of(w) {
                break;
            }
            found = true;
            acc.merge(leaf);
        }
        if !found {
            return Err(Error::domain(format!("{v} is not a prefix of the adversary")));
        }
        Ok(acc)
    }

    /// Valency of `v`, which must extend the root.
    pub fn valency(&self, v: &Word) -> Result<ValencyReport> {
        let l = self.aggregate(v)?;
        Ok(ValencyReport {
            valency: classify_leaf(&l),
            decided: l.decided.iter().copied().collect(),
            runs: l.runs,
            undecided: l.undecided,
            disagreement: l.disagreement,
        })
    }

    /// One-letter extensions of `v` that are prefixes of the adversary and
    /// not longer than the unrolling.
    pub fn children(&self, v: &Word) -> Vec<Word> {
        let next: BTreeSet<Word> = self
            .leaves
            .range(v.clone()..)
            .take_while(|(w, _)| v.is_prefix_of(w))
            .filter(|(w, _)| w.len() > v.len())
            .map(|(w, _)| w.prefix(v.len() + 1))
            .collect();
        next.into_iter().collect()
    }
}

pub fn valency(
    alg: &dyn ConsensusAlgorithm,
    adversary: &AdversaryAutomaton,
    prefix: &Word,
    inputs: [Bit; 2],
    cfg: &ExploreConfig,
) -> Result<ValencyReport> {
    Unrolling::new(alg, adversary, prefix, inputs, cfg)?.valency(prefix)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecisiveSearch {
    /// Bivalent prefixes all of whose children are univalent.
    pub decisive: Vec<Word>,
    /// Bivalent prefixes with no bivalent child but some undetermined one.
    pub inconclusive: Vec<Word>,
    /// A disagreement met during the search, if any.
    pub disagreement: Option<Transcript>,
}

/// Breadth-first search from the empty prefix through bivalent prefixes.
pub fn find_decisive(
    alg: &dyn ConsensusAlgorithm,
    adversary: &AdversaryAutomaton,
    inputs: [Bit; 2],
    cfg: &ExploreConfig,
) -> Result<DecisiveSearch> {
    let u = Unrolling::new(alg, adversary, &Word::empty(), inputs, cfg)?;
    let root = u.valency(&Word::empty())?;
    let mut out = DecisiveSearch {
        decisive: Vec::new(),
        inconclusive: Vec::new(),
        disagreement: root.disagreement.clone(),
    };
    if root.valency != Valency::Bivalent {
        return Ok(out);
    }
    let mut queue = std::collections::VecDeque::from([Word::empty()]);
    while let Some(v) = queue.pop_front() {
        let children = u.children(&v);
        if children.is_empty() {
            continue;
        }
        let mut bivalent = false;
        let mut undetermined = false;
        for c in children {
            match u.valency(&c)?.valency {
                Valency::Bivalent => {
                    bivalent = true;
                    queue.push_back(c);
                }
                Valency::Undetermined => undetermined = true,
                _ => {}
            }
        }
        if !bivalent {
            if undetermined {
                out.inconclusive.push(v);
            } else {
                out.decisive.push(v);
            }
        }
    }
    Ok(out)
}

/// A node of the valency tree; only bivalent and undetermined nodes are
/// expanded, since univalent ones stay univalent below.
#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    pub prefix: Word,
    pub valency: Valency,
    pub decided: Vec<Bit>,
    pub runs: usize,
    pub children: Vec<TreeNode>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Exploration {
    pub schema_version: u32,
    pub algorithm: String,
    pub adversary: String,
    pub inputs: [Bit; 2],
    pub depth: usize,
    pub max_rounds: usize,
    pub tree: TreeNode,
    pub decisive: Vec<Word>,
    pub inconclusive: Vec<Word>,
    pub disagreement: Option<Transcript>,
}

pub fn explore(
    alg: &dyn ConsensusAlgorithm,
    adversary: &AdversaryAutomaton,
    inputs: [Bit; 2],
    cfg: &ExploreConfig,
) -> Result<Exploration> {
    let u = Unrolling::new(alg, adversary, &Word::empty(), inputs, cfg)?;
    fn node(u: &Unrolling, v: Word) -> Result<TreeNode> {
        let r = u.valency(&v)?;
        let children = match r.valency {
            Valency::Bivalent | Valency::Undetermined => u
                .children(&v)
                .into_iter()
                .map(|c| node(u, c))
                .collect::<Result<_>>()?,
            _ => Vec::new(),
        };
        Ok(TreeNode {
            prefix: v,
            valency: r.valency,
            decided: r.decided,
            runs: r.runs,
            children,
        })
    }
    let tree = node(&u, Word::empty())?;
    let search = find_decisive(alg, adversary, inputs, cfg)?;
    Ok(Exploration {
        schema_version: crate::SCHEMA_VERSION,
        algorithm: alg.name(),
        adversary: adversary.source().to_string(),
        inputs,
        depth: cfg.depth,
        max_rounds: cfg.round_bound(),
        tree,
        decisive: search.decisive,
        inconclusive: search.inconclusive,
        disagreement: search.disagreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{AlgW, FixedRound};
    use crate::word::{parse_lasso, parse_word};

    fn adv(s: &str) -> AdversaryAutomaton {
        AdversaryAutomaton::from_dsl(s).unwrap()
    }

    #[test]
    fn root_valencies() {
        let a = adv("GAMMA^w \\ { LW LB (OK)^w }");
        let alg = AlgW::new(parse_lasso("LW LB (OK)^w").unwrap()).unwrap();
        let cfg = ExploreConfig::new(4);
        let e = Word::empty();
        assert_eq!(valency(&alg, &a, &e, [0, 1], &cfg).unwrap().valency, Valency::Bivalent);
        assert_eq!(valency(&alg, &a, &e, [0, 0], &cfg).unwrap().valency, Valency::ZeroValent);
        assert_eq!(valency(&alg, &a, &e, [1, 1], &cfg).unwrap().valency, Valency::OneValent);
        let s0 = adv("S0");
        assert!(valency(&alg, &s0, &parse_word("LW").unwrap(), [0, 1], &cfg).is_err());
    }

    #[test]
    fn bivalent_chain_follows_the_excluded_word() {
        let f = parse_lasso("LW LB (OK)^w").unwrap();
        let a = adv("GAMMA^w \\ { LW LB (OK)^w }");
        let alg = AlgW::new(f.clone()).unwrap();
        let cfg = ExploreConfig::new(5);
        let u = Unrolling::new(&alg, &a, &Word::empty(), [0, 1], &cfg).unwrap();
        let mut level = vec![Word::empty()];
        for k in 0..5 {
            let bivalent: Vec<Word> = level
                .iter()
                .filter(|v| u.valency(v).unwrap().valency == Valency::Bivalent)
                .cloned()
                .collect();
            assert_eq!(bivalent, vec![f.prefix(k)]);
            level = bivalent.iter().flat_map(|v| u.children(v)).collect();
        }
        let s = find_decisive(&alg, &a, [0, 1], &cfg).unwrap();
        assert!(s.decisive.is_empty() && s.inconclusive.is_empty());
    }

    #[test]
    fn decisive_prefixes() {
        let c1 = adv("C1");
        let alg = AlgW::new(parse_lasso("(LW LB)^w").unwrap()).unwrap();
        let cfg = ExploreConfig::new(4);
        let s = find_decisive(&alg, &c1, [0, 1], &cfg).unwrap();
        assert_eq!(s.decisive, vec![Word::empty()]);
        assert!(s.disagreement.is_none());
        let u = Unrolling::new(&alg, &c1, &Word::empty(), [0, 1], &cfg).unwrap();
        for v in &s.decisive {
            assert_eq!(u.valency(v).unwrap().valency, Valency::Bivalent);
            for c in u.children(v) {
                let k = u.valency(&c).unwrap().valency;
                assert!(matches!(k, Valency::ZeroValent | Valency::OneValent));
            }
        }
        let s0 = adv("S0");
        assert!(find_decisive(&alg, &s0, [0, 0], &cfg).unwrap().decisive.is_empty());
    }

    #[test]
    fn obstruction_surfaces_disagreement() {
        let r1 = adv("R1");
        let s = find_decisive(&FixedRound { rounds: 2 }, &r1, [0, 1], &ExploreConfig::new(3)).unwrap();
        assert!(s.disagreement.is_some());
    }
}

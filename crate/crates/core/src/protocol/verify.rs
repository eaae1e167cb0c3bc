use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{run, Bit, ConsensusAlgorithm, Transcript};
use crate::adversary::AdversaryAutomaton;
use crate::error::{Error, Result};
use crate::word::{Lasso, Letter};

/// Scenarios of an adversary checked by [`verify`]: every prefix of length
/// `depth` completed by every tail, kept when the completion is in the
/// adversary.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub depth: usize,
    pub tails: Vec<Lasso>,
    /// Rounds allowed before a run counts as non-terminating
    /// (default `depth + 40`).
    pub max_rounds: Option<usize>,
}

impl VerifyConfig {
    pub const MAX_DEPTH: usize = 10;

    pub fn new(depth: usize) -> Self {
        VerifyConfig {
            depth,
            tails: default_tails(),
            max_rounds: None,
        }
    }

    pub fn round_bound(&self) -> usize {
        self.max_rounds.unwrap_or(self.depth + 40)
    }

    /// The completed scenarios, sorted and deduplicated.
    pub fn scenarios(&self, adversary: &AdversaryAutomaton) -> Result<Vec<Lasso>> {
        if self.depth > Self::MAX_DEPTH {
            return Err(Error::Resource(format!(
                "depth {} exceeds {}",
                self.depth,
                Self::MAX_DEPTH
            )));
        }
        let mut out = BTreeSet::new();
        for p in adversary.prefixes(self.depth)? {
            for t in &self.tails {
                let l = t.prepend(&p);
                if adversary.contains(&l)? {
                    out.insert(l);
                }
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// `(OK)^w`, `(LW)^w`, `(LB)^w`.
pub fn default_tails() -> Vec<Lasso> {
    [Letter::Ok, Letter::Lw, Letter::Lb]
        .into_iter()
        .map(Lasso::constant)
        .collect()
}

pub const INPUTS: [[Bit; 2]; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Agreement,
    Validity,
    Termination,
    /// A process could not produce a value.
    Fault,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub property: Property,
    pub scenario: Lasso,
    pub inputs: [Bit; 2],
    pub detail: String,
    pub transcript: Transcript,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub algorithm: String,
    pub adversary: String,
    pub depth: usize,
    pub max_rounds: usize,
    pub scenarios: usize,
    pub runs: usize,
    /// Latest round at which some process halted, over all runs.
    pub max_halting_round: Option<usize>,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks agreement, validity and termination on every scenario of
/// `cfg.scenarios(adversary)` and every input vector.
pub fn verify(
    alg: &dyn ConsensusAlgorithm,
    adversary: &AdversaryAutomaton,
    cfg: &VerifyConfig,
) -> Result<Report> {
    let scenarios = cfg.scenarios(adversary)?;
    let bound = cfg.round_bound();
    let jobs: Vec<(&Lasso, [Bit; 2])> = scenarios
        .iter()
        .flat_map(|l| INPUTS.iter().map(move |&i| (l, i)))
        .collect();
    let results: Vec<(Option<usize>, Vec<Violation>)> = jobs
        .par_iter()
        .map(|&(l, inputs)| {
            let t = run(alg, l, inputs, bound, false);
            let found = check(&t);
            let latest = t.outcome.halting_rounds.iter().flatten().max().copied();
            if found.is_empty() {
                return (latest, Vec::new());
            }
            // Re-run with full records for the report.
            let full = run(alg, l, inputs, bound, true);
            let v = found
                .into_iter()
                .map(|(property, detail)| Violation {
                    property,
                    scenario: l.clone(),
                    inputs,
                    detail,
                    transcript: full.clone(),
                })
                .collect();
            (latest, v)
        })
        .collect();
    let max_halting_round = results.iter().filter_map(|r| r.0).max();
    let mut violations: Vec<Violation> = results.into_iter().flat_map(|r| r.1).collect();
    violations.sort_by(|a, b| {
        (a.property, &a.scenario, a.inputs).cmp(&(b.property, &b.scenario, b.inputs))
    });
    Ok(Report {
        schema_version: crate::SCHEMA_VERSION,
        algorithm: alg.name(),
        adversary: adversary.source().to_string(),
        depth: cfg.depth,
        max_rounds: bound,
        scenarios: scenarios.len(),
        runs: jobs.len(),
        max_halting_round,
        violations,
    })
}

fn check(t: &Transcript) -> Vec<(Property, String)> {
    let mut out = Vec::new();
    let o = &t.outcome;
    if let Some(f) = &o.fault {
        out.push((Property::Fault, f.clone()));
    }
    if let [Some(a), Some(b)] = o.decisions {
        if a != b {
            out.push((Property::Agreement, format!("white decided {a}, black decided {b}")));
        }
    }
    if t.inputs[0] == t.inputs[1] {
        for (who, d) in ["white", "black"].iter().zip(o.decisions) {
            if let Some(v) = d {
                if v != t.inputs[0] {
                    out.push((
                        Property::Validity,
                        format!("{who} decided {v} although both inputs are {}", t.inputs[0]),
                    ));
                }
            }
        }
    }
    if o.fault.is_none() && !o.terminated {
        out.push((
            Property::Termination,
            format!("undecided after {} rounds", o.rounds),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{AlgW, OwnInit};
    use crate::word::parse_lasso;

    #[test]
    fn own_init_violates_agreement_on_s0() {
        let s0 = AdversaryAutomaton::from_dsl("S0").unwrap();
        let r = verify(&OwnInit, &s0, &VerifyConfig::new(2)).unwrap();
        assert_eq!(r.scenarios, 1);
        assert_eq!(r.runs, 4);
        let props: Vec<_> = r.violations.iter().map(|v| (v.property, v.inputs)).collect();
        assert_eq!(
            props,
            vec![(Property::Agreement, [0, 1]), (Property::Agreement, [1, 0])]
        );
    }

    #[test]
    fn aw_on_c1() {
        let c1 = AdversaryAutomaton::from_dsl("C1").unwrap();
        let w = parse_lasso("LW LB (OK)^w").unwrap();
        let r = verify(&AlgW::new(w).unwrap(), &c1, &VerifyConfig::new(3)).unwrap();
        assert!(r.ok(), "{:?}", r.violations.first().map(|v| &v.detail));
        assert!(r.max_halting_round.is_some());
    }

    #[test]
    fn depth_is_bounded() {
        let c1 = AdversaryAutomaton::from_dsl("C1").unwrap();
        assert!(matches!(
            verify(&OwnInit, &c1, &VerifyConfig::new(11)),
            Err(Error::Resource(_))
        ));
    }
}

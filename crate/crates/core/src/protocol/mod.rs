//! Synchronous two-process executions under a scenario, and a checker for
//! the consensus properties over all scenarios of an adversary.
//!
//! Algorithms are trait objects: a [`ConsensusAlgorithm`] spawns one
//! [`Process`] per participant, and the [`registry`] builds algorithms by
//! name.

mod algw;
pub mod registry;
mod strawman;
mod verify;

use num_bigint::BigUint;
use serde::Serialize;

pub use algw::AlgW;
pub(crate) use algw::exit_value;
pub use registry::{AlgorithmContext, Registry};
pub use strawman::{FixedRound, OwnInit};
pub use verify::{default_tails, verify, Property, Report, VerifyConfig, Violation, INPUTS};

use crate::error::{Error, Result};
use crate::ternary::biguint_str;
use crate::word::{Lasso, ProcessId};

pub type Bit = u8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub init: Bit,
    #[serde(with = "biguint_str")]
    pub ind: BigUint,
}

/// Local state shared by the index-based algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessState {
    pub id: ProcessId,
    pub init: Bit,
    pub initother: Option<Bit>,
    #[serde(with = "biguint_str")]
    pub ind: BigUint,
    pub round: usize,
    pub decided: Option<Bit>,
    pub halted: bool,
}

impl ProcessState {
    /// White starts with index 0, black with index 1.
    pub fn new(id: ProcessId, init: Bit) -> Self {
        ProcessState {
            id,
            init,
            initother: None,
            ind: BigUint::from(id.index() as u32),
            round: 0,
            decided: None,
            halted: false,
        }
    }

    pub fn message(&self) -> Option<Message> {
        (!self.halted).then(|| Message {
            init: self.init,
            ind: self.ind.clone(),
        })
    }

    /// The index update: `3·ind` on loss, `2·msg.ind + ind` on receipt.
    pub fn receive(&mut self, msg: Option<&Message>) -> Result<()> {
        if self.halted {
            return Err(Error::domain(format!("{} has already halted", self.id)));
        }
        match msg {
            None => self.ind *= 3u32,
            Some(m) => {
                self.ind = &m.ind * 2u32 + &self.ind;
                self.initother = Some(m.init);
            }
        }
        self.round += 1;
        Ok(())
    }

    pub fn halt(&mut self, value: Bit) {
        debug_assert!(!self.halted);
        self.halted = true;
        self.decided = Some(value);
    }
}

/// One participant of a running algorithm.
pub trait Process: Send {
    fn state(&self) -> &ProcessState;

    /// Evaluates the halting condition at the start of the current round and
    /// returns the decision if the process halts now.
    fn poll(&mut self) -> Result<Option<Bit>>;

    /// What the process sends this round (`None` once halted).
    fn message(&self) -> Option<Message> {
        self.state().message()
    }

    /// Ends the round with the message received, if any.
    fn deliver(&mut self, msg: Option<&Message>) -> Result<()>;
}

/// A consensus algorithm for the two processes.
pub trait ConsensusAlgorithm: Send + Sync {
    fn name(&self) -> String;
    fn spawn(&self, id: ProcessId, init: Bit) -> Box<dyn Process>;
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub letter: crate::word::Letter,
    /// Messages sent by white and black.
    pub sent: [Option<Message>; 2],
    /// Whether white's and black's messages arrived.
    pub delivered: [bool; 2],
    /// States after the round.
    pub states: [ProcessState; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub decisions: [Option<Bit>; 2],
    pub halting_rounds: [Option<usize>; 2],
    /// Both processes halted within the bound.
    pub terminated: bool,
    pub rounds: usize,
    /// A process broke its own invariants (e.g. had no value to output).
    pub fault: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Transcript {
    pub algorithm: String,
    pub scenario: Lasso,
    pub inputs: [Bit; 2],
    pub initial: [ProcessState; 2],
    pub records: Vec<RoundRecord>,
    pub outcome: Outcome,
}

/// Runs both processes in lockstep. Round `r` (from 0) first lets each
/// process halt, then exchanges messages according to the `r`-th letter;
/// a halted process sends nothing. Stops when both have halted or after
/// `max_rounds` exchanges.
pub fn simulate(
    alg: &dyn ConsensusAlgorithm,
    scenario: &Lasso,
    inputs: [Bit; 2],
    max_rounds: usize,
) -> Transcript {
    run(alg, scenario, inputs, max_rounds, true)
}

pub(crate) fn run(
    alg: &dyn ConsensusAlgorithm,
    scenario: &Lasso,
    inputs: [Bit; 2],
    max_rounds: usize,
    record: bool,
) -> Transcript {
    let mut procs = [
        alg.spawn(ProcessId::White, inputs[0]),
        alg.spawn(ProcessId::Black, inputs[1]),
    ];
    let initial = [procs[0].state().clone(), procs[1].state().clone()];
    let mut records = Vec::new();
    let mut decisions = [None, None];
    let mut halting_rounds = [None, None];
    let mut fault = None;
    let mut r = 0;
    'rounds: loop {
        for (i, p) in procs.iter_mut().enumerate() {
            if p.state().halted {
                continue;
            }
            match p.poll() {
                Ok(Some(v)) => {
                    decisions[i] = Some(v);
                    halting_rounds[i] = Some(r);
                }
                Ok(None) => {}
                Err(e) => {
                    fault = Some(format!("{} at round {r}: {e}", p.state().id));
                    break 'rounds;
                }
            }
        }
        if procs.iter().all(|p| p.state().halted) || r == max_rounds {
            break;
        }
        let letter = scenario.letter(r);
        let sent = [procs[0].message(), procs[1].message()];
        let delivered = [
            sent[0].is_some() && letter.delivers_white(),
            sent[1].is_some() && letter.delivers_black(),
        ];
        for (i, p) in procs.iter_mut().enumerate() {
            if p.state().halted {
                continue;
            }
            let other = 1 - i;
            let msg = if delivered[other] { sent[other].as_ref() } else { None };
            if let Err(e) = p.deliver(msg) {
                fault = Some(format!("{} at round {r}: {e}", p.state().id));
                break 'rounds;
            }
        }
        if record {
            records.push(RoundRecord {
                round: r,
                letter,
                sent,
                delivered,
                states: [procs[0].state().clone(), procs[1].state().clone()],
            });
        }
        r += 1;
    }
    Transcript {
        algorithm: alg.name(),
        scenario: scenario.clone(),
        inputs,
        initial,
        records,
        outcome: Outcome {
            decisions,
            halting_rounds,
            terminated: decisions.iter().all(Option::is_some),
            rounds: r,
            fault,
        },
    }
}

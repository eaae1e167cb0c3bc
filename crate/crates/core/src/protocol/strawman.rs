//! Deliberately incorrect algorithms, useful as negative controls.

use super::{Bit, ConsensusAlgorithm, Message, Process, ProcessState};
use crate::error::Result;
use crate::word::ProcessId;

/// Decides its own input immediately.
#[derive(Debug, Clone, Copy)]
pub struct OwnInit;

impl ConsensusAlgorithm for OwnInit {
    fn name(&self) -> String {
        "own-init".into()
    }

    fn spawn(&self, id: ProcessId, init: Bit) -> Box<dyn Process> {
        Box::new(FixedRoundProcess {
            state: ProcessState::new(id, init),
            rounds: 0,
        })
    }
}

/// Exchanges values for a fixed number of rounds, then decides the minimum
/// of the values it knows.
#[derive(Debug, Clone, Copy)]
pub struct FixedRound {
    pub rounds: usize,
}

impl ConsensusAlgorithm for FixedRound {
    fn name(&self) -> String {
        format!("fixed-round:{}", self.rounds)
    }

    fn spawn(&self, id: ProcessId, init: Bit) -> Box<dyn Process> {
        Box::new(FixedRoundProcess {
            state: ProcessState::new(id, init),
            rounds: self.rounds,
        })
    }
}

struct FixedRoundProcess {
    state: ProcessState,
    rounds: usize,
}

impl Process for FixedRoundProcess {
    fn state(&self) -> &ProcessState {
        &self.state
    }

    fn poll(&mut self) -> Result<Option<Bit>> {
        if self.state.round < self.rounds {
            return Ok(None);
        }
        let v = self.state.initother.map_or(self.state.init, |o| o.min(self.state.init));
        self.state.halt(v);
        Ok(Some(v))
    }

    fn deliver(&mut self, msg: Option<&Message>) -> Result<()> {
        self.state.receive(msg)
    }
}

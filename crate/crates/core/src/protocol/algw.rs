use std::sync::Arc;

use num_bigint::BigUint;

use super::{Bit, ConsensusAlgorithm, Message, Process, ProcessState};
use crate::error::{Error, Result};
use crate::index::index_step;
use crate::word::{Lasso, ProcessId};

/// The index-based algorithm parameterized by an excluded scenario `w`.
///
/// Each process keeps running while its index stays within 2 of
/// `ind(w|r)`. On exit, white keeps its own value iff its index is below
/// `ind(w|r)`, black iff its index is above.
#[derive(Debug, Clone)]
pub struct AlgW {
    w: Arc<Lasso>,
}

impl AlgW {
    pub fn new(w: Lasso) -> Result<Self> {
        if !w.is_gamma() {
            return Err(Error::domain(format!("the excluded scenario {w} must avoid LL")));
        }
        Ok(AlgW { w: Arc::new(w) })
    }

    pub fn w(&self) -> &Lasso {
        &self.w
    }
}

impl ConsensusAlgorithm for AlgW {
    fn name(&self) -> String {
        format!("aw[{}]", self.w)
    }

    fn spawn(&self, id: ProcessId, init: Bit) -> Box<dyn Process> {
        Box::new(AlgWProcess {
            state: ProcessState::new(id, init),
            w: Arc::clone(&self.w),
            ind_w: BigUint::from(0u32),
        })
    }
}

struct AlgWProcess {
    state: ProcessState,
    w: Arc<Lasso>,
    /// `ind(w|round)`, updated incrementally.
    ind_w: BigUint,
}

/// The exit rule shared with the topological algorithm: white keeps its
/// value iff its position is below the reference, black iff above.
pub(crate) fn exit_value(s: &ProcessState, below: bool) -> Result<Bit> {
    let keep = match s.id {
        ProcessId::White => below,
        ProcessId::Black => !below,
    };
    if keep {
        Ok(s.init)
    } else {
        s.initother.ok_or_else(|| {
            Error::domain(format!("{} must output the other value but never received it", s.id))
        })
    }
}

impl Process for AlgWProcess {
    fn state(&self) -> &ProcessState {
        &self.state
    }

    fn poll(&mut self) -> Result<Option<Bit>> {
        let (ind, iw) = (&self.state.ind, &self.ind_w);
        let gap = if ind > iw { ind - iw } else { iw - ind };
        if gap <= BigUint::from(2u32) {
            return Ok(None);
        }
        let v = exit_value(&self.state, ind < iw)?;
        self.state.halt(v);
        Ok(Some(v))
    }

    fn deliver(&mut self, msg: Option<&Message>) -> Result<()> {
        let a = self.w.letter(self.state.round);
        self.state.receive(msg)?;
        self.ind_w = index_step(&self.ind_w, a)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::simulate;
    use crate::word::parse_lasso;

    fn l(s: &str) -> Lasso {
        parse_lasso(s).unwrap()
    }

    #[test]
    fn runs_on_w_never_halt() {
        let w = l("LW LB (OK)^w");
        let alg = AlgW::new(w.clone()).unwrap();
        let t = simulate(&alg, &w, [0, 1], 60);
        assert!(!t.outcome.terminated);
        assert_eq!(t.outcome.decisions, [None, None]);
    }

    #[test]
    fn agreement_off_w() {
        let alg = AlgW::new(l("LW LB (OK)^w")).unwrap();
        for inputs in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let t = simulate(&alg, &l("(OK)^w"), inputs, 40);
            assert!(t.outcome.terminated);
            assert_eq!(t.outcome.decisions[0], t.outcome.decisions[1]);
            if inputs[0] == inputs[1] {
                assert_eq!(t.outcome.decisions[0], Some(inputs[0]));
            }
        }
    }

    #[test]
    fn first_round_guard() {
        // ind(w|1) = 1 for w starting with OK: after an OK round the indexes
        // are 2 (white) and 1 (black), both within the guard.
        let alg = AlgW::new(l("OK (LW)^w")).unwrap();
        let t = simulate(&alg, &l("(OK)^w"), [0, 1], 1);
        let s = &t.records[0].states;
        assert_eq!(s[0].ind, BigUint::from(2u32));
        assert_eq!(s[1].ind, BigUint::from(1u32));
        assert_eq!(t.outcome.halting_rounds, [None, None]);
    }
}

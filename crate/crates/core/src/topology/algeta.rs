use std::sync::Arc;

use num_rational::BigRational;

use super::subdivision::{Eta, TerminatingSubdivision};
use super::{limit_connectivity, Connectivity};
use crate::adversary::AdversaryAutomaton;
use crate::error::{Error, Result};
use crate::protocol::{exit_value, Bit, ConsensusAlgorithm, Message, Process, ProcessState};
use crate::ternary::{format_rational, Ternary};
use crate::word::ProcessId;

/// Levels materialized when the algorithm is built from an adversary.
pub const DEFAULT_LEVELS: usize = 64;

/// The terminating-subdivision algorithm: a process halts once the
/// `3^-r`-ball around its position fits in the η-ball of some stable
/// vertex `y`, and decides by the side of the gap `y` lies on (white
/// keeps its value below the gap, black above).
#[derive(Debug, Clone)]
pub struct AlgEta {
    eta: Arc<Eta>,
    z: BigRational,
}

impl AlgEta {
    pub fn new(ts: &TerminatingSubdivision) -> Result<Self> {
        let z = ts
            .z()
            .cloned()
            .ok_or_else(|| Error::domain("the subdivision has no gap point"))?;
        Ok(AlgEta {
            eta: Arc::new(Eta::of(ts)),
            z,
        })
    }

    /// Builds the subdivision around the gap point reported by
    /// [`limit_connectivity`].
    pub fn from_adversary(a: &AdversaryAutomaton) -> Result<Self> {
        Self::with_levels(a, DEFAULT_LEVELS)
    }

    pub fn with_levels(a: &AdversaryAutomaton, levels: usize) -> Result<Self> {
        let Connectivity::Disconnected { gap, .. } = limit_connectivity(a)? else {
            return Err(Error::domain("the adversary is an obstruction: its limit set has no gap"));
        };
        let mut ts = TerminatingSubdivision::build(a, &gap)?;
        ts.materialize(levels)?;
        Self::new(&ts)
    }

    pub fn gap(&self) -> &BigRational {
        &self.z
    }
}

impl ConsensusAlgorithm for AlgEta {
    fn name(&self) -> String {
        format!("aeta[{}]", format_rational(&self.z))
    }

    fn spawn(&self, id: ProcessId, init: Bit) -> Box<dyn Process> {
        Box::new(AlgEtaProcess {
            state: ProcessState::new(id, init),
            eta: Arc::clone(&self.eta),
        })
    }
}

struct AlgEtaProcess {
    state: ProcessState,
    eta: Arc<Eta>,
}

impl Process for AlgEtaProcess {
    fn state(&self) -> &ProcessState {
        &self.state
    }

    fn poll(&mut self) -> Result<Option<Bit>> {
        let r = self.state.round;
        let x = Ternary::new(self.state.ind.clone(), r as u32);
        let Some(y) = self.eta.finished(r, &x) else {
            return Ok(None);
        };
        let v = exit_value(&self.state, self.eta.below_gap(&y))?;
        self.state.halt(v);
        Ok(Some(v))
    }

    fn deliver(&mut self, msg: Option<&Message>) -> Result<()> {
        self.state.receive(msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{simulate, verify, VerifyConfig};
    use crate::word::parse_lasso;

    #[test]
    fn decides_off_the_gap() {
        let a = AdversaryAutomaton::from_dsl("GAMMA^w \\ { LW LB (OK)^w }").unwrap();
        let alg = AlgEta::from_adversary(&a).unwrap();
        assert_eq!(alg.name(), "aeta[13/18]");
        for inputs in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let t = simulate(&alg, &parse_lasso("(OK)^w").unwrap(), inputs, 40);
            assert!(t.outcome.terminated, "{inputs:?}");
            assert_eq!(t.outcome.decisions[0], t.outcome.decisions[1]);
        }
        let r = verify(&alg, &a, &VerifyConfig::new(3)).unwrap();
        assert!(r.ok(), "{:?}", r.violations.first().map(|v| &v.detail));
    }

    #[test]
    fn obstructions_have_no_gap() {
        let a = AdversaryAutomaton::from_dsl("R1").unwrap();
        assert!(matches!(AlgEta::from_adversary(&a), Err(Error::Domain(_))));
    }
}

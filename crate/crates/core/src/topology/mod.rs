//! One-dimensional chromatic complexes, terminating subdivisions and the
//! topological view of solvability.
//!
//! All geometry is exact: positions are [`Ternary`](crate::ternary::Ternary)
//! rationals and gap points are [`BigRational`]s.

mod algeta;
pub mod complex;
pub mod export;
pub mod subdivision;
pub mod tracker;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use algeta::AlgEta;
pub use complex::{
    abstract_components, chr, chr_power, input_square, protocol_complex, realization_components,
    unit_segment, word_to_edge, Complex, Edge, Segment, Vertex,
};
pub use subdivision::{contrex, finished, Eta, StableEdge, TerminatingSubdivision};
pub use tracker::{preimages, z_tracker};

use crate::adversary::AdversaryAutomaton;
use crate::error::{Error, Result};
use crate::index::ind_limit;
use crate::oracle::{classify, Family, Verdict, Witness};
use crate::ternary::{format_rational, rational_str};
use crate::word::Letter;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Connectivity {
    Connected,
    /// The limit set misses `gap`; `preimages` are the scenarios converging
    /// to it, all outside the adversary.
    Disconnected {
        #[serde(with = "rational_str")]
        gap: BigRational,
        family: Family,
        preimages: Vec<crate::word::Lasso>,
    },
}

impl Connectivity {
    pub fn is_connected(&self) -> bool {
        matches!(self, Connectivity::Connected)
    }
}

/// The point of `[0,1]` left uncovered by the witness of a verdict: the
/// limit of the excluded fair word or pair, or the excluded corner.
pub fn gap_point(v: &Verdict) -> Result<Option<(BigRational, Family)>> {
    Ok(match &v.witness {
        None => None,
        Some(Witness::Fair { lasso }) => Some((ind_limit(lasso)?, Family::F1)),
        Some(Witness::SpecialPair { first, .. }) => Some((ind_limit(first)?, Family::F2)),
        Some(Witness::Corner { lasso }) => {
            if lasso.cycle().letters() == [Letter::Lb] {
                Some((BigRational::zero(), Family::F3))
            } else {
                Some((BigRational::from_integer(BigInt::one()), Family::F4))
            }
        }
    })
}

/// Whether the limit set of `a` is connected, by reduction to [`classify`]:
/// the gap point of a solvable adversary is certified by checking that no
/// scenario of `a` converges to it.
pub fn limit_connectivity(a: &AdversaryAutomaton) -> Result<Connectivity> {
    let v = classify(a)?;
    let Some((gap, family)) = gap_point(&v)? else {
        return Ok(Connectivity::Connected);
    };
    if let Some(l) = a.intersect(&z_tracker(&gap)?)?.is_empty() {
        return Err(Error::domain(format!(
            "{} was reported as a gap but {l} converges to it",
            format_rational(&gap)
        )));
    }
    Ok(Connectivity::Disconnected {
        preimages: preimages(&gap)?,
        gap,
        family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_lasso;

    fn adv(s: &str) -> AdversaryAutomaton {
        AdversaryAutomaton::from_dsl(s).unwrap()
    }

    #[test]
    fn connectivity() {
        assert!(limit_connectivity(&adv("R1")).unwrap().is_connected());
        assert!(limit_connectivity(&adv("GAMMA^w \\ { OK (LW)^w }")).unwrap().is_connected());
        let Connectivity::Disconnected { gap, family, preimages } =
            limit_connectivity(&adv("GAMMA^w \\ { OK (LW)^w , LB (LW)^w }")).unwrap()
        else {
            panic!()
        };
        assert_eq!(gap, BigRational::new(1.into(), 3.into()));
        assert_eq!(family, Family::F2);
        assert_eq!(preimages.len(), 2);
        let Connectivity::Disconnected { gap, family, .. } =
            limit_connectivity(&adv("GAMMA^w \\ { (LW)^w }")).unwrap()
        else {
            panic!()
        };
        assert_eq!((gap, family), (BigRational::one(), Family::F4));
        for name in ["S0", "TW", "TB", "C1", "S1"] {
            assert!(!limit_connectivity(&adv(name)).unwrap().is_connected(), "{name}");
        }
        let c1 = limit_connectivity(&adv("C1")).unwrap();
        let json = serde_json::to_value(&c1).unwrap();
        assert_eq!(json["status"], "disconnected");
        let _ = parse_lasso("(OK)^w").unwrap();
    }
}

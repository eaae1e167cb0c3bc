//! Algorithms by name.
//!
//! An algorithm selector is `name` or `name:arg`, e.g. `aw`, `fixed-round:3`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{AlgW, ConsensusAlgorithm, FixedRound, OwnInit};
use crate::adversary::AdversaryAutomaton;
use crate::error::{Error, Result};
use crate::oracle::{classify, select_forbidden_scenario};
use crate::word::Lasso;

/// What a constructor may draw on.
#[derive(Default, Clone, Copy)]
pub struct AlgorithmContext<'a> {
    pub adversary: Option<&'a AdversaryAutomaton>,
    /// Explicit excluded scenario for `aw`.
    pub w: Option<&'a Lasso>,
    /// The part of the selector after `:`.
    pub arg: Option<&'a str>,
}

pub type Constructor = fn(&AlgorithmContext) -> Result<Arc<dyn ConsensusAlgorithm>>;

pub struct Registry {
    entries: BTreeMap<&'static str, (&'static str, Constructor)>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Registry::empty();
        r.register(
            "aw",
            "index-based algorithm for an excluded scenario (--w, or chosen by the oracle)",
            build_aw,
        );
        r.register(
            "aeta",
            "terminating-subdivision algorithm built from the oracle's gap point",
            build_aeta,
        );
        r.register("own-init", "decides its own input at once (incorrect)", |_| {
            Ok(Arc::new(OwnInit))
        });
        r.register(
            "fixed-round",
            "decides the minimum known input after R rounds, selector fixed-round:R (incorrect)",
            build_fixed_round,
        );
        r
    }

    pub fn register(&mut self, name: &'static str, description: &'static str, ctor: Constructor) {
        self.entries.insert(name, (description, ctor));
    }

    pub fn names(&self) -> impl Iterator<Item = (&'static str, &'static str)> + '_ {
        self.entries.iter().map(|(n, (d, _))| (*n, *d))
    }

    pub fn build(&self, selector: &str, ctx: AlgorithmContext) -> Result<Arc<dyn ConsensusAlgorithm>> {
        let (name, arg) = match selector.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (selector, None),
        };
        let (_, ctor) = self.entries.get(name).ok_or_else(|| {
            let known: Vec<_> = self.entries.keys().copied().collect();
            Error::domain(format!("unknown algorithm \"{name}\" (known: {})", known.join(", ")))
        })?;
        ctor(&AlgorithmContext { arg, ..ctx })
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::with_defaults()
    }
}

fn build_aw(ctx: &AlgorithmContext) -> Result<Arc<dyn ConsensusAlgorithm>> {
    let w = match (ctx.w, ctx.adversary) {
        (Some(w), _) => w.clone(),
        (None, Some(a)) => select_forbidden_scenario(&classify(a)?)?,
        (None, None) => return Err(Error::domain("aw needs an excluded scenario or an adversary")),
    };
    Ok(Arc::new(AlgW::new(w)?))
}

fn build_aeta(ctx: &AlgorithmContext) -> Result<Arc<dyn ConsensusAlgorithm>> {
    let a = ctx
        .adversary
        .ok_or_else(|| Error::domain("aeta needs an adversary"))?;
    Ok(Arc::new(crate::topology::AlgEta::from_adversary(a)?))
}

fn build_fixed_round(ctx: &AlgorithmContext) -> Result<Arc<dyn ConsensusAlgorithm>> {
    let rounds = ctx
        .arg
        .ok_or_else(|| Error::domain("fixed-round needs a round count, e.g. fixed-round:3"))?
        .parse()
        .map_err(|_| Error::domain("fixed-round expects a natural number"))?;
    Ok(Arc::new(FixedRound { rounds }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_lasso;

    #[test]
    fn builds_by_name() {
        let r = Registry::with_defaults();
        let w = parse_lasso("LW LB (OK)^w").unwrap();
        let ctx = AlgorithmContext {
            w: Some(&w),
            ..Default::default()
        };
        assert_eq!(r.build("aw", ctx).unwrap().name(), "aw[LW LB (OK)^w]");
        assert_eq!(r.build("fixed-round:3", ctx).unwrap().name(), "fixed-round:3");
        assert_eq!(r.build("own-init", ctx).unwrap().name(), "own-init");
        assert!(r.build("fixed-round", ctx).is_err());
        assert!(r.build("nope", ctx).is_err());
        assert!(r.build("aeta", ctx).is_err());
        let c1 = AdversaryAutomaton::from_dsl("C1").unwrap();
        let ctx = AlgorithmContext {
            adversary: Some(&c1),
            ..Default::default()
        };
        assert!(r.build("aw", ctx).unwrap().name().starts_with("aw["));
        assert_eq!(r.names().count(), 4);
    }
}

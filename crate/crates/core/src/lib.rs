//! Two-process consensus under omission message adversaries.
//!
//! Scenarios are words over the round alphabet ([`word`]), embedded into the
//! unit interval by the scenario index ([`index`]). Message adversaries are
//! compiled to deterministic ω-automata ([`adversary`]) and classified as
//! solvable or obstructions ([`oracle`]). The [`protocol`] module runs the
//! consensus algorithms, [`bivalency`] explores valencies, and [`topology`]
//! handles chromatic subdivisions and terminating subdivisions.

pub mod adversary;
pub mod automaton;
pub mod bivalency;
pub mod error;
pub mod index;
pub mod oracle;
pub mod protocol;
pub mod ternary;
pub mod topology;
pub mod word;

/// Version tag carried by every JSON document the library emits.
pub const SCHEMA_VERSION: u32 = 1;

pub use adversary::{parse_adversary, AdversaryAutomaton, AdversaryExpr, Alphabet};
pub use error::{Error, ErrorKind, Result};
pub use word::{parse_lasso, parse_word, Lasso, Letter, ProcessId, Word};

//! Backend for existential real arithmetic.
//!
//! The reduction turns every input into a [`TarskiFormula`] — a boolean
//! combination of polynomial sign conditions, implicitly existentially
//! closed. This module decides such formulas three ways:
//!
//! - [`solve_external`] serializes the formula with [`emit_exchange`] and
//!   runs a configured SMT solver subprocess. This is the only source of
//!   `unsat` verdicts; solver models are re-checked by [`evaluate_exact`]
//!   before being reported as validated.
//! - [`search_internal`] is a self-contained rational model search:
//!   linear-equality elimination, then small-rational enumeration and
//!   seeded hill-climbing. It answers `sat` (with an exactly validated
//!   witness) or `unknown`, never `unsat`.
//! - [`evaluate_exact`] checks a candidate assignment with exact rational
//!   arithmetic; it is the final word on every witness in the system.
//!
//! Everything here computes over exact rationals; no floating point enters
//! any verdict.

mod emit;
mod external;
mod formula;
mod poly;
mod search;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use crate::rational::Rational;

pub use emit::emit_exchange;
pub use external::{solve_external, SolverConfig, SolverError};
pub use formula::{evaluate_exact, PolyAtom, PolyRel, TarskiBody, TarskiFormula};
pub use poly::{Monomial, Polynomial, UnassignedVariable};
pub use search::{search_internal, SearchBudget};

/// Verdict of one solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

impl std::fmt::Display for SatStatus {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(match self {
            SatStatus::Sat => "sat",
            SatStatus::Unsat => "unsat",
            SatStatus::Unknown => "unknown",
        })
    }
}

/// Provenance and bookkeeping for a [`SolveResult`].
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// Which engine produced the verdict (executable name or
    /// `internal-search`).
    pub solver: String,
    /// Wall-clock time of the run.
    pub wall_time: Duration,
    /// Persisted transcript of the exchange, when transcripts are enabled.
    pub transcript: Option<PathBuf>,
    /// Free-form notes: timeouts, validation failures, search statistics.
    pub notes: Vec<String>,
}

/// Outcome of deciding one arithmetic formula.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// sat / unsat / unknown.
    pub status: SatStatus,
    /// Variable assignment backing a `sat` verdict, when one was obtained.
    pub witness: Option<BTreeMap<String, Rational>>,
    /// True when the witness passed [`evaluate_exact`]. Internal-search
    /// witnesses are always validated; external models can fail validation
    /// (e.g. an algebraic value was rounded by the solver) and are then
    /// reported `sat` with `validated = false`.
    pub validated: bool,
    /// Provenance of the verdict.
    pub diagnostics: Diagnostics,
}

//! Satisfiability for formulas over the reals with C¹ function variables.
//!
//! The theory covers numerical constraints (`=`, `>`) over terms built from
//! real variables, rational constants, arithmetic, function application
//! `f(t)` and derivative application `D[f](t)`, together with interval
//! predicates on function variables: pointwise equality and strict
//! comparison, derivative bounds, monotonicity, and convexity.
//!
//! The decision pipeline reduces any such formula to an equisatisfiable
//! existential formula of real arithmetic and hands that to a solver
//! backend; for satisfiable inputs it reconstructs an explicit C¹ piecewise
//! witness model and certifies the original formula against it.
//!
//! Module map:
//! - [`formula`]: abstract syntax, validation, variable inventories, and
//!   three-valued evaluation against explicit models.
//! - [`parser`]: concrete syntax — lexer, parser, and canonical printer.
//! - [`normalizer`]: disjunctive normal form and the standard normal form
//!   whose literals the reduction consumes.
//! - [`arranger`]: enumeration of weak orders of the domain variables.
//! - [`reducer`]: elimination of negative and functional literals, yielding
//!   pure arithmetic.
//! - [`tarski`]: polynomial formulas, exact evaluation, solver exchange
//!   format, external solver driver, and the internal model search.
//! - [`witness`]: piecewise C¹ model construction and certification.
//! - [`pipeline`]: end-to-end orchestration.

pub mod arranger;
pub mod formula;
pub mod normalizer;
pub mod parser;
pub mod rational;
pub mod reducer;
pub mod tarski;
pub mod witness;

pub use formula::{Atom, ExtEndpoint, Formula, FuncVar, NumTerm, ShapeKind};
pub use rational::Rational;

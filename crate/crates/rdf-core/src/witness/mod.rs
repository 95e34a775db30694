//! Explicit C¹ piecewise witness models.
//!
//! A [`PiecewiseModel`] covers the whole real line: exponential-derivative
//! tails on the two unbounded ends, and bounded pieces in between whose
//! derivative is continuous piecewise-linear (so the function itself is
//! piecewise quadratic). The family is closed under the shape predicates
//! the theory speaks about, and min/max of the derivative over any interval
//! is attained at knots, which makes shape checks analytic.

mod build;
mod fit;
mod model;

pub use build::{build_model, BuildError, WitnessedModel};
pub use fit::{
    fit_segment, fit_tail, InfeasibleSegment, InfeasibleTail, ShapeRequirement, FIT_RTOL,
};
pub use model::{DerivMonotonicity, ModelError, Piece, PiecewiseModel, TailSide};

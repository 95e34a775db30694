//! Three-valued evaluation of formulas against explicit models.
//!
//! The evaluator is a certifier, not an oracle: comparisons carried out in
//! floating point report `Borderline` whenever the observed margin is
//! within the caller's tolerance, rather than silently trusting rounding.
//! Checks that can be decided from the piecewise structure of a model —
//! derivative extrema at knots, monotonicity of the derivative profile,
//! shared-structure equality — are answered analytically.

use super::{Atom, BinOp, DerRel, ExtEndpoint, Formula, NumRel, NumTerm, ShapeKind};
use crate::witness::PiecewiseModel;
use std::collections::BTreeMap;

/// Uniform samples inserted between adjacent knots when an interval check
/// falls back to sampling.
const SAMPLES_PER_GAP: usize = 64;

/// Truth value of a three-valued check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    /// The observed margin was within tolerance (or the structure did not
    /// permit an analytic answer), so neither verdict is safe.
    Borderline,
}

impl Truth {
    pub fn negate(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Borderline => Truth::Borderline,
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Borderline,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Borderline,
        }
    }

    pub fn from_margin(margin: f64, tolerance: f64) -> Truth {
        if margin > tolerance {
            Truth::True
        } else if margin < -tolerance {
            Truth::False
        } else {
            Truth::Borderline
        }
    }
}

/// An explicit model: a real value for every variable and a piecewise C¹
/// function for every function variable (keyed by name).
#[derive(Debug, Clone, Default)]
pub struct ExplicitModel {
    pub numeric: BTreeMap<String, f64>,
    pub functional: BTreeMap<String, PiecewiseModel>,
}

impl ExplicitModel {
    pub fn with_var(mut self, name: &str, value: f64) -> Self {
        self.numeric.insert(name.to_string(), value);
        self
    }

    pub fn with_fun(mut self, name: &str, model: PiecewiseModel) -> Self {
        self.functional.insert(name.to_string(), model);
        self
    }
}

/// A symbol the model does not interpret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnassignedSymbol {
    pub symbol: String,
}

impl std::fmt::Display for UnassignedSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "model does not assign `{}`", self.symbol)
    }
}

impl std::error::Error for UnassignedSymbol {}

fn eval_term(term: &NumTerm, model: &ExplicitModel) -> Result<f64, UnassignedSymbol> {
    match term {
        NumTerm::Var(v) => model
            .numeric
            .get(v)
            .copied()
            .ok_or_else(|| UnassignedSymbol { symbol: v.clone() }),
        NumTerm::Const(c) => Ok(crate::rational::to_f64(c)),
        NumTerm::Binary(op, a, b) => {
            let a = eval_term(a, model)?;
            let b = eval_term(b, model)?;
            Ok(match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            })
        }
        NumTerm::Apply(f, t) => {
            let x = eval_term(t, model)?;
            let m = model
                .functional
                .get(f.name())
                .ok_or_else(|| UnassignedSymbol { symbol: f.name().to_string() })?;
            Ok(m.value(x))
        }
        NumTerm::Deriv(f, t) => {
            let x = eval_term(t, model)?;
            let m = model
                .functional
                .get(f.name())
                .ok_or_else(|| UnassignedSymbol { symbol: f.name().to_string() })?;
            Ok(m.derivative(x))
        }
    }
}

fn eval_endpoint(ep: &ExtEndpoint, model: &ExplicitModel) -> Result<f64, UnassignedSymbol> {
    match ep {
        ExtEndpoint::Term(t) => eval_term(t, model),
        ExtEndpoint::NegInfinity => Ok(f64::NEG_INFINITY),
        ExtEndpoint::PosInfinity => Ok(f64::INFINITY),
    }
}

fn lookup_fun<'m>(
    model: &'m ExplicitModel,
    f: &super::FuncVar,
) -> Result<&'m PiecewiseModel, UnassignedSymbol> {
    model
        .functional
        .get(f.name())
        .ok_or_else(|| UnassignedSymbol { symbol: f.name().to_string() })
}

/// Evaluate one atom. See [`evaluate`] for the conventions.
pub fn evaluate_atom(
    atom: &Atom,
    model: &ExplicitModel,
    tolerance: f64,
) -> Result<Truth, UnassignedSymbol> {
    match atom {
        Atom::NumRel { rel, lhs, rhs } => {
            let a = eval_term(lhs, model)?;
            let b = eval_term(rhs, model)?;
            let d = a - b;
            if d.is_nan() || (!a.is_finite() || !b.is_finite()) {
                return Ok(Truth::Borderline);
            }
            Ok(match rel {
                NumRel::Eq => {
                    if d == 0.0 {
                        Truth::True
                    } else if d.abs() <= tolerance {
                        Truth::Borderline
                    } else {
                        Truth::False
                    }
                }
                NumRel::Gt => Truth::from_margin(d, tolerance),
            })
        }

        Atom::FunEq { f, g, lo, hi } => {
            let (ms1, ms2) = (eval_endpoint(lo, model)?, eval_endpoint(hi, model)?);
            if ms1.is_nan() || ms2.is_nan() {
                return Ok(Truth::Borderline);
            }
            if ms1 > ms2 {
                return Ok(Truth::True); // empty interval
            }
            let mf = lookup_fun(model, f)?;
            let mg = lookup_fun(model, g)?;
            if mf.identical_on(mg, ms1, ms2) {
                return Ok(Truth::True);
            }
            let (wlo, whi) = mf.clip_window(Some(mg), ms1, ms2);
            let dev = mf.max_abs_difference(mg, wlo, whi, SAMPLES_PER_GAP);
            if dev > tolerance {
                Ok(Truth::False)
            } else {
                // Sampling cannot certify equality of structurally
                // different functions.
                Ok(Truth::Borderline)
            }
        }

        Atom::FunGt { f, g, lo, hi } => {
            let (mt1, mt2) = (eval_endpoint(lo, model)?, eval_endpoint(hi, model)?);
            if mt1.is_nan() || mt2.is_nan() || !mt1.is_finite() || !mt2.is_finite() {
                return if mt1 > mt2 { Ok(Truth::True) } else { Ok(Truth::Borderline) };
            }
            if mt1 > mt2 {
                return Ok(Truth::True); // empty interval
            }
            let mf = lookup_fun(model, f)?;
            let mg = lookup_fun(model, g)?;
            let margin = mf.min_difference(mg, mt1, mt2, SAMPLES_PER_GAP);
            Ok(Truth::from_margin(margin, tolerance))
        }

        Atom::DerRel { f, rel, bound, lo, hi } => {
            let (ms1, ms2) = (eval_endpoint(lo, model)?, eval_endpoint(hi, model)?);
            if ms1.is_nan() || ms2.is_nan() {
                return Ok(Truth::Borderline);
            }
            if ms1 > ms2 {
                return Ok(Truth::True); // empty interval
            }
            let c = eval_term(bound, model)?;
            if !c.is_finite() {
                return Ok(Truth::Borderline);
            }
            let mf = lookup_fun(model, f)?;
            let (dmin, dmax) = mf.derivative_extrema(ms1, ms2);
            Ok(match rel {
                DerRel::Eq => {
                    if dmin == c && dmax == c {
                        Truth::True
                    } else if (dmin - c).abs() <= tolerance && (dmax - c).abs() <= tolerance {
                        Truth::Borderline
                    } else {
                        Truth::False
                    }
                }
                DerRel::Gt => Truth::from_margin(dmin - c, tolerance),
                DerRel::Lt => Truth::from_margin(c - dmax, tolerance),
                DerRel::Ge => {
                    // The extrema are attained (or asymptotic limits), so
                    // the closed comparison is answered analytically.
                    if dmin >= c {
                        Truth::True
                    } else if dmin - c < -tolerance {
                        Truth::False
                    } else {
                        Truth::Borderline
                    }
                }
                DerRel::Le => {
                    if dmax <= c {
                        Truth::True
                    } else if c - dmax < -tolerance {
                        Truth::False
                    } else {
                        Truth::Borderline
                    }
                }
            })
        }

        Atom::Shape { kind, f, lo, hi } => {
            let (ms1, ms2) = (eval_endpoint(lo, model)?, eval_endpoint(hi, model)?);
            if ms1.is_nan() || ms2.is_nan() {
                return Ok(Truth::Borderline);
            }
            if ms1 >= ms2 {
                return Ok(Truth::True); // empty or single-point interval
            }
            let mf = lookup_fun(model, f)?;
            let (dmin, dmax) = mf.derivative_extrema(ms1, ms2);
            let mono = mf.derivative_monotonicity(ms1, ms2);
            Ok(match kind {
                ShapeKind::Up => {
                    if dmin >= 0.0 {
                        Truth::True
                    } else if dmin < -tolerance {
                        Truth::False
                    } else {
                        Truth::Borderline
                    }
                }
                ShapeKind::Down => {
                    if dmax <= 0.0 {
                        Truth::True
                    } else if dmax > tolerance {
                        Truth::False
                    } else {
                        Truth::Borderline
                    }
                }
                ShapeKind::StrictUp => {
                    // Strictly increasing ⟺ f' ≥ 0 with no zero plateau.
                    if dmin >= 0.0 {
                        if mf.zero_derivative_stretch(ms1, ms2) {
                            Truth::False
                        } else {
                            Truth::True
                        }
                    } else if dmin < -tolerance {
                        Truth::False
                    } else {
                        Truth::Borderline
                    }
                }
                ShapeKind::StrictDown => {
                    if dmax <= 0.0 {
                        if mf.zero_derivative_stretch(ms1, ms2) {
                            Truth::False
                        } else {
                            Truth::True
                        }
                    } else if dmax > tolerance {
                        Truth::False
                    } else {
                        Truth::Borderline
                    }
                }
                // Convexity is monotonicity of f', read off the knot
                // structure exactly.
                ShapeKind::Convex => {
                    if mono.nondecreasing {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                ShapeKind::StrictConvex => {
                    if mono.nondecreasing && !mono.has_flat_stretch {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                ShapeKind::Concave => {
                    if mono.nonincreasing {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                ShapeKind::StrictConcave => {
                    if mono.nonincreasing && !mono.has_flat_stretch {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
            })
        }
    }
}

/// Evaluate a formula against an explicit model.
///
/// Interval atoms honour the vacuity conventions: comparison-style atoms
/// (pointwise equality, strict comparison, derivative bounds) are true on
/// an empty interval (`Ms1 > Ms2`); shape atoms are already true on a
/// single point (`Ms1 ≥ Ms2`). `-inf < +inf` is assumed throughout.
pub fn evaluate(
    formula: &Formula,
    model: &ExplicitModel,
    tolerance: f64,
) -> Result<Truth, UnassignedSymbol> {
    match formula {
        Formula::Atom(atom) => evaluate_atom(atom, model, tolerance),
        Formula::Not(inner) => Ok(evaluate(inner, model, tolerance)?.negate()),
        Formula::And(a, b) => Ok(evaluate(a, model, tolerance)?.and(evaluate(b, model, tolerance)?)),
        Formula::Or(a, b) => Ok(evaluate(a, model, tolerance)?.or(evaluate(b, model, tolerance)?)),
    }
}

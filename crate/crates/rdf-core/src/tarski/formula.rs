//! Quantifier-free formulas of real arithmetic.
//!
//! A [`TarskiFormula`] is a boolean combination of polynomial sign atoms
//! `p ⋈ 0` with `⋈ ∈ {=, <, ≤}`, implicitly existentially closed. It has no
//! function symbols, no division, and no infinities — everything the
//! reduction eliminates stays eliminated, which is what makes the backend's
//! job plain real arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::rational::Rational;

use super::poly::{Polynomial, UnassignedVariable};

/// Sign relation of a polynomial atom `p ⋈ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolyRel {
    /// `p = 0`
    Eq,
    /// `p < 0`
    Lt,
    /// `p ≤ 0`
    Le,
}

/// One polynomial sign atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyAtom {
    /// Left-hand side; the right-hand side is always zero.
    pub poly: Polynomial,
    /// The sign relation.
    pub rel: PolyRel,
}

/// Boolean structure over polynomial atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TarskiBody {
    /// The empty conjunction.
    True,
    Atom(PolyAtom),
    And(Vec<TarskiBody>),
    Or(Vec<TarskiBody>),
    Implies(Box<TarskiBody>, Box<TarskiBody>),
    Not(Box<TarskiBody>),
}

impl TarskiBody {
    /// `a = b` as a sign atom.
    pub fn eq(a: Polynomial, b: Polynomial) -> TarskiBody {
        TarskiBody::Atom(PolyAtom { poly: a.sub(&b), rel: PolyRel::Eq })
    }

    /// `a < b` as a sign atom.
    pub fn lt(a: Polynomial, b: Polynomial) -> TarskiBody {
        TarskiBody::Atom(PolyAtom { poly: a.sub(&b), rel: PolyRel::Lt })
    }

    /// `a ≤ b` as a sign atom.
    pub fn le(a: Polynomial, b: Polynomial) -> TarskiBody {
        TarskiBody::Atom(PolyAtom { poly: a.sub(&b), rel: PolyRel::Le })
    }

    /// `a > b` as a sign atom.
    pub fn gt(a: Polynomial, b: Polynomial) -> TarskiBody {
        TarskiBody::lt(b, a)
    }

    /// `a ≥ b` as a sign atom.
    pub fn ge(a: Polynomial, b: Polynomial) -> TarskiBody {
        TarskiBody::le(b, a)
    }

    /// Flattening conjunction; the empty conjunction is [`TarskiBody::True`].
    pub fn and(parts: Vec<TarskiBody>) -> TarskiBody {
        let mut flat = Vec::new();
        for part in parts {
            match part {
                TarskiBody::True => {}
                TarskiBody::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => TarskiBody::True,
            1 => flat.into_iter().next().unwrap(),
            _ => TarskiBody::And(flat),
        }
    }

    /// Disjunction (callers never build the empty one).
    pub fn or(parts: Vec<TarskiBody>) -> TarskiBody {
        debug_assert!(!parts.is_empty(), "empty disjunction has no meaning here");
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            TarskiBody::Or(parts)
        }
    }

    /// Implication.
    pub fn implies(antecedent: TarskiBody, consequent: TarskiBody) -> TarskiBody {
        TarskiBody::Implies(Box::new(antecedent), Box::new(consequent))
    }

    /// Negation.
    pub fn negate(inner: TarskiBody) -> TarskiBody {
        TarskiBody::Not(Box::new(inner))
    }

    fn collect_vars(&self, into: &mut BTreeSet<String>) {
        match self {
            TarskiBody::True => {}
            TarskiBody::Atom(atom) => into.extend(atom.poly.variables()),
            TarskiBody::And(parts) | TarskiBody::Or(parts) => {
                for part in parts {
                    part.collect_vars(into);
                }
            }
            TarskiBody::Implies(a, b) => {
                a.collect_vars(into);
                b.collect_vars(into);
            }
            TarskiBody::Not(inner) => inner.collect_vars(into),
        }
    }
}

/// An implicitly existentially closed arithmetic formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TarskiFormula {
    variables: BTreeSet<String>,
    body: TarskiBody,
}

impl TarskiFormula {
    /// Wraps a body, computing its variable set.
    pub fn new(body: TarskiBody) -> TarskiFormula {
        let mut variables = BTreeSet::new();
        body.collect_vars(&mut variables);
        TarskiFormula { variables, body }
    }

    /// The empty (trivially true) formula.
    pub fn trivial() -> TarskiFormula {
        TarskiFormula::new(TarskiBody::True)
    }

    /// Variables, sorted.
    pub fn variables(&self) -> &BTreeSet<String> {
        &self.variables
    }

    /// The boolean body.
    pub fn body(&self) -> &TarskiBody {
        &self.body
    }

    /// True when the body is the empty conjunction.
    pub fn is_trivially_true(&self) -> bool {
        matches!(self.body, TarskiBody::True)
    }
}

/// Exact evaluation of `formula` under `assignment`; no rounding anywhere.
///
/// The assignment must cover every variable of the formula.
pub fn evaluate_exact(
    formula: &TarskiFormula,
    assignment: &BTreeMap<String, Rational>,
) -> Result<bool, UnassignedVariable> {
    evaluate_body(formula.body(), assignment)
}

fn evaluate_body(
    body: &TarskiBody,
    assignment: &BTreeMap<String, Rational>,
) -> Result<bool, UnassignedVariable> {
    match body {
        TarskiBody::True => Ok(true),
        TarskiBody::Atom(atom) => {
            let value = atom.poly.evaluate(assignment)?;
            Ok(match atom.rel {
                PolyRel::Eq => value.is_zero(),
                PolyRel::Lt => value.is_negative(),
                PolyRel::Le => !value.is_positive(),
            })
        }
        // Evaluation is deliberately non-short-circuiting so missing
        // variables surface regardless of the boolean outcome.
        TarskiBody::And(parts) => {
            let mut all = true;
            for part in parts {
                all &= evaluate_body(part, assignment)?;
            }
            Ok(all)
        }
        TarskiBody::Or(parts) => {
            let mut any = false;
            for part in parts {
                any |= evaluate_body(part, assignment)?;
            }
            Ok(any)
        }
        TarskiBody::Implies(a, b) => {
            let antecedent = evaluate_body(a, assignment)?;
            let consequent = evaluate_body(b, assignment)?;
            Ok(!antecedent || consequent)
        }
        TarskiBody::Not(inner) => Ok(!evaluate_body(inner, assignment)?),
    }
}

//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! These are the atoms' left-hand sides in the arithmetic target language:
//! no division, no function symbols, evaluation is exact. Coefficient zero
//! terms are never stored, so structural equality coincides with polynomial
//! equality.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::rational::{rat, Rational};

/// A variable was needed during evaluation but the assignment lacks it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no value assigned to variable {var}")]
pub struct UnassignedVariable {
    /// The missing variable.
    pub var: String,
}

/// A power product of variables, e.g. `x·x·y`. The empty product is `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<String, u32>);

impl Monomial {
    /// The empty product.
    pub fn one() -> Monomial {
        Monomial::default()
    }

    /// A single variable.
    pub fn var(name: impl Into<String>) -> Monomial {
        Monomial(BTreeMap::from([(name.into(), 1)]))
    }

    /// Pointwise exponent sum.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.0.clone();
        for (var, pow) in &other.0 {
            *exps.entry(var.clone()).or_insert(0) += pow;
        }
        Monomial(exps)
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    /// Variables with their (positive) exponents, in sorted order.
    pub fn exponents(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(v, &p)| (v.as_str(), p))
    }

    fn evaluate(
        &self,
        assignment: &BTreeMap<String, Rational>,
    ) -> Result<Rational, UnassignedVariable> {
        let mut value = rat(1);
        for (var, &pow) in &self.0 {
            let base = assignment
                .get(var)
                .ok_or_else(|| UnassignedVariable { var: var.clone() })?;
            for _ in 0..pow {
                value *= base;
            }
        }
        Ok(value)
    }
}

/// A sparse polynomial: a finite rational combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    /// The zero polynomial.
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    /// A constant polynomial.
    pub fn constant(value: Rational) -> Polynomial {
        let mut poly = Polynomial::zero();
        poly.add_term(Monomial::one(), value);
        poly
    }

    /// A small integer constant.
    pub fn int(value: i64) -> Polynomial {
        Polynomial::constant(rat(value))
    }

    /// A single variable.
    pub fn var(name: impl Into<String>) -> Polynomial {
        let mut poly = Polynomial::zero();
        poly.add_term(Monomial::var(name), rat(1));
        poly
    }

    fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
        }
    }

    /// Sum.
    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (mono, coeff) in &other.terms {
            out.add_term(mono.clone(), coeff.clone());
        }
        out
    }

    /// Difference.
    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Product.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value when the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Largest total degree over the terms (zero polynomial has degree 0).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Every variable that occurs with a nonzero coefficient.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        for mono in self.terms.keys() {
            for (var, _) in mono.exponents() {
                vars.insert(var.to_string());
            }
        }
        vars
    }

    /// Terms in canonical (sorted-monomial) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Exact evaluation under a (sufficiently defined) assignment.
    pub fn evaluate(
        &self,
        assignment: &BTreeMap<String, Rational>,
    ) -> Result<Rational, UnassignedVariable> {
        let mut total = Rational::zero();
        for (mono, coeff) in &self.terms {
            total += mono.evaluate(assignment)? * coeff;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn products_expand_and_cancel_exactly() {
        let x = Polynomial::var("x");
        let one = Polynomial::int(1);
        // (x + 1)(x − 1) = x² − 1
        let expanded = x.add(&one).mul(&x.sub(&one));
        let square = x.mul(&x).sub(&one);
        assert_eq!(expanded, square);
        assert_eq!(expanded.degree(), 2);

        let asg = BTreeMap::from([("x".to_string(), ratio(3, 2))]);
        assert_eq!(expanded.evaluate(&asg).unwrap(), ratio(5, 4));
    }

    #[test]
    fn cancellation_restores_the_zero_polynomial() {
        let x = Polynomial::var("x");
        let difference = x.sub(&x);
        assert!(difference.is_zero());
        assert_eq!(difference, Polynomial::zero());
        assert_eq!(difference.as_constant(), Some(rat(0)));
        // Scaling by zero also collapses.
        assert!(Polynomial::var("y").scale(&rat(0)).is_zero());
    }

    #[test]
    fn evaluation_requires_every_variable() {
        let poly = Polynomial::var("x").add(&Polynomial::var("y"));
        let partial = BTreeMap::from([("x".to_string(), rat(1))]);
        assert_eq!(
            poly.evaluate(&partial).unwrap_err(),
            UnassignedVariable { var: "y".to_string() }
        );
        assert_eq!(poly.variables().len(), 2);
    }

    #[test]
    fn constants_fold_into_a_single_term() {
        let p = Polynomial::int(2).add(&Polynomial::constant(ratio(1, 2)));
        assert_eq!(p.as_constant(), Some(ratio(5, 2)));
        assert_eq!(p.degree(), 0);
        assert!(Polynomial::var("x").as_constant().is_none());
    }
}

//! Serialization to the SMT-LIB exchange format (logic `QF_NRA`).
//!
//! The output is byte-stable: variables are declared in sorted order,
//! polynomial terms print in their canonical monomial order, and rational
//! coefficients are written as exact ratios — `(/ 7 2)`, never `3.5`. The
//! boolean structure of the body is transcribed as-is; a top-level
//! conjunction becomes one assertion per conjunct.

use num_traits::{One, Signed};

use crate::rational::Rational;

use super::formula::{PolyAtom, PolyRel, TarskiBody, TarskiFormula};
use super::poly::Polynomial;

/// Renders `formula` as a complete solver script: logic declaration,
/// sorted constant declarations, assertions, `(check-sat)`, `(get-model)`.
pub fn emit_exchange(formula: &TarskiFormula) -> String {
    let mut out = String::new();
    out.push_str("(set-logic QF_NRA)\n");
    for var in formula.variables() {
        out.push_str("(declare-const ");
        out.push_str(var);
        out.push_str(" Real)\n");
    }
    match formula.body() {
        TarskiBody::True => out.push_str("(assert true)\n"),
        TarskiBody::And(parts) => {
            for part in parts {
                out.push_str("(assert ");
                out.push_str(&body_sexp(part));
                out.push_str(")\n");
            }
        }
        other => {
            out.push_str("(assert ");
            out.push_str(&body_sexp(other));
            out.push_str(")\n");
        }
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

fn body_sexp(body: &TarskiBody) -> String {
    match body {
        TarskiBody::True => "true".to_string(),
        TarskiBody::Atom(atom) => atom_sexp(atom),
        TarskiBody::And(parts) => connective_sexp("and", parts),
        TarskiBody::Or(parts) => connective_sexp("or", parts),
        TarskiBody::Implies(a, b) => {
            format!("(=> {} {})", body_sexp(a), body_sexp(b))
        }
        TarskiBody::Not(inner) => format!("(not {})", body_sexp(inner)),
    }
}

fn connective_sexp(name: &str, parts: &[TarskiBody]) -> String {
    let mut out = String::from("(");
    out.push_str(name);
    for part in parts {
        out.push(' ');
        out.push_str(&body_sexp(part));
    }
    out.push(')');
    out
}

fn atom_sexp(atom: &PolyAtom) -> String {
    let rel = match atom.rel {
        PolyRel::Eq => "=",
        PolyRel::Lt => "<",
        PolyRel::Le => "<=",
    };
    format!("({rel} {} 0)", poly_sexp(&atom.poly))
}

fn poly_sexp(poly: &Polynomial) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let rendered: Vec<String> = poly.terms().map(|(m, c)| term_sexp(m, c)).collect();
    if rendered.len() == 1 {
        rendered.into_iter().next().unwrap()
    } else {
        format!("(+ {})", rendered.join(" "))
    }
}

fn term_sexp(mono: &super::poly::Monomial, coeff: &Rational) -> String {
    let mut factors: Vec<String> = Vec::new();
    for (var, pow) in mono.exponents() {
        // Powers are expanded into repeated multiplication; `^` is not part
        // of the core exchange language.
        for _ in 0..pow {
            factors.push(var.to_string());
        }
    }
    if factors.is_empty() {
        return rational_sexp(coeff);
    }
    if coeff.is_one() {
        return product_sexp(factors);
    }
    if (-coeff).is_one() {
        return format!("(- {})", product_sexp(factors));
    }
    factors.insert(0, rational_sexp(coeff));
    product_sexp(factors)
}

fn product_sexp(factors: Vec<String>) -> String {
    if factors.len() == 1 {
        factors.into_iter().next().unwrap()
    } else {
        format!("(* {})", factors.join(" "))
    }
}

fn rational_sexp(value: &Rational) -> String {
    let magnitude = if value.denom().is_one() {
        value.numer().abs().to_string()
    } else {
        format!("(/ {} {})", value.numer().abs(), value.denom())
    };
    if value.is_negative() {
        format!("(- {magnitude})")
    } else {
        magnitude
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn conjunctions_become_one_assertion_each() {
        // x > 0 ∧ x = y + w
        let x = || Polynomial::var("x");
        let formula = TarskiFormula::new(TarskiBody::and(vec![
            TarskiBody::gt(x(), Polynomial::int(0)),
            TarskiBody::eq(x(), Polynomial::var("y").add(&Polynomial::var("w"))),
        ]));
        let expected = "\
(set-logic QF_NRA)
(declare-const w Real)
(declare-const x Real)
(declare-const y Real)
(assert (< (- x) 0))
(assert (= (+ (- w) x (- y)) 0))
(check-sat)
(get-model)
";
        assert_eq!(emit_exchange(&formula), expected);
    }

    #[test]
    fn implications_nest_inside_one_assertion() {
        let delta = Polynomial::var("y2").sub(&Polynomial::var("y1"));
        let body = TarskiBody::implies(
            TarskiBody::eq(delta, Polynomial::var("t1")),
            TarskiBody::and(vec![
                TarskiBody::eq(Polynomial::var("t1"), Polynomial::var("t2")),
                TarskiBody::le(Polynomial::var("t2"), Polynomial::int(3)),
            ]),
        );
        let script = emit_exchange(&TarskiFormula::new(body));
        assert!(script.contains(
            "(assert (=> (= (+ (- t1) (- y1) y2) 0) \
             (and (= (+ t1 (- t2)) 0) (<= (+ (- 3) t2) 0))))"
        ));
    }

    #[test]
    fn the_empty_formula_asserts_true() {
        assert_eq!(
            emit_exchange(&TarskiFormula::trivial()),
            "(set-logic QF_NRA)\n(assert true)\n(check-sat)\n(get-model)\n"
        );
    }

    #[test]
    fn rationals_print_as_exact_ratios() {
        let body = TarskiBody::eq(
            Polynomial::var("x").scale(&ratio(-7, 2)),
            Polynomial::constant(ratio(1, 3)),
        );
        let script = emit_exchange(&TarskiFormula::new(body));
        assert!(script.contains("(assert (= (+ (- (/ 1 3)) (* (- (/ 7 2)) x)) 0))"));
    }

    #[test]
    fn powers_expand_into_repeated_multiplication() {
        let x = Polynomial::var("x");
        let body = TarskiBody::eq(x.mul(&x).mul(&Polynomial::var("y")), Polynomial::int(2));
        let script = emit_exchange(&TarskiFormula::new(body));
        assert!(script.contains("(assert (= (+ (- 2) (* x x y)) 0))"));
    }

    #[test]
    fn emission_is_byte_stable() {
        let build = || {
            TarskiFormula::new(TarskiBody::and(vec![
                TarskiBody::ge(Polynomial::var("b"), Polynomial::var("a")),
                TarskiBody::lt(Polynomial::var("a"), Polynomial::int(5)),
            ]))
        };
        assert_eq!(emit_exchange(&build()), emit_exchange(&build()));
    }
}

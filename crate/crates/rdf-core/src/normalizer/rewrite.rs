//! The equivalence table that prepares branches for flattening.
//!
//! Applied to fixpoint, these rewrites remove every pattern the flat literal
//! inventory cannot express directly:
//!
//! | pattern            | replacement                                  |
//! |--------------------|----------------------------------------------|
//! | `t1 = t2 - t3`     | `t2 = t1 + t3`                               |
//! | `t1 = t2 / t3`     | `t3 ≠ 0 ∧ t2 = t1 * t3`                      |
//! | `t1 ≠ t2`          | `(t2 > t1) ∨ (t1 > t2)`                      |
//! | `¬(t1 > t2)`       | `(t1 = t2) ∨ (t2 > t1)`                      |
//! | `t1 > t2`          | `t1 = t2 + v ∧ v > 0`, `v` fresh             |
//! | `Up(f)[s1, s2]`    | `(D[f] ≥ 0)[s1, s2]` (either polarity)       |
//! | `Down(f)[s1, s2]`  | `(D[f] ≤ 0)[s1, s2]` (either polarity)       |
//!
//! The `>` rewrite is skipped when the atom already has the retained shape
//! `x > 0` (a variable against the constant zero), and it is only applied in
//! positive positions: the fresh variable is implicitly existential, so the
//! engine first pushes negations down to atoms, where `¬>` has its own rule.
//! Subtraction/division rewrites only fire on top-level equality operands;
//! occurrences nested deeper are handled by term flattening.
//!
//! Strict monotonicity has no derivative characterization — a strictly
//! increasing C¹ function may have isolated zero-derivative points — so
//! `StrictUp`/`StrictDown` pass through untouched.

use super::dnf::to_dnf_with_cap;
use super::{FreshGen, NormalizeError, DEFAULT_BRANCH_CAP};
use crate::formula::{Atom, BinOp, DerRel, ExtEndpoint, Formula, FuncVar, NumRel, NumTerm, ShapeKind};
use num_traits::Zero;

/// Applies the equivalence table to fixpoint and redistributes the result
/// into branches (disjunctive right-hand sides re-enter DNF).
pub fn rewrite_equivalences(branch: &Formula) -> Result<Vec<Formula>, NormalizeError> {
    rewrite_equivalences_with_cap(branch, DEFAULT_BRANCH_CAP)
}

/// [`rewrite_equivalences`] with an explicit branch cap.
pub fn rewrite_equivalences_with_cap(
    branch: &Formula,
    cap: usize,
) -> Result<Vec<Formula>, NormalizeError> {
    let mut gen = FreshGen::for_formula(branch);
    let mut current = nnf(branch, true);
    // Termination: the subtraction/division rules each remove one `-`/`/`
    // node and introduce none; with those counts fixed, the `≠`/`¬>` rules
    // remove one negated comparison each; with those fixed, the `>` rule and
    // the `Up`/`Down` rules remove one non-retained comparison or shape each.
    loop {
        let (next, changed) = rewrite_pass(&current, &mut gen);
        current = next;
        if !changed {
            break;
        }
    }
    to_dnf_with_cap(&current, cap)
}

/// Negation normal form: negations pushed down to sit on atoms only.
pub(crate) fn nnf(formula: &Formula, positive: bool) -> Formula {
    match (formula, positive) {
        (Formula::Atom(atom), true) => Formula::atom(atom.clone()),
        (Formula::Atom(atom), false) => Formula::not(Formula::atom(atom.clone())),
        (Formula::Not(inner), _) => nnf(inner, !positive),
        (Formula::And(l, r), true) | (Formula::Or(l, r), false) => {
            Formula::and(nnf(l, positive), nnf(r, positive))
        }
        (Formula::And(l, r), false) | (Formula::Or(l, r), true) => {
            Formula::or(nnf(l, positive), nnf(r, positive))
        }
    }
}

fn rewrite_pass(formula: &Formula, gen: &mut FreshGen) -> (Formula, bool) {
    match formula {
        Formula::Atom(atom) => match rewrite_positive(atom, gen) {
            Some(next) => (next, true),
            None => (formula.clone(), false),
        },
        Formula::Not(inner) => match &**inner {
            Formula::Atom(atom) => match rewrite_negated(atom) {
                Some(next) => (next, true),
                None => (formula.clone(), false),
            },
            // Unreachable after the entry NNF; re-normalize defensively.
            other => (nnf(other, false), true),
        },
        Formula::And(l, r) => {
            let (gl, cl) = rewrite_pass(l, gen);
            let (gr, cr) = rewrite_pass(r, gen);
            (Formula::and(gl, gr), cl || cr)
        }
        Formula::Or(l, r) => {
            let (gl, cl) = rewrite_pass(l, gen);
            let (gr, cr) = rewrite_pass(r, gen);
            (Formula::or(gl, gr), cl || cr)
        }
    }
}

fn eq(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::atom(Atom::NumRel { rel: NumRel::Eq, lhs, rhs })
}

fn gt(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::atom(Atom::NumRel { rel: NumRel::Gt, lhs, rhs })
}

fn is_zero_const(term: &NumTerm) -> bool {
    matches!(term, NumTerm::Const(c) if c.is_zero())
}

fn der_bound(f: &FuncVar, rel: DerRel, lo: &ExtEndpoint, hi: &ExtEndpoint) -> Formula {
    Formula::atom(Atom::DerRel {
        f: f.clone(),
        rel,
        bound: NumTerm::int(0),
        lo: lo.clone(),
        hi: hi.clone(),
    })
}

fn rewrite_positive(atom: &Atom, gen: &mut FreshGen) -> Option<Formula> {
    match atom {
        Atom::NumRel { rel: NumRel::Eq, lhs, rhs } => {
            if let NumTerm::Binary(BinOp::Sub, a, b) = rhs {
                return Some(eq((**a).clone(), NumTerm::add(lhs.clone(), (**b).clone())));
            }
            if let NumTerm::Binary(BinOp::Sub, a, b) = lhs {
                return Some(eq((**a).clone(), NumTerm::add(rhs.clone(), (**b).clone())));
            }
            if let NumTerm::Binary(BinOp::Div, a, b) = rhs {
                return Some(Formula::and(
                    Formula::not(eq((**b).clone(), NumTerm::int(0))),
                    eq((**a).clone(), NumTerm::mul(lhs.clone(), (**b).clone())),
                ));
            }
            if let NumTerm::Binary(BinOp::Div, a, b) = lhs {
                return Some(Formula::and(
                    Formula::not(eq((**b).clone(), NumTerm::int(0))),
                    eq((**a).clone(), NumTerm::mul(rhs.clone(), (**b).clone())),
                ));
            }
            None
        }
        Atom::NumRel { rel: NumRel::Gt, lhs, rhs } => {
            if matches!(lhs, NumTerm::Var(_)) && is_zero_const(rhs) {
                return None; // already the retained `x > 0` literal shape
            }
            let v = gen.fresh("v");
            Some(Formula::and(
                eq(lhs.clone(), NumTerm::add(rhs.clone(), NumTerm::var(v.clone()))),
                gt(NumTerm::var(v), NumTerm::int(0)),
            ))
        }
        Atom::Shape { kind: ShapeKind::Up, f, lo, hi } => Some(der_bound(f, DerRel::Ge, lo, hi)),
        Atom::Shape { kind: ShapeKind::Down, f, lo, hi } => Some(der_bound(f, DerRel::Le, lo, hi)),
        _ => None,
    }
}

fn rewrite_negated(atom: &Atom) -> Option<Formula> {
    match atom {
        Atom::NumRel { rel: NumRel::Eq, lhs, rhs } => Some(Formula::or(
            gt(rhs.clone(), lhs.clone()),
            gt(lhs.clone(), rhs.clone()),
        )),
        Atom::NumRel { rel: NumRel::Gt, lhs, rhs } => Some(Formula::or(
            eq(lhs.clone(), rhs.clone()),
            gt(rhs.clone(), lhs.clone()),
        )),
        Atom::Shape { kind: ShapeKind::Up, f, lo, hi } => {
            Some(Formula::not(der_bound(f, DerRel::Ge, lo, hi)))
        }
        Atom::Shape { kind: ShapeKind::Down, f, lo, hi } => {
            Some(Formula::not(der_bound(f, DerRel::Le, lo, hi)))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn disequality_splits_into_both_orders() {
        let branches = rewrite_equivalences(&parse("x != y").unwrap()).unwrap();
        assert_eq!(
            branches,
            vec![
                parse("y = x + _v1 & _v1 > 0").unwrap(),
                parse("x = y + _v2 & _v2 > 0").unwrap(),
            ]
        );
    }

    #[test]
    fn negated_comparison_splits_into_equal_or_less() {
        let branches = rewrite_equivalences(&parse("x <= y").unwrap()).unwrap();
        assert_eq!(
            branches,
            vec![
                parse("x = y").unwrap(),
                parse("y = x + _v1 & _v1 > 0").unwrap(),
            ]
        );
    }

    #[test]
    fn comparison_gains_positive_slack_variable() {
        let branches = rewrite_equivalences(&parse("x + 1 > y").unwrap()).unwrap();
        assert_eq!(branches, vec![parse("x + 1 = y + _v1 & _v1 > 0").unwrap()]);
        // The retained shape is untouched.
        let kept = rewrite_equivalences(&parse("x > 0").unwrap()).unwrap();
        assert_eq!(kept, vec![parse("x > 0").unwrap()]);
    }

    #[test]
    fn subtraction_equality_flips_to_addition() {
        let branches = rewrite_equivalences(&parse("x = y - z").unwrap()).unwrap();
        assert_eq!(branches, vec![parse("y = x + z").unwrap()]);
        let flipped = rewrite_equivalences(&parse("y - z = x").unwrap()).unwrap();
        assert_eq!(flipped, vec![parse("y = x + z").unwrap()]);
    }

    #[test]
    fn division_equality_adds_nonzero_guard_and_splits_by_sign() {
        let branches = rewrite_equivalences(&parse("x = y / z").unwrap()).unwrap();
        assert_eq!(
            branches,
            vec![
                parse("0 = z + _v1 & _v1 > 0 & y = x * z").unwrap(),
                parse("z > 0 & y = x * z").unwrap(),
            ]
        );
    }

    #[test]
    fn monotone_shapes_become_derivative_bounds_in_both_polarities() {
        let up = rewrite_equivalences(&parse("Up(f)[a, b]").unwrap()).unwrap();
        assert_eq!(up, vec![parse("(D[f] >= 0)[a, b]").unwrap()]);

        let down = rewrite_equivalences(&parse("Down(f)[-inf, b]").unwrap()).unwrap();
        assert_eq!(down, vec![parse("(D[f] <= 0)[-inf, b]").unwrap()]);

        let not_up = rewrite_equivalences(&parse("!Up(f)[a, b]").unwrap()).unwrap();
        assert_eq!(not_up, vec![parse("!(D[f] >= 0)[a, b]").unwrap()]);

        let not_down = rewrite_equivalences(&parse("!Down(f)[a, b]").unwrap()).unwrap();
        assert_eq!(not_down, vec![parse("!(D[f] <= 0)[a, b]").unwrap()]);
    }

    #[test]
    fn strict_monotone_shapes_are_untouched() {
        for text in ["StrictUp(f)[a, b]", "!StrictUp(f)[a, b]", "StrictDown(f)[a, b]"] {
            let f = parse(text).unwrap();
            assert_eq!(rewrite_equivalences(&f).unwrap(), vec![f], "{text}");
        }
    }

    #[test]
    fn negated_functional_atoms_are_preserved() {
        for text in ["(f != g)[a, b]", "(D[f] != 0)[a, +inf]", "!Convex(f)[a, b]"] {
            let f = parse(text).unwrap();
            assert_eq!(rewrite_equivalences(&f).unwrap(), vec![f], "{text}");
        }
    }

    #[test]
    fn fresh_slack_variables_avoid_source_names() {
        let branches = rewrite_equivalences(&parse("x > _v1").unwrap()).unwrap();
        assert_eq!(branches, vec![parse("x = _v1 + _v2 & _v2 > 0").unwrap()]);
    }
}

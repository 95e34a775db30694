//! Negative-literal removal: each negated functional literal becomes a
//! positive existential gadget asserting a point where the property fails.

use crate::formula::{Atom, DerRel, Formula, NumRel, NumTerm, ShapeKind};
use crate::normalizer::{normalize, Conjunct, EndVar, FunAtom, Literal, NormalizeError};

/// Replaces every negated functional literal by its positive gadget.
///
/// A negated interval property holds exactly when some point (or point pair,
/// or point triple) inside the interval violates the property; the gadget
/// asserts such points with fresh variables. Interval guards against an
/// infinite bound of the matching side are vacuously true and omitted; a
/// guard of the form `+inf ≤ x` or `x ≤ -inf` is vacuously false, in which
/// case the whole conjunct is unsatisfiable and the branch is dropped
/// (empty result).
///
/// The gadgets introduce disequalities and non-strict comparisons, so the
/// rebuilt conjunction re-enters [`normalize`] and the result is a list of
/// conjuncts whose disjunction is equisatisfiable with the input.
pub fn step1_remove_negatives(conjunct: &Conjunct) -> Result<Vec<Conjunct>, NormalizeError> {
    let negatives: Vec<FunAtom> = conjunct
        .literals()
        .iter()
        .filter_map(|lit| match lit {
            Literal::Fun { positive: false, atom } => Some(atom.clone()),
            _ => None,
        })
        .collect();
    if negatives.is_empty() {
        return Ok(vec![conjunct.clone()]);
    }

    // Keep the positive literals; draw gadget variables from the conjunct's
    // own namespace so they cannot collide with anything retained.
    let mut base = conjunct.clone();
    for atom in &negatives {
        base.remove(&Literal::not_fun(atom.clone()));
    }

    let mut parts: Vec<Formula> = Vec::new();
    for atom in &negatives {
        match gadget(&mut base, atom) {
            Some(formula) => parts.push(formula),
            // A vacuously false guard falsifies the conjunct.
            None => return Ok(Vec::new()),
        }
    }
    if let Some(rest) = base.to_formula() {
        parts.push(rest);
    }
    let formula = Formula::conj(parts).expect("at least one gadget was built");
    normalize(&formula)
}

fn var(name: &str) -> NumTerm {
    NumTerm::var(name)
}

fn eq(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::atom(Atom::NumRel { rel: NumRel::Eq, lhs, rhs })
}

fn gt(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::atom(Atom::NumRel { rel: NumRel::Gt, lhs, rhs })
}

fn le(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::not(gt(lhs, rhs))
}

fn ge(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::not(gt(rhs, lhs))
}

fn lt(lhs: NumTerm, rhs: NumTerm) -> Formula {
    gt(rhs, lhs)
}

fn neq(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::not(eq(lhs, rhs))
}

/// `bound ≤ x`, with the infinities resolved: `-inf` is vacuously below
/// everything and `+inf` vacuously above (`None` marks an unsatisfiable
/// guard).
fn lower_guard(bound: &EndVar, x: &str) -> Option<Option<Formula>> {
    match bound {
        EndVar::NegInf => Some(None),
        EndVar::PosInf => None,
        EndVar::Var(a) => Some(Some(le(var(a), var(x)))),
    }
}

/// `x ≤ bound`, mirrored.
fn upper_guard(x: &str, bound: &EndVar) -> Option<Option<Formula>> {
    match bound {
        EndVar::PosInf => Some(None),
        EndVar::NegInf => None,
        EndVar::Var(b) => Some(Some(le(var(x), var(b)))),
    }
}

/// Appends a guard unless vacuously true; `None` when vacuously false.
fn guard(g: Option<Option<Formula>>, parts: &mut Vec<Formula>) -> Option<()> {
    if let Some(formula) = g? {
        parts.push(formula);
    }
    Some(())
}

/// The positive existential formula equivalent to `¬atom`, with fresh
/// variables drawn from (and reserved in) `base`. `None` when a guard is
/// vacuously false.
fn gadget(base: &mut Conjunct, atom: &FunAtom) -> Option<Formula> {
    let mut parts: Vec<Formula> = Vec::new();
    match atom {
        // Some point of the interval where the values differ.
        FunAtom::Eq { f, g, lo, hi } => {
            let x = base.fresh("x");
            let y1 = base.fresh("y");
            let y2 = base.fresh("y");
            guard(lower_guard(lo, &x), &mut parts)?;
            guard(upper_guard(&x, hi), &mut parts)?;
            parts.push(eq(var(&y1), NumTerm::apply(f.clone(), var(&x))));
            parts.push(eq(var(&y2), NumTerm::apply(g.clone(), var(&x))));
            parts.push(neq(var(&y1), var(&y2)));
        }
        // Some point of the (finite) interval where `f` does not exceed `g`.
        FunAtom::Gt { f, g, lo, hi } => {
            let x = base.fresh("x");
            let y1 = base.fresh("y");
            let y2 = base.fresh("y");
            parts.push(le(var(lo), var(&x)));
            parts.push(le(var(&x), var(hi)));
            parts.push(eq(var(&y1), NumTerm::apply(f.clone(), var(&x))));
            parts.push(eq(var(&y2), NumTerm::apply(g.clone(), var(&x))));
            parts.push(le(var(&y1), var(&y2)));
        }
        // Some point where the derivative violates the bound relation.
        FunAtom::Der { f, rel, bound, lo, hi } => {
            let x = base.fresh("x");
            let y1 = base.fresh("y");
            guard(lower_guard(lo, &x), &mut parts)?;
            guard(upper_guard(&x, hi), &mut parts)?;
            parts.push(eq(var(&y1), NumTerm::deriv(f.clone(), var(&x))));
            let b = var(bound);
            parts.push(match rel {
                DerRel::Eq => neq(var(&y1), b),
                DerRel::Gt => le(var(&y1), b),
                DerRel::Ge => lt(var(&y1), b),
                DerRel::Lt => ge(var(&y1), b),
                DerRel::Le => gt(var(&y1), b),
            });
        }
        // Monotonicity: an ordered point pair where the values step the
        // wrong way. Convexity: an ordered point triple whose middle value
        // sits on the wrong side of the chord through the outer two.
        FunAtom::Shape { kind, f, lo, hi } => match kind {
            ShapeKind::Up | ShapeKind::StrictUp | ShapeKind::Down | ShapeKind::StrictDown => {
                let x1 = base.fresh("x");
                let x2 = base.fresh("x");
                let y1 = base.fresh("y");
                let y2 = base.fresh("y");
                guard(lower_guard(lo, &x1), &mut parts)?;
                parts.push(lt(var(&x1), var(&x2)));
                guard(upper_guard(&x2, hi), &mut parts)?;
                parts.push(eq(var(&y1), NumTerm::apply(f.clone(), var(&x1))));
                parts.push(eq(var(&y2), NumTerm::apply(f.clone(), var(&x2))));
                parts.push(match kind {
                    ShapeKind::Up => gt(var(&y1), var(&y2)),
                    ShapeKind::StrictUp => ge(var(&y1), var(&y2)),
                    ShapeKind::Down => lt(var(&y1), var(&y2)),
                    ShapeKind::StrictDown => le(var(&y1), var(&y2)),
                    _ => unreachable!(),
                });
            }
            ShapeKind::Convex
            | ShapeKind::StrictConvex
            | ShapeKind::Concave
            | ShapeKind::StrictConcave => {
                let x1 = base.fresh("x");
                let x2 = base.fresh("x");
                let x3 = base.fresh("x");
                let y1 = base.fresh("y");
                let y2 = base.fresh("y");
                let y3 = base.fresh("y");
                guard(lower_guard(lo, &x1), &mut parts)?;
                parts.push(lt(var(&x1), var(&x2)));
                parts.push(lt(var(&x2), var(&x3)));
                guard(upper_guard(&x3, hi), &mut parts)?;
                for (y, x) in [(&y1, &x1), (&y2, &x2), (&y3, &x3)] {
                    parts.push(eq(var(y), NumTerm::apply(f.clone(), var(x))));
                }
                // Rise of the middle point against the chord, cross-multiplied
                // by the (positive) spans so no division is needed.
                let middle = NumTerm::mul(
                    NumTerm::sub(var(&y2), var(&y1)),
                    NumTerm::sub(var(&x3), var(&x1)),
                );
                let chord = NumTerm::mul(
                    NumTerm::sub(var(&x2), var(&x1)),
                    NumTerm::sub(var(&y3), var(&y1)),
                );
                parts.push(match kind {
                    ShapeKind::Convex => gt(middle, chord),
                    ShapeKind::StrictConvex => ge(middle, chord),
                    ShapeKind::Concave => lt(middle, chord),
                    ShapeKind::StrictConcave => le(middle, chord),
                    _ => unreachable!(),
                });
            }
        },
    }
    Formula::conj(parts)
}

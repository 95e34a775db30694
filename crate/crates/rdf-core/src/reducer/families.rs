//! Explicit sampling (step 2) and functional elimination (step 3).
//!
//! Step 2 introduces, per function and chain position, one value sample and
//! one derivative sample. Step 3 then rewrites every positive functional
//! literal into polynomial constraints over those samples and drops the
//! literals that mention functions. The constraint families encode, per
//! interval atom:
//!
//! - value/derivative equalities and comparisons at the sampled points;
//! - slope bounds through divided differences between adjacent points,
//!   emitted denominator-free (the chain order makes every span positive);
//! - collapse implications that force derivative agreement when a secant
//!   attains a non-strict bound (the mean value theorem leaves no slack);
//! - asymptotic-slope parameters standing in for the behaviour beyond the
//!   chain when an interval reaches an infinity.
//!
//! Interval atoms are three-way: a reversed interval satisfies any atom
//! vacuously, a single-point interval keeps only the pointwise content of
//! comparison atoms and satisfies shape atoms vacuously. Reversed and merged
//! endpoints both arise from the arrangement fan, so the families implement
//! those truth conditions exactly rather than assuming a proper interval.

use crate::formula::{DerRel, FuncVar, ShapeKind};
use crate::normalizer::{Conjunct, EndVar, FunAtom, Literal};
use crate::tarski::{Polynomial, TarskiBody, TarskiFormula};

use super::{MissingChain, ReductionContext};

/// Adds value and derivative samples at every chain position, linking
/// preexisting applications at chain points to the canonical samples.
pub fn step2_explicit_eval(conjunct: &Conjunct, ctx: &ReductionContext) -> Conjunct {
    let mut out = conjunct.clone();
    for f in ctx.functions() {
        for (pos, v) in ctx.chain().iter().enumerate() {
            let j = pos + 1;
            out.insert(Literal::App {
                y: ctx.value_var(f, j).to_string(),
                f: f.clone(),
                x: v.clone(),
            });
            out.insert(Literal::DApp {
                y: ctx.deriv_var(f, j).to_string(),
                f: f.clone(),
                x: v.clone(),
            });
        }
    }
    for lit in conjunct.literals() {
        let (y, sample) = match lit {
            Literal::App { y, f, x } => match ctx.position(x) {
                Some(j) => (y, ctx.value_var(f, j)),
                None => continue,
            },
            Literal::DApp { y, f, x } => match ctx.position(x) {
                Some(j) => (y, ctx.deriv_var(f, j)),
                None => continue,
            },
            _ => continue,
        };
        if y != sample {
            out.insert(Literal::Eq { x: y.clone(), y: sample.to_string() });
        }
    }
    out
}

/// Transcribes the conjunct into a function-free arithmetic formula.
///
/// Arithmetic literals map directly to polynomial atoms; positive functional
/// literals expand into their constraint families; application literals are
/// dropped after checking that their argument is a sampled chain point.
/// Negated functional literals must have been eliminated beforehand.
pub fn step3_remove_functionals(
    conjunct: &Conjunct,
    ctx: &ReductionContext,
) -> Result<TarskiFormula, MissingChain> {
    let mut parts: Vec<TarskiBody> = Vec::new();
    for lit in conjunct.literals() {
        match lit {
            Literal::Sum { x, y, w } => {
                parts.push(TarskiBody::eq(pvar(x), pvar(y).add(&pvar(w))));
            }
            Literal::Prod { x, y, w } => {
                parts.push(TarskiBody::eq(pvar(x), pvar(y).mul(&pvar(w))));
            }
            Literal::Pos { x } => parts.push(TarskiBody::gt(pvar(x), Polynomial::zero())),
            Literal::ConstDef { x, c } => {
                parts.push(TarskiBody::eq(pvar(x), Polynomial::constant(c.clone())));
            }
            Literal::Eq { x, y } => parts.push(TarskiBody::eq(pvar(x), pvar(y))),
            Literal::Neq { x, y } => {
                parts.push(TarskiBody::negate(TarskiBody::eq(pvar(x), pvar(y))));
            }
            Literal::App { x, .. } | Literal::DApp { x, .. } => {
                // Dropped: the samples carry the constraint. Sound only when
                // the application point is on the chain.
                if ctx.position(x).is_none() {
                    return Err(MissingChain { var: x.clone() });
                }
            }
            Literal::Fun { positive: false, .. } => {
                unreachable!("negated functional literals are removed before elimination")
            }
            Literal::Fun { positive: true, atom } => emit_family(atom, ctx, &mut parts)?,
        }
    }
    Ok(TarskiFormula::new(TarskiBody::and(parts)))
}

fn pvar(name: &str) -> Polynomial {
    Polynomial::var(name)
}

/// How an interval sits on the chain.
enum Span {
    /// Lower endpoint strictly after the upper one: every atom is vacuous.
    Reversed,
    /// Both endpoints at one chain point: pointwise content only.
    Point,
    /// A genuine interval (any infinite end always qualifies).
    Proper,
}

fn span(lo: &EndVar, hi: &EndVar, a: usize, b: usize) -> Span {
    match (lo, hi) {
        // Not constructible from validated input; vacuous by convention.
        (EndVar::PosInf, _) | (_, EndVar::NegInf) => Span::Reversed,
        (EndVar::Var(_), EndVar::Var(_)) => {
            if a < b {
                Span::Proper
            } else if a == b {
                Span::Point
            } else {
                Span::Reversed
            }
        }
        _ => Span::Proper,
    }
}

/// `lhs ⋈ rhs` as a polynomial atom.
fn rel_body(rel: DerRel, lhs: Polynomial, rhs: Polynomial) -> TarskiBody {
    match rel {
        DerRel::Eq => TarskiBody::eq(lhs, rhs),
        DerRel::Gt => TarskiBody::gt(lhs, rhs),
        DerRel::Ge => TarskiBody::ge(lhs, rhs),
        DerRel::Lt => TarskiBody::lt(lhs, rhs),
        DerRel::Le => TarskiBody::le(lhs, rhs),
    }
}

/// The constraint family of one positive functional atom.
fn emit_family(
    atom: &FunAtom,
    ctx: &ReductionContext,
    parts: &mut Vec<TarskiBody>,
) -> Result<(), MissingChain> {
    match atom {
        FunAtom::Eq { f, g, lo, hi } => {
            let a = ctx.ind(lo)?;
            let b = ctx.ind(hi)?;
            match span(lo, hi, a, b) {
                Span::Reversed => {}
                // Pointwise, two functions agree on a single point exactly
                // when their values there agree; derivatives stay free.
                Span::Point => {
                    parts.push(TarskiBody::eq(
                        pvar(ctx.value_var(f, a)),
                        pvar(ctx.value_var(g, a)),
                    ));
                }
                Span::Proper => {
                    for i in a..=b {
                        parts.push(TarskiBody::eq(
                            pvar(ctx.value_var(f, i)),
                            pvar(ctx.value_var(g, i)),
                        ));
                        parts.push(TarskiBody::eq(
                            pvar(ctx.deriv_var(f, i)),
                            pvar(ctx.deriv_var(g, i)),
                        ));
                    }
                    if matches!(lo, EndVar::NegInf) {
                        parts.push(TarskiBody::eq(
                            pvar(&ctx.asymptotes(f).start),
                            pvar(&ctx.asymptotes(g).start),
                        ));
                    }
                    if matches!(hi, EndVar::PosInf) {
                        parts.push(TarskiBody::eq(
                            pvar(&ctx.asymptotes(f).end),
                            pvar(&ctx.asymptotes(g).end),
                        ));
                    }
                }
            }
        }
        FunAtom::Gt { f, g, lo, hi } => {
            let a = ctx
                .position(lo)
                .ok_or_else(|| MissingChain { var: lo.clone() })?;
            let b = ctx
                .position(hi)
                .ok_or_else(|| MissingChain { var: hi.clone() })?;
            // An empty range means a reversed (vacuous) interval; a == b
            // realizes the single pointwise comparison of merged endpoints.
            for i in a..=b {
                parts.push(TarskiBody::gt(
                    pvar(ctx.value_var(f, i)),
                    pvar(ctx.value_var(g, i)),
                ));
            }
        }
        FunAtom::Der { f, rel, bound, lo, hi } => {
            let a = ctx.ind(lo)?;
            let b = ctx.ind(hi)?;
            match span(lo, hi, a, b) {
                Span::Reversed => {}
                Span::Point => {
                    parts.push(rel_body(*rel, pvar(ctx.deriv_var(f, a)), pvar(bound)));
                }
                Span::Proper => {
                    derivative_bound_family(f, *rel, pvar(bound), lo, hi, a, b, ctx, parts);
                }
            }
        }
        FunAtom::Shape { kind, f, lo, hi } => {
            let a = ctx.ind(lo)?;
            let b = ctx.ind(hi)?;
            // Shape atoms need a nondegenerate interval; on a single point
            // (or reversed) they hold vacuously.
            if !matches!(span(lo, hi, a, b), Span::Proper) {
                return Ok(());
            }
            match kind {
                // Nondecreasing/nonincreasing are exactly derivative-sign
                // bounds (how the normalizer rewrites them; kept total here
                // for directly built conjuncts).
                ShapeKind::Up => {
                    derivative_bound_family(
                        f,
                        DerRel::Ge,
                        Polynomial::zero(),
                        lo,
                        hi,
                        a,
                        b,
                        ctx,
                        parts,
                    );
                }
                ShapeKind::Down => {
                    derivative_bound_family(
                        f,
                        DerRel::Le,
                        Polynomial::zero(),
                        lo,
                        hi,
                        a,
                        b,
                        ctx,
                        parts,
                    );
                }
                ShapeKind::StrictUp | ShapeKind::StrictDown => {
                    let up = matches!(kind, ShapeKind::StrictUp);
                    for i in a..=b {
                        let t = pvar(ctx.deriv_var(f, i));
                        parts.push(if up {
                            TarskiBody::ge(t, Polynomial::zero())
                        } else {
                            TarskiBody::le(t, Polynomial::zero())
                        });
                    }
                    for j in a..b {
                        let prev = pvar(ctx.value_var(f, j));
                        let next = pvar(ctx.value_var(f, j + 1));
                        parts.push(if up {
                            TarskiBody::gt(next, prev)
                        } else {
                            TarskiBody::gt(prev, next)
                        });
                    }
                    if matches!(lo, EndVar::NegInf) {
                        let start = pvar(&ctx.asymptotes(f).start);
                        parts.push(if up {
                            TarskiBody::gt(start, Polynomial::zero())
                        } else {
                            TarskiBody::lt(start, Polynomial::zero())
                        });
                    }
                    if matches!(hi, EndVar::PosInf) {
                        let end = pvar(&ctx.asymptotes(f).end);
                        parts.push(if up {
                            TarskiBody::gt(end, Polynomial::zero())
                        } else {
                            TarskiBody::lt(end, Polynomial::zero())
                        });
                    }
                }
                ShapeKind::Convex
                | ShapeKind::Concave
                | ShapeKind::StrictConvex
                | ShapeKind::StrictConcave => {
                    convexity_family(*kind, f, lo, hi, a, b, ctx, parts);
                }
            }
        }
    }
    Ok(())
}

/// The family for a derivative bound `D[f] ⋈ bound` over a proper interval:
/// sampled derivatives, denominator-free divided differences, collapse
/// implications for the non-strict bounds, and asymptotic-slope bounds at
/// infinite ends.
#[allow(clippy::too_many_arguments)]
fn derivative_bound_family(
    f: &FuncVar,
    rel: DerRel,
    bound: Polynomial,
    lo: &EndVar,
    hi: &EndVar,
    a: usize,
    b: usize,
    ctx: &ReductionContext,
    parts: &mut Vec<TarskiBody>,
) {
    for i in a..=b {
        parts.push(rel_body(rel, pvar(ctx.deriv_var(f, i)), bound.clone()));
    }
    for j in a..b {
        let rise = pvar(ctx.value_var(f, j + 1)).sub(&pvar(ctx.value_var(f, j)));
        let run = pvar(&ctx.chain()[j]).sub(&pvar(&ctx.chain()[j - 1]));
        let scaled = bound.mul(&run);
        // (y_{j+1} - y_j) ⋈ bound·(v_{j+1} - v_j); the chain order makes the
        // span positive, so the relation direction is preserved.
        parts.push(rel_body(rel, rise.clone(), scaled.clone()));
        if matches!(rel, DerRel::Le | DerRel::Ge) {
            // A secant that attains a one-sided bound pins the derivative at
            // both window ends (mean value theorem: some interior point
            // attains the secant slope, and the bound leaves no room on the
            // other side).
            parts.push(TarskiBody::implies(
                TarskiBody::eq(rise, scaled),
                TarskiBody::and(vec![
                    TarskiBody::eq(pvar(ctx.deriv_var(f, j)), bound.clone()),
                    TarskiBody::eq(pvar(ctx.deriv_var(f, j + 1)), bound.clone()),
                ]),
            ));
        }
    }
    if matches!(lo, EndVar::NegInf) {
        parts.push(rel_body(rel, pvar(&ctx.asymptotes(f).start), bound.clone()));
    }
    if matches!(hi, EndVar::PosInf) {
        parts.push(rel_body(rel, pvar(&ctx.asymptotes(f).end), bound));
    }
}

/// The window family for the four convexity shapes over a proper interval.
#[allow(clippy::too_many_arguments)]
fn convexity_family(
    kind: ShapeKind,
    f: &FuncVar,
    lo: &EndVar,
    hi: &EndVar,
    a: usize,
    b: usize,
    ctx: &ReductionContext,
    parts: &mut Vec<TarskiBody>,
) {
    let convex = matches!(kind, ShapeKind::Convex | ShapeKind::StrictConvex);
    let strict = matches!(kind, ShapeKind::StrictConvex | ShapeKind::StrictConcave);
    for i in a..b {
        let t_lo = pvar(ctx.deriv_var(f, i));
        let t_hi = pvar(ctx.deriv_var(f, i + 1));
        let rise = pvar(ctx.value_var(f, i + 1)).sub(&pvar(ctx.value_var(f, i)));
        let run = pvar(&ctx.chain()[i]).sub(&pvar(&ctx.chain()[i - 1]));
        let lo_scaled = t_lo.mul(&run);
        let hi_scaled = t_hi.mul(&run);
        // t_i ≤ secant slope ≤ t_{i+1} for convex (reversed for concave),
        // cross-multiplied by the positive span; strict shapes use strict
        // comparisons and need no collapse rule.
        let (first, second) = if convex {
            (
                compare(strict, lo_scaled.clone(), rise.clone()),
                compare(strict, rise.clone(), hi_scaled.clone()),
            )
        } else {
            (
                compare(strict, rise.clone(), lo_scaled.clone()),
                compare(strict, hi_scaled.clone(), rise.clone()),
            )
        };
        parts.push(first);
        parts.push(second);
        if !strict {
            // A secant attaining either endpoint slope flattens the window:
            // the derivative is monotone across it, so touching one end
            // forces both ends to agree.
            parts.push(TarskiBody::implies(
                TarskiBody::or(vec![
                    TarskiBody::eq(rise.clone(), lo_scaled),
                    TarskiBody::eq(rise, hi_scaled),
                ]),
                TarskiBody::eq(
                    pvar(ctx.deriv_var(f, i)),
                    pvar(ctx.deriv_var(f, i + 1)),
                ),
            ));
        }
    }
    if matches!(lo, EndVar::NegInf) {
        let start = pvar(&ctx.asymptotes(f).start);
        let first = pvar(ctx.deriv_var(f, a));
        parts.push(match (convex, strict) {
            (true, false) => TarskiBody::le(start, first),
            (true, true) => TarskiBody::lt(start, first),
            (false, false) => TarskiBody::ge(start, first),
            (false, true) => TarskiBody::gt(start, first),
        });
    }
    if matches!(hi, EndVar::PosInf) {
        let end = pvar(&ctx.asymptotes(f).end);
        let last = pvar(ctx.deriv_var(f, b));
        parts.push(match (convex, strict) {
            (true, false) => TarskiBody::ge(end, last),
            (true, true) => TarskiBody::gt(end, last),
            (false, false) => TarskiBody::le(end, last),
            (false, true) => TarskiBody::lt(end, last),
        });
    }
}

/// `lhs ≤ rhs`, or `lhs < rhs` when strict.
fn compare(strict: bool, lhs: Polynomial, rhs: Polynomial) -> TarskiBody {
    if strict {
        TarskiBody::lt(lhs, rhs)
    } else {
        TarskiBody::le(lhs, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalizer::FreshGen;
    use crate::rational::{rat, Rational};
    use crate::tarski::evaluate_exact;
    use std::collections::BTreeMap;

    fn f() -> FuncVar {
        FuncVar::named("f")
    }

    fn g() -> FuncVar {
        FuncVar::named("g")
    }

    fn ordered(literals: Vec<Literal>, chain: &[&str]) -> (Conjunct, ReductionContext) {
        let mut conjunct = Conjunct::from_literals(literals, FreshGen::default());
        let chain: Vec<String> = chain.iter().map(|s| s.to_string()).collect();
        let ctx = ReductionContext::build(chain, &mut conjunct);
        (conjunct, ctx)
    }

    fn der(rel: DerRel, bound: &str, lo: EndVar, hi: EndVar) -> Literal {
        Literal::fun(FunAtom::Der { f: f(), rel, bound: bound.into(), lo, hi })
    }

    fn shape(kind: ShapeKind, lo: EndVar, hi: EndVar) -> Literal {
        Literal::fun(FunAtom::Shape { kind, f: f(), lo, hi })
    }

    fn v(name: &str) -> EndVar {
        EndVar::Var(name.into())
    }

    fn assignment(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, n)| (k.to_string(), rat(*n))).collect()
    }

    fn implication_count(body: &TarskiBody) -> usize {
        match body {
            TarskiBody::Implies(a, b) => 1 + implication_count(a) + implication_count(b),
            TarskiBody::And(parts) | TarskiBody::Or(parts) => {
                parts.iter().map(implication_count).sum()
            }
            TarskiBody::Not(inner) => implication_count(inner),
            TarskiBody::True | TarskiBody::Atom(_) => 0,
        }
    }

    #[test]
    fn sampling_adds_values_derivatives_and_links() {
        let (conjunct, ctx) = ordered(
            vec![
                Literal::App { y: "u".into(), f: f(), x: "a".into() },
                der(DerRel::Ge, "m", v("a"), v("b")),
            ],
            &["a", "b"],
        );
        let out = step2_explicit_eval(&conjunct, &ctx);
        assert_eq!(out.len(), conjunct.len() + 5);
        for expected in [
            Literal::App { y: "_y1_f".into(), f: f(), x: "a".into() },
            Literal::DApp { y: "_t1_f".into(), f: f(), x: "a".into() },
            Literal::App { y: "_y2_f".into(), f: f(), x: "b".into() },
            Literal::DApp { y: "_t2_f".into(), f: f(), x: "b".into() },
            Literal::Eq { x: "u".into(), y: "_y1_f".into() },
        ] {
            assert!(out.contains(&expected), "missing {expected:?}");
        }
    }

    #[test]
    fn sampling_without_functions_is_identity() {
        let (conjunct, ctx) = ordered(
            vec![Literal::Sum { x: "x".into(), y: "y".into(), w: "w".into() }],
            &[],
        );
        assert_eq!(step2_explicit_eval(&conjunct, &ctx), conjunct);
    }

    #[test]
    fn function_equality_spans_the_index_range() {
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Eq { f: f(), g: g(), lo: v("v2"), hi: v("v3") })],
            &["v1", "v2", "v3", "v4"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        let expected = TarskiBody::and(vec![
            TarskiBody::eq(pvar("_y2_f"), pvar("_y2_g")),
            TarskiBody::eq(pvar("_t2_f"), pvar("_t2_g")),
            TarskiBody::eq(pvar("_y3_f"), pvar("_y3_g")),
            TarskiBody::eq(pvar("_t3_f"), pvar("_t3_g")),
        ]);
        assert_eq!(formula.body(), &expected);
    }

    #[test]
    fn strict_monotonicity_on_a_left_tail() {
        let (conjunct, ctx) = ordered(
            vec![shape(ShapeKind::StrictUp, EndVar::NegInf, v("v1"))],
            &["v1"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        let expected = TarskiBody::and(vec![
            TarskiBody::ge(pvar("_t1_f"), Polynomial::zero()),
            TarskiBody::gt(pvar("_g0_f"), Polynomial::zero()),
        ]);
        assert_eq!(formula.body(), &expected);
    }

    #[test]
    fn derivative_lower_bound_family_with_collapse() {
        let (conjunct, ctx) = ordered(
            vec![
                Literal::Sum { x: "b".into(), y: "a".into(), w: "d".into() },
                Literal::Pos { x: "d".into() },
                der(DerRel::Ge, "m", v("a"), v("b")),
            ],
            &["a", "b"],
        );
        let sampled = step2_explicit_eval(&conjunct, &ctx);
        let formula = step3_remove_functionals(&sampled, &ctx).unwrap();
        assert_eq!(implication_count(formula.body()), 1);

        // A uniform slope of 1 with bound 1 satisfies everything, including
        // the collapse implication (the secant attains the bound and both
        // derivative samples equal it).
        let base = [
            ("a", 0),
            ("b", 1),
            ("d", 1),
            ("m", 1),
            ("_y1_f", 0),
            ("_y2_f", 1),
            ("_t1_f", 1),
            ("_t2_f", 1),
        ];
        assert_eq!(evaluate_exact(&formula, &assignment(&base)), Ok(true));

        // Same secant, but one endpoint derivative exceeds the bound: the
        // collapse implication must reject it.
        let mut pinned = assignment(&base);
        pinned.insert("_t1_f".into(), rat(2));
        assert_eq!(evaluate_exact(&formula, &pinned), Ok(false));

        // A secant below the bound violates the divided-difference family.
        let mut shallow = assignment(&base);
        shallow.insert("_y2_f".into(), rat(0));
        assert_eq!(evaluate_exact(&formula, &shallow), Ok(false));
    }

    #[test]
    fn strict_derivative_bounds_have_no_collapse_rule() {
        let (conjunct, ctx) = ordered(
            vec![der(DerRel::Gt, "m", v("a"), v("b"))],
            &["a", "b"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        assert_eq!(implication_count(formula.body()), 0);
    }

    #[test]
    fn merged_endpoints_keep_pointwise_content_only() {
        // f = g on a single point constrains the values, not the slopes.
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Eq { f: f(), g: g(), lo: v("v"), hi: v("v") })],
            &["v"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        assert_eq!(formula.body(), &TarskiBody::eq(pvar("_y1_f"), pvar("_y1_g")));

        // A derivative bound on a single point constrains that sample only.
        let (conjunct, ctx) = ordered(vec![der(DerRel::Lt, "m", v("v"), v("v"))], &["v"]);
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        assert_eq!(formula.body(), &TarskiBody::lt(pvar("_t1_f"), pvar("m")));
    }

    #[test]
    fn shapes_on_degenerate_or_reversed_intervals_are_vacuous() {
        let (conjunct, ctx) = ordered(
            vec![shape(ShapeKind::StrictConvex, v("v"), v("v"))],
            &["v"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        assert!(formula.is_trivially_true());

        let (conjunct, ctx) = ordered(
            vec![der(DerRel::Ge, "m", v("v"), v("u"))],
            &["u", "v"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        assert!(formula.is_trivially_true());
    }

    #[test]
    fn off_chain_points_are_reported() {
        let (conjunct, ctx) = ordered(
            vec![der(DerRel::Ge, "m", v("q"), v("v"))],
            &["v"],
        );
        assert_eq!(
            step3_remove_functionals(&conjunct, &ctx),
            Err(MissingChain { var: "q".into() })
        );

        let (conjunct, ctx) = ordered(
            vec![Literal::App { y: "y".into(), f: f(), x: "p".into() }],
            &[],
        );
        assert_eq!(
            step3_remove_functionals(&conjunct, &ctx),
            Err(MissingChain { var: "p".into() })
        );
    }

    #[test]
    fn convexity_windows_bound_the_secant_by_both_slopes() {
        let (conjunct, ctx) = ordered(
            vec![shape(ShapeKind::Convex, EndVar::NegInf, EndVar::PosInf)],
            &["u", "v"],
        );
        let sampled = step2_explicit_eval(&conjunct, &ctx);
        let formula = step3_remove_functionals(&sampled, &ctx).unwrap();
        assert_eq!(implication_count(formula.body()), 1);

        // A straight line is convex; the collapse rule forces equal slopes.
        let line = [
            ("u", 0),
            ("v", 1),
            ("_y1_f", 0),
            ("_y2_f", 1),
            ("_t1_f", 1),
            ("_t2_f", 1),
            ("_g0_f", 1),
            ("_gr_f", 1),
        ];
        assert_eq!(evaluate_exact(&formula, &assignment(&line)), Ok(true));

        // Left slope above the secant violates the window ordering.
        let mut steep = assignment(&line);
        steep.insert("_t1_f".into(), rat(2));
        assert_eq!(evaluate_exact(&formula, &steep), Ok(false));

        // Flat secant with distinct endpoint slopes violates the collapse.
        let mut kinked = assignment(&line);
        kinked.insert("_y2_f".into(), rat(0));
        kinked.insert("_t1_f".into(), rat(0));
        assert_eq!(evaluate_exact(&formula, &kinked), Ok(false));

        // A genuinely convex profile: slopes rise across the window and the
        // tails slot under/over the endpoint slopes.
        let bowl = [
            ("u", 0),
            ("v", 2),
            ("_y1_f", 0),
            ("_y2_f", 2),
            ("_t1_f", 0),
            ("_t2_f", 2),
            ("_g0_f", -1),
            ("_gr_f", 3),
        ];
        assert_eq!(evaluate_exact(&formula, &assignment(&bowl)), Ok(true));
    }

    #[test]
    fn strict_concavity_tails_bracket_the_single_slope() {
        let (conjunct, ctx) = ordered(
            vec![shape(ShapeKind::StrictConcave, EndVar::NegInf, EndVar::PosInf)],
            &["v"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        let expected = TarskiBody::and(vec![
            TarskiBody::gt(pvar("_g0_f"), pvar("_t1_f")),
            TarskiBody::lt(pvar("_gr_f"), pvar("_t1_f")),
        ]);
        assert_eq!(formula.body(), &expected);
    }

    #[test]
    fn nonstrict_monotonicity_matches_derivative_sign_bound() {
        let up = ordered(
            vec![shape(ShapeKind::Up, v("a"), v("b"))],
            &["a", "b"],
        );
        let bound = ordered(
            vec![
                Literal::ConstDef { x: "z".into(), c: rat(0) },
                der(DerRel::Ge, "z", v("a"), v("b")),
            ],
            &["a", "b"],
        );
        let up_formula = step3_remove_functionals(&up.0, &up.1).unwrap();
        let bound_formula = step3_remove_functionals(&bound.0, &bound.1).unwrap();
        // Same satisfying assignments once the bound variable is pinned to 0.
        let flat = [
            ("a", 0),
            ("b", 1),
            ("z", 0),
            ("_y1_f", 1),
            ("_y2_f", 1),
            ("_t1_f", 0),
            ("_t2_f", 0),
        ];
        assert_eq!(evaluate_exact(&up_formula, &assignment(&flat)), Ok(true));
        assert_eq!(evaluate_exact(&bound_formula, &assignment(&flat)), Ok(true));
        let mut sinking = assignment(&flat);
        sinking.insert("_y2_f".into(), rat(-1));
        assert_eq!(evaluate_exact(&up_formula, &sinking), Ok(false));
        assert_eq!(evaluate_exact(&bound_formula, &sinking), Ok(false));
    }

    #[test]
    fn pointwise_function_comparison_covers_merged_endpoints() {
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Gt {
                f: f(),
                g: g(),
                lo: "v".into(),
                hi: "v".into(),
            })],
            &["v"],
        );
        let formula = step3_remove_functionals(&conjunct, &ctx).unwrap();
        assert_eq!(formula.body(), &TarskiBody::gt(pvar("_y1_f"), pvar("_y1_g")));
    }
}

//! Term flattening: from rewritten branches to flat literal conjuncts.
//!
//! Every compound subterm is given a fresh defining variable (`_u1 = x + _c1`,
//! `_c1 = 1`, …) so that the resulting [`Conjunct`] holds only the flat
//! literal shapes of [`Literal`]. Structurally identical subterms within one
//! branch share their defining variable, and equal constants share one
//! constant-definition literal. Division introduces its nonzero-divisor
//! guard, whose sign split forks the branch, which is why flattening returns
//! a list.
//!
//! The input is expected to be validated and already rewritten by
//! [`rewrite_equivalences`](super::rewrite_equivalences); patterns that stage
//! owns (disequalities, negated or general comparisons, `Up`/`Down` shapes)
//! are nevertheless handled here with the same equivalences, so composing the
//! stages and running this one directly agree wherever both are defined.

use std::collections::{BTreeMap, VecDeque};

use super::rewrite::nnf;
use super::{
    Conjunct, EndVar, FreshGen, FunAtom, Literal, NormalizeError, DEFAULT_BRANCH_CAP,
};
use crate::formula::{Atom, BinOp, DerRel, ExtEndpoint, Formula, NumRel, NumTerm, ShapeKind};
use num_traits::Zero;

/// Flattens one branch into standard-form conjuncts.
pub fn to_snf(branch: &Formula) -> Result<Vec<Conjunct>, NormalizeError> {
    to_snf_with_cap(branch, DEFAULT_BRANCH_CAP)
}

/// [`to_snf`] with an explicit branch cap.
pub fn to_snf_with_cap(branch: &Formula, cap: usize) -> Result<Vec<Conjunct>, NormalizeError> {
    let mut stack = vec![State::new(branch)];
    let mut done = Vec::new();
    while let Some(mut state) = stack.pop() {
        while let Some(formula) = state.queue.pop_front() {
            match formula {
                Formula::And(l, r) => {
                    state.queue.push_front(*r);
                    state.queue.push_front(*l);
                }
                Formula::Or(l, r) => {
                    if done.len() + stack.len() + 2 > cap {
                        return Err(NormalizeError::BranchExplosion { cap });
                    }
                    let mut right = state.clone();
                    right.queue.push_front(*r);
                    stack.push(right);
                    state.queue.push_front(*l);
                }
                Formula::Not(inner) => match *inner {
                    Formula::Atom(atom) => flatten_negated(&mut state, atom),
                    other => state.queue.push_front(nnf(&other, false)),
                },
                Formula::Atom(atom) => flatten_atom(&mut state, atom),
            }
        }
        done.push(state.conjunct);
    }
    Ok(done)
}

/// One branch under construction. Forking on a disjunction clones the whole
/// state, so sibling branches keep a consistent view of the subterm cache.
#[derive(Clone)]
struct State {
    queue: VecDeque<Formula>,
    conjunct: Conjunct,
    /// Defining variable for each compound subterm already flattened.
    terms: BTreeMap<NumTerm, String>,
}

impl State {
    fn new(branch: &Formula) -> State {
        let mut queue = VecDeque::new();
        queue.push_back(branch.clone());
        State {
            queue,
            conjunct: Conjunct::new(FreshGen::for_formula(branch)),
            terms: BTreeMap::new(),
        }
    }
}

fn eq(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::atom(Atom::NumRel { rel: NumRel::Eq, lhs, rhs })
}

fn gt(lhs: NumTerm, rhs: NumTerm) -> Formula {
    Formula::atom(Atom::NumRel { rel: NumRel::Gt, lhs, rhs })
}

fn flatten_atom(state: &mut State, atom: Atom) {
    match atom {
        Atom::NumRel { rel: NumRel::Eq, lhs, rhs } => flatten_eq(state, lhs, rhs),
        Atom::NumRel { rel: NumRel::Gt, lhs, rhs } => {
            if let (NumTerm::Var(x), NumTerm::Const(c)) = (&lhs, &rhs) {
                if c.is_zero() {
                    state.conjunct.insert(Literal::Pos { x: x.clone() });
                    return;
                }
            }
            // General comparison: `t1 > t2  ⇒  t1 = t2 + v ∧ v > 0`.
            let v = state.conjunct.fresh("v");
            state.conjunct.insert(Literal::Pos { x: v.clone() });
            flatten_eq(state, lhs, NumTerm::add(rhs, NumTerm::var(v)));
        }
        Atom::FunEq { f, g, lo, hi } => {
            let atom = FunAtom::Eq {
                f,
                g,
                lo: flatten_endpoint(state, lo),
                hi: flatten_endpoint(state, hi),
            };
            state.conjunct.insert(Literal::fun(atom));
        }
        Atom::FunGt { f, g, lo, hi } => {
            let atom = FunAtom::Gt {
                f,
                g,
                lo: finite_endpoint(state, lo),
                hi: finite_endpoint(state, hi),
            };
            state.conjunct.insert(Literal::fun(atom));
        }
        Atom::DerRel { f, rel, bound, lo, hi } => {
            let atom = flatten_der(state, f, rel, bound, lo, hi);
            state.conjunct.insert(Literal::fun(atom));
        }
        Atom::Shape { kind: ShapeKind::Up, f, lo, hi } => {
            flatten_atom(state, Atom::DerRel { f, rel: DerRel::Ge, bound: NumTerm::int(0), lo, hi });
        }
        Atom::Shape { kind: ShapeKind::Down, f, lo, hi } => {
            flatten_atom(state, Atom::DerRel { f, rel: DerRel::Le, bound: NumTerm::int(0), lo, hi });
        }
        Atom::Shape { kind, f, lo, hi } => {
            let atom = FunAtom::Shape {
                kind,
                f,
                lo: flatten_endpoint(state, lo),
                hi: flatten_endpoint(state, hi),
            };
            state.conjunct.insert(Literal::fun(atom));
        }
    }
}

fn flatten_negated(state: &mut State, atom: Atom) {
    match atom {
        // `t1 ≠ t2  ⇒  (t2 > t1) ∨ (t1 > t2)`
        Atom::NumRel { rel: NumRel::Eq, lhs, rhs } => {
            state
                .queue
                .push_front(Formula::or(gt(rhs.clone(), lhs.clone()), gt(lhs, rhs)));
        }
        // `¬(t1 > t2)  ⇒  (t1 = t2) ∨ (t2 > t1)`
        Atom::NumRel { rel: NumRel::Gt, lhs, rhs } => {
            state
                .queue
                .push_front(Formula::or(eq(lhs.clone(), rhs.clone()), gt(rhs, lhs)));
        }
        Atom::FunEq { f, g, lo, hi } => {
            let atom = FunAtom::Eq {
                f,
                g,
                lo: flatten_endpoint(state, lo),
                hi: flatten_endpoint(state, hi),
            };
            state.conjunct.insert(Literal::not_fun(atom));
        }
        Atom::FunGt { f, g, lo, hi } => {
            let atom = FunAtom::Gt {
                f,
                g,
                lo: finite_endpoint(state, lo),
                hi: finite_endpoint(state, hi),
            };
            state.conjunct.insert(Literal::not_fun(atom));
        }
        Atom::DerRel { f, rel, bound, lo, hi } => {
            let atom = flatten_der(state, f, rel, bound, lo, hi);
            state.conjunct.insert(Literal::not_fun(atom));
        }
        Atom::Shape { kind: ShapeKind::Up, f, lo, hi } => {
            flatten_negated(state, Atom::DerRel { f, rel: DerRel::Ge, bound: NumTerm::int(0), lo, hi });
        }
        Atom::Shape { kind: ShapeKind::Down, f, lo, hi } => {
            flatten_negated(state, Atom::DerRel { f, rel: DerRel::Le, bound: NumTerm::int(0), lo, hi });
        }
        Atom::Shape { kind, f, lo, hi } => {
            let atom = FunAtom::Shape {
                kind,
                f,
                lo: flatten_endpoint(state, lo),
                hi: flatten_endpoint(state, hi),
            };
            state.conjunct.insert(Literal::not_fun(atom));
        }
    }
}

fn flatten_der(
    state: &mut State,
    f: crate::formula::FuncVar,
    rel: DerRel,
    bound: NumTerm,
    lo: ExtEndpoint,
    hi: ExtEndpoint,
) -> FunAtom {
    FunAtom::Der {
        f,
        rel,
        bound: flat_term(state, bound),
        lo: flatten_endpoint(state, lo),
        hi: flatten_endpoint(state, hi),
    }
}

/// Flattens `t1 = t2`, defining one side in terms of the other where a side
/// is already a variable (or constant) so no spurious alias is introduced.
fn flatten_eq(state: &mut State, lhs: NumTerm, rhs: NumTerm) {
    match (lhs, rhs) {
        (NumTerm::Var(x), rhs) => define_into(state, x, rhs),
        (lhs, NumTerm::Var(y)) => define_into(state, y, lhs),
        (NumTerm::Const(c), rhs) => {
            let x = flat_term(state, NumTerm::Const(c));
            define_into(state, x, rhs);
        }
        (lhs, NumTerm::Const(c)) => {
            let y = flat_term(state, NumTerm::Const(c));
            define_into(state, y, lhs);
        }
        (lhs, rhs) => {
            let x = flat_term(state, lhs);
            define_into(state, x, rhs);
        }
    }
}

/// Emits the defining literal for `x = term`, flattening subterms first.
fn define_into(state: &mut State, x: String, term: NumTerm) {
    match term {
        NumTerm::Var(y) => {
            if x != y {
                state.conjunct.insert(Literal::Eq { x, y });
            }
        }
        NumTerm::Const(c) => {
            state.conjunct.insert(Literal::ConstDef { x, c });
        }
        NumTerm::Binary(BinOp::Add, a, b) => {
            let y = flat_term(state, *a);
            let w = flat_term(state, *b);
            state.conjunct.insert(Literal::Sum { x, y, w });
        }
        NumTerm::Binary(BinOp::Sub, a, b) => {
            // `x = a - b  ⇒  a = x + b`
            let a = flat_term(state, *a);
            let w = flat_term(state, *b);
            state.conjunct.insert(Literal::Sum { x: a, y: x, w });
        }
        NumTerm::Binary(BinOp::Mul, a, b) => {
            let y = flat_term(state, *a);
            let w = flat_term(state, *b);
            state.conjunct.insert(Literal::Prod { x, y, w });
        }
        NumTerm::Binary(BinOp::Div, a, b) => {
            // `x = a / b  ⇒  b ≠ 0 ∧ a = x * b`
            let a = flat_term(state, *a);
            let w = flat_term(state, *b);
            state.conjunct.insert(Literal::Prod { x: a, y: x, w: w.clone() });
            state
                .queue
                .push_front(Formula::not(eq(NumTerm::var(w), NumTerm::int(0))));
        }
        NumTerm::Apply(f, arg) => {
            let arg = flat_term(state, *arg);
            state.conjunct.insert(Literal::App { y: x, f, x: arg });
        }
        NumTerm::Deriv(f, arg) => {
            let arg = flat_term(state, *arg);
            state.conjunct.insert(Literal::DApp { y: x, f, x: arg });
        }
    }
}

/// The defining variable for a term: the term itself when it is a variable,
/// otherwise a cached or freshly introduced name with its defining literal.
fn flat_term(state: &mut State, term: NumTerm) -> String {
    if let NumTerm::Var(name) = term {
        return name;
    }
    if let Some(hit) = state.terms.get(&term) {
        return hit.clone();
    }
    let base = if matches!(term, NumTerm::Const(_)) { "c" } else { "u" };
    let x = state.conjunct.fresh(base);
    state.terms.insert(term.clone(), x.clone());
    define_into(state, x.clone(), term);
    x
}

fn flatten_endpoint(state: &mut State, endpoint: ExtEndpoint) -> EndVar {
    match endpoint {
        ExtEndpoint::NegInfinity => EndVar::NegInf,
        ExtEndpoint::PosInfinity => EndVar::PosInf,
        ExtEndpoint::Term(term) => EndVar::Var(flat_term(state, term)),
    }
}

fn finite_endpoint(state: &mut State, endpoint: ExtEndpoint) -> String {
    match endpoint {
        ExtEndpoint::Term(term) => flat_term(state, term),
        _ => panic!(
            "strict function comparison with an infinite endpoint; \
             validate formulas before flattening"
        ),
    }
}

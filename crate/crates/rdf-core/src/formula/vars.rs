//! Variable inventories: free real variables, function variables, and the
//! domain variables that drive the arrangement stage.
//!
//! A *domain variable* is a variable that occurs as the argument of a
//! function or derivative application, or as an interval endpoint that is a
//! bare variable. These are the points on the real line whose relative
//! order matters when function atoms are eliminated.

use super::{Atom, ExtEndpoint, Formula, FuncVar, NumTerm};

/// Collects names in first-occurrence order without duplicates.
#[derive(Default)]
struct OrderedSet {
    seen: std::collections::BTreeSet<String>,
    order: Vec<String>,
}

impl OrderedSet {
    fn insert(&mut self, name: &str) {
        if self.seen.insert(name.to_string()) {
            self.order.push(name.to_string());
        }
    }
}

/// All real variables of the formula, in first-occurrence order.
pub fn free_vars(formula: &Formula) -> Vec<String> {
    let mut set = OrderedSet::default();
    formula.for_each_atom(&mut |atom| {
        for_each_term(atom, &mut |t| collect_term_vars(t, &mut set));
    });
    set.order
}

/// All function variables of the formula, in first-occurrence order.
pub fn function_vars(formula: &Formula) -> Vec<FuncVar> {
    let mut seen = std::collections::BTreeSet::new();
    let mut order = Vec::new();
    let mut push = |f: &FuncVar| {
        if seen.insert(f.clone()) {
            order.push(f.clone());
        }
    };
    formula.for_each_atom(&mut |atom| {
        match atom {
            Atom::NumRel { .. } => {}
            Atom::FunEq { f, g, .. } | Atom::FunGt { f, g, .. } => {
                push(f);
                push(g);
            }
            Atom::DerRel { f, .. } | Atom::Shape { f, .. } => push(f),
        }
        for_each_term(atom, &mut |t| collect_term_funcs(t, &mut |f| push(f)));
    });
    order
}

/// Raised by [`domain_vars_strict`] when a formula asserted to be in
/// standard normal form still has a compound interval endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonVariableEndpoint {
    pub atom: Atom,
    pub endpoint: NumTerm,
}

impl std::fmt::Display for NonVariableEndpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "interval endpoint is not a bare variable: {:?}", self.endpoint)
    }
}

impl std::error::Error for NonVariableEndpoint {}

/// Domain variables in first-occurrence order: arguments of `f(x)` /
/// `D[f](x)` that are bare variables, plus bare-variable interval endpoints.
///
/// Compound arguments and endpoints are skipped; they only disappear after
/// normalization, and [`domain_vars_strict`] is the post-normalization
/// variant that treats them as an error.
pub fn domain_vars(formula: &Formula) -> Vec<String> {
    collect_domain_vars(formula, false).expect("lenient collection cannot fail")
}

/// Like [`domain_vars`], but the caller asserts the formula is in standard
/// normal form, so a compound interval endpoint is reported as an error.
pub fn domain_vars_strict(formula: &Formula) -> Result<Vec<String>, NonVariableEndpoint> {
    collect_domain_vars(formula, true)
}

fn collect_domain_vars(formula: &Formula, strict: bool) -> Result<Vec<String>, NonVariableEndpoint> {
    let mut set = OrderedSet::default();
    let mut failure = None;
    formula.for_each_atom(&mut |atom| {
        // Application arguments, anywhere inside the atom's terms.
        for_each_term(atom, &mut |t| collect_app_args(t, &mut set));
        // Bare-variable endpoints.
        if let Some((lo, hi)) = atom.endpoints() {
            for ep in [lo, hi] {
                match ep {
                    ExtEndpoint::Term(NumTerm::Var(v)) => set.insert(v),
                    ExtEndpoint::Term(other) if strict && failure.is_none() => {
                        failure = Some(NonVariableEndpoint {
                            atom: atom.clone(),
                            endpoint: other.clone(),
                        });
                    }
                    _ => {}
                }
            }
        }
    });
    match failure {
        Some(err) => Err(err),
        None => Ok(set.order),
    }
}

/// Visit every numerical term stored in the atom (including endpoint terms).
fn for_each_term<'a>(atom: &'a Atom, f: &mut impl FnMut(&'a NumTerm)) {
    let ep = |e: &'a ExtEndpoint, f: &mut dyn FnMut(&'a NumTerm)| {
        if let ExtEndpoint::Term(t) = e {
            f(t)
        }
    };
    match atom {
        Atom::NumRel { lhs, rhs, .. } => {
            f(lhs);
            f(rhs);
        }
        Atom::FunEq { lo, hi, .. } | Atom::FunGt { lo, hi, .. } | Atom::Shape { lo, hi, .. } => {
            ep(lo, f);
            ep(hi, f);
        }
        Atom::DerRel { bound, lo, hi, .. } => {
            f(bound);
            ep(lo, f);
            ep(hi, f);
        }
    }
}

fn collect_term_vars(term: &NumTerm, set: &mut OrderedSet) {
    match term {
        NumTerm::Var(v) => set.insert(v),
        NumTerm::Const(_) => {}
        NumTerm::Binary(_, a, b) => {
            collect_term_vars(a, set);
            collect_term_vars(b, set);
        }
        NumTerm::Apply(_, t) | NumTerm::Deriv(_, t) => collect_term_vars(t, set),
    }
}

fn collect_term_funcs(term: &NumTerm, push: &mut impl FnMut(&FuncVar)) {
    match term {
        NumTerm::Var(_) | NumTerm::Const(_) => {}
        NumTerm::Binary(_, a, b) => {
            collect_term_funcs(a, push);
            collect_term_funcs(b, push);
        }
        NumTerm::Apply(f, t) | NumTerm::Deriv(f, t) => {
            push(f);
            collect_term_funcs(t, push);
        }
    }
}

fn collect_app_args(term: &NumTerm, set: &mut OrderedSet) {
    match term {
        NumTerm::Var(_) | NumTerm::Const(_) => {}
        NumTerm::Binary(_, a, b) => {
            collect_app_args(a, set);
            collect_app_args(b, set);
        }
        NumTerm::Apply(_, t) | NumTerm::Deriv(_, t) => {
            if let NumTerm::Var(v) = t.as_ref() {
                set.insert(v);
            }
            collect_app_args(t, set);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{NumRel, ShapeKind};

    fn eq(lhs: NumTerm, rhs: NumTerm) -> Formula {
        Formula::atom(Atom::NumRel { rel: NumRel::Eq, lhs, rhs })
    }

    #[test]
    fn domain_vars_from_application_and_endpoints() {
        // y = f(x) ∧ Convex(f)[a, b]  →  [x, a, b]
        let f = FuncVar::named("f");
        let formula = Formula::and(
            eq(NumTerm::var("y"), NumTerm::apply(f.clone(), NumTerm::var("x"))),
            Formula::atom(Atom::Shape {
                kind: ShapeKind::Convex,
                f,
                lo: ExtEndpoint::var("a"),
                hi: ExtEndpoint::var("b"),
            }),
        );
        assert_eq!(domain_vars(&formula), ["x", "a", "b"]);
    }

    #[test]
    fn arithmetic_only_formula_has_no_domain_vars() {
        let formula = eq(NumTerm::var("x"), NumTerm::add(NumTerm::var("y"), NumTerm::var("w")));
        assert!(domain_vars(&formula).is_empty());
        assert_eq!(free_vars(&formula), ["x", "y", "w"]);
    }

    #[test]
    fn derivative_argument_is_a_domain_var() {
        let formula = eq(
            NumTerm::var("t"),
            NumTerm::deriv(FuncVar::named("f"), NumTerm::var("u")),
        );
        assert_eq!(domain_vars(&formula), ["u"]);
    }

    #[test]
    fn domain_vars_ignore_propositional_shape() {
        let f = FuncVar::named("f");
        let a = eq(NumTerm::var("y"), NumTerm::apply(f.clone(), NumTerm::var("x")));
        let b = Formula::atom(Atom::Shape {
            kind: ShapeKind::Up,
            f,
            lo: ExtEndpoint::var("a"),
            hi: ExtEndpoint::var("b"),
        });
        let left = Formula::and(Formula::and(a.clone(), b.clone()), a.clone());
        let right = Formula::and(a.clone(), Formula::and(b, a));
        assert_eq!(domain_vars(&left), domain_vars(&right));
    }

    #[test]
    fn strict_mode_rejects_compound_endpoint() {
        let formula = Formula::atom(Atom::Shape {
            kind: ShapeKind::Up,
            f: FuncVar::named("f"),
            lo: ExtEndpoint::Term(NumTerm::add(NumTerm::var("a"), NumTerm::int(1))),
            hi: ExtEndpoint::var("b"),
        });
        assert!(domain_vars_strict(&formula).is_err());
        // The lenient variant skips it.
        assert_eq!(domain_vars(&formula), ["b"]);
    }

    #[test]
    fn function_vars_in_first_occurrence_order() {
        let f = FuncVar::named("f");
        let g = FuncVar::named("g");
        let formula = Formula::and(
            Formula::atom(Atom::FunEq {
                f: g.clone(),
                g: f.clone(),
                lo: ExtEndpoint::var("a"),
                hi: ExtEndpoint::var("b"),
            }),
            eq(NumTerm::var("y"), NumTerm::apply(f.clone(), NumTerm::var("x"))),
        );
        assert_eq!(function_vars(&formula), vec![g, f]);
    }
}

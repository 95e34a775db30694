//! Abstract syntax of RDF formulas.
//!
//! A formula is a propositional combination of atoms over numerical terms
//! and function variables. Interval-bounded atoms carry extended endpoints,
//! where `-inf` may appear only on the left and `+inf` only on the right;
//! [`validate`] enforces that restriction.

mod semantics;
mod validate;
mod vars;

pub use semantics::{evaluate, evaluate_atom, ExplicitModel, Truth, UnassignedSymbol};
pub use validate::{validate, IssueKind, ValidationError, ValidationIssue};
pub use vars::{domain_vars, domain_vars_strict, free_vars, function_vars, NonVariableEndpoint};

use crate::rational::Rational;

/// Binary arithmetic operator inside numerical terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// A function variable or one of the two constant functions.
///
/// `Zero` and `One` denote the null function and the 1-constant function;
/// [`validate`] desugars them into pinned fresh function variables so that
/// the rest of the pipeline only ever sees named variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncVar {
    Named(String),
    Zero,
    One,
}

impl FuncVar {
    pub fn named(name: impl Into<String>) -> Self {
        FuncVar::Named(name.into())
    }

    /// The display name; constants print as `@0` / `@1`.
    pub fn name(&self) -> &str {
        match self {
            FuncVar::Named(n) => n,
            FuncVar::Zero => "@0",
            FuncVar::One => "@1",
        }
    }
}

/// Numerical terms: variables, exact rational constants, arithmetic,
/// function application `f(t)`, and derivative application `D[f](t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NumTerm {
    Var(String),
    Const(Rational),
    Binary(BinOp, Box<NumTerm>, Box<NumTerm>),
    Apply(FuncVar, Box<NumTerm>),
    Deriv(FuncVar, Box<NumTerm>),
}

impl NumTerm {
    pub fn var(name: impl Into<String>) -> Self {
        NumTerm::Var(name.into())
    }

    pub fn constant(value: Rational) -> Self {
        NumTerm::Const(value)
    }

    pub fn int(value: i64) -> Self {
        NumTerm::Const(crate::rational::rat(value))
    }

    pub fn add(a: NumTerm, b: NumTerm) -> Self {
        NumTerm::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }

    pub fn sub(a: NumTerm, b: NumTerm) -> Self {
        NumTerm::Binary(BinOp::Sub, Box::new(a), Box::new(b))
    }

    pub fn mul(a: NumTerm, b: NumTerm) -> Self {
        NumTerm::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }

    pub fn div(a: NumTerm, b: NumTerm) -> Self {
        NumTerm::Binary(BinOp::Div, Box::new(a), Box::new(b))
    }

    pub fn apply(f: FuncVar, arg: NumTerm) -> Self {
        NumTerm::Apply(f, Box::new(arg))
    }

    pub fn deriv(f: FuncVar, arg: NumTerm) -> Self {
        NumTerm::Deriv(f, Box::new(arg))
    }
}

/// An interval endpoint: a numerical term or one of the infinities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtEndpoint {
    Term(NumTerm),
    NegInfinity,
    PosInfinity,
}

impl ExtEndpoint {
    pub fn var(name: impl Into<String>) -> Self {
        ExtEndpoint::Term(NumTerm::var(name))
    }

    pub fn term(&self) -> Option<&NumTerm> {
        match self {
            ExtEndpoint::Term(t) => Some(t),
            _ => None,
        }
    }
}

/// Relation of a plain numerical atom. The primitive set is `=` and `>`;
/// the parser lowers the remaining comparisons to negations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NumRel {
    Eq,
    Gt,
}

/// Relation of a derivative-bound atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DerRel {
    Eq,
    Gt,
    Ge,
    Lt,
    Le,
}

impl DerRel {
    pub fn symbol(self) -> &'static str {
        match self {
            DerRel::Eq => "=",
            DerRel::Gt => ">",
            DerRel::Ge => ">=",
            DerRel::Lt => "<",
            DerRel::Le => "<=",
        }
    }

    /// The complementary relation, used when a negated derivative atom is
    /// replaced by an existential gadget.
    pub fn complement(self) -> DerRel {
        match self {
            DerRel::Eq => DerRel::Eq, // negation of = is handled separately (≠)
            DerRel::Gt => DerRel::Le,
            DerRel::Ge => DerRel::Lt,
            DerRel::Lt => DerRel::Ge,
            DerRel::Le => DerRel::Gt,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, DerRel::Gt | DerRel::Lt)
    }
}

/// Shape predicates over an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShapeKind {
    Up,
    StrictUp,
    Down,
    StrictDown,
    Convex,
    StrictConvex,
    Concave,
    StrictConcave,
}

impl ShapeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ShapeKind::Up => "Up",
            ShapeKind::StrictUp => "StrictUp",
            ShapeKind::Down => "Down",
            ShapeKind::StrictDown => "StrictDown",
            ShapeKind::Convex => "Convex",
            ShapeKind::StrictConvex => "StrictConvex",
            ShapeKind::Concave => "Concave",
            ShapeKind::StrictConcave => "StrictConcave",
        }
    }

    pub const ALL: [ShapeKind; 8] = [
        ShapeKind::Up,
        ShapeKind::StrictUp,
        ShapeKind::Down,
        ShapeKind::StrictDown,
        ShapeKind::Convex,
        ShapeKind::StrictConvex,
        ShapeKind::Concave,
        ShapeKind::StrictConcave,
    ];
}

/// An RDF atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `t1 = t2` or `t1 > t2`.
    NumRel { rel: NumRel, lhs: NumTerm, rhs: NumTerm },
    /// `(f = g)[s1, s2]`: pointwise equality on the interval.
    FunEq { f: FuncVar, g: FuncVar, lo: ExtEndpoint, hi: ExtEndpoint },
    /// `(f > g)[t1, t2]`: pointwise strict dominance on a bounded interval.
    /// The endpoints are kept extended so that validation can report the
    /// unbounded case instead of making it unrepresentable.
    FunGt { f: FuncVar, g: FuncVar, lo: ExtEndpoint, hi: ExtEndpoint },
    /// `(D[f] rel t)[s1, s2]`: derivative bound on the interval.
    DerRel { f: FuncVar, rel: DerRel, bound: NumTerm, lo: ExtEndpoint, hi: ExtEndpoint },
    /// `Kind(f)[s1, s2]`: monotonicity or convexity on the interval.
    Shape { kind: ShapeKind, f: FuncVar, lo: ExtEndpoint, hi: ExtEndpoint },
}

impl Atom {
    /// Interval endpoints of this atom, if it has any.
    pub fn endpoints(&self) -> Option<(&ExtEndpoint, &ExtEndpoint)> {
        match self {
            Atom::NumRel { .. } => None,
            Atom::FunEq { lo, hi, .. }
            | Atom::FunGt { lo, hi, .. }
            | Atom::DerRel { lo, hi, .. }
            | Atom::Shape { lo, hi, .. } => Some((lo, hi)),
        }
    }
}

/// A propositional combination of atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(atom: Atom) -> Self {
        Formula::Atom(atom)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of a nonempty list, left-associated.
    pub fn conj(parts: Vec<Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Visit every atom, left to right.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(inner) => inner.for_each_atom(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }

    /// Number of atom occurrences.
    pub fn atom_count(&self) -> usize {
        let mut n = 0;
        self.for_each_atom(&mut |_| n += 1);
        n
    }
}

/// A path from the root of a formula to a subformula, used by validation
/// diagnostics. Each step names the child taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    NotArg,
    AndLeft,
    AndRight,
    OrLeft,
    OrRight,
}

impl std::fmt::Display for PathStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PathStep::NotArg => "!",
            PathStep::AndLeft => "&L",
            PathStep::AndRight => "&R",
            PathStep::OrLeft => "|L",
            PathStep::OrRight => "|R",
        };
        f.write_str(s)
    }
}

/// Format a path as a compact breadcrumb, e.g. `&L.!.|R`.
pub fn format_path(path: &[PathStep]) -> String {
    if path.is_empty() {
        return "<root>".to_string();
    }
    path.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
}

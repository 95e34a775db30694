//! Structural validation of formulas.
//!
//! Checks the endpoint restrictions on interval atoms (`+inf` never on the
//! left, `-inf` never on the right, and strict function comparison only on
//! bounded intervals) and desugars the constant functions `@0` / `@1` into
//! pinned fresh function variables, so downstream passes handle named
//! function variables only.

use super::{format_path, Atom, DerRel, ExtEndpoint, Formula, FuncVar, NumRel, NumTerm, PathStep};
use std::collections::BTreeSet;

/// Why a single atom was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    /// `s1 = +inf` or `s2 = -inf` in any interval atom.
    IllegalEndpoint,
    /// A strict function comparison `(f > g)[t1, t2]` with an infinite bound.
    UnboundedStrictComparison,
    /// A functional symbol used with the wrong number of arguments. The atom
    /// constructors make this unrepresentable, but parsers and deserializers
    /// that target this AST report it through the same channel.
    MalformedArity,
}

impl std::fmt::Display for IssueKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IssueKind::IllegalEndpoint => "illegal interval endpoint",
            IssueKind::UnboundedStrictComparison => "strict function comparison needs finite bounds",
            IssueKind::MalformedArity => "wrong number of arguments",
        };
        f.write_str(s)
    }
}

/// One rejected atom, with the path from the formula root to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub kind: IssueKind,
    pub path: Vec<PathStep>,
    pub atom: Atom,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at {}", self.kind, format_path(&self.path))
    }
}

/// All violations found in one pass over the formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub issues: Vec<ValidationIssue>,
}

impl std::error::Error for ValidationError {}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} invalid atom(s):", self.issues.len())?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

/// Check every atom's bound restrictions; on success return the formula with
/// `@0` / `@1` replaced by pinned fresh function variables.
///
/// Every violation is reported, each with a path to the offending atom.
/// The operation is idempotent: a validated formula validates to itself.
pub fn validate(formula: &Formula) -> Result<Formula, ValidationError> {
    let mut issues = Vec::new();
    let mut path = Vec::new();
    check(formula, &mut path, &mut issues);
    if !issues.is_empty() {
        return Err(ValidationError { issues });
    }
    Ok(desugar_constant_functions(formula))
}

fn check(formula: &Formula, path: &mut Vec<PathStep>, issues: &mut Vec<ValidationIssue>) {
    match formula {
        Formula::Atom(atom) => check_atom(atom, path, issues),
        Formula::Not(inner) => {
            path.push(PathStep::NotArg);
            check(inner, path, issues);
            path.pop();
        }
        Formula::And(a, b) => {
            path.push(PathStep::AndLeft);
            check(a, path, issues);
            path.pop();
            path.push(PathStep::AndRight);
            check(b, path, issues);
            path.pop();
        }
        Formula::Or(a, b) => {
            path.push(PathStep::OrLeft);
            check(a, path, issues);
            path.pop();
            path.push(PathStep::OrRight);
            check(b, path, issues);
            path.pop();
        }
    }
}

fn check_atom(atom: &Atom, path: &[PathStep], issues: &mut Vec<ValidationIssue>) {
    let mut push = |kind| {
        issues.push(ValidationIssue { kind, path: path.to_vec(), atom: atom.clone() })
    };
    if let Some((lo, hi)) = atom.endpoints() {
        if matches!(lo, ExtEndpoint::PosInfinity) || matches!(hi, ExtEndpoint::NegInfinity) {
            push(IssueKind::IllegalEndpoint);
        }
        if matches!(atom, Atom::FunGt { .. })
            && (!matches!(lo, ExtEndpoint::Term(_)) || !matches!(hi, ExtEndpoint::Term(_)))
        {
            push(IssueKind::UnboundedStrictComparison);
        }
    }
}

/// Names already taken in the formula, so fresh internal names never clash.
fn taken_names(formula: &Formula) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    formula.for_each_atom(&mut |atom| collect_atom_names(atom, &mut names));
    names
}

fn collect_atom_names(atom: &Atom, names: &mut BTreeSet<String>) {
    match atom {
        Atom::NumRel { lhs, rhs, .. } => {
            collect_term_names(lhs, names);
            collect_term_names(rhs, names);
        }
        Atom::FunEq { f, g, lo, hi } | Atom::FunGt { f, g, lo, hi } => {
            names.insert(f.name().to_string());
            names.insert(g.name().to_string());
            collect_endpoint_names(lo, names);
            collect_endpoint_names(hi, names);
        }
        Atom::DerRel { f, bound, lo, hi, .. } => {
            names.insert(f.name().to_string());
            collect_term_names(bound, names);
            collect_endpoint_names(lo, names);
            collect_endpoint_names(hi, names);
        }
        Atom::Shape { f, lo, hi, .. } => {
            names.insert(f.name().to_string());
            collect_endpoint_names(lo, names);
            collect_endpoint_names(hi, names);
        }
    }
}

fn collect_term_names(term: &NumTerm, names: &mut BTreeSet<String>) {
    match term {
        NumTerm::Var(v) => {
            names.insert(v.clone());
        }
        NumTerm::Const(_) => {}
        NumTerm::Binary(_, a, b) => {
            collect_term_names(a, names);
            collect_term_names(b, names);
        }
        NumTerm::Apply(f, t) | NumTerm::Deriv(f, t) => {
            names.insert(f.name().to_string());
            collect_term_names(t, names);
        }
    }
}

fn collect_endpoint_names(ep: &ExtEndpoint, names: &mut BTreeSet<String>) {
    if let ExtEndpoint::Term(t) = ep {
        collect_term_names(t, names);
    }
}

/// Replace `@0` / `@1` with fresh named function variables and conjoin the
/// constraints that pin each one down: a zero derivative everywhere and the
/// constant's value at a fresh anchor point. A zero-derivative C¹ function
/// is constant, so the pins characterize the constants exactly.
fn desugar_constant_functions(formula: &Formula) -> Formula {
    let uses_zero = mentions_const(formula, &FuncVar::Zero);
    let uses_one = mentions_const(formula, &FuncVar::One);
    if !uses_zero && !uses_one {
        return formula.clone();
    }

    let taken = taken_names(formula);
    // Surface identifiers start with a letter, so underscore-prefixed names
    // can only clash with programmatically built terms; probe to be safe.
    let fresh = |base: &str| -> String {
        if !taken.contains(base) {
            return base.to_string();
        }
        (2..)
            .map(|i| format!("{base}{i}"))
            .find(|c| !taken.contains(c))
            .unwrap()
    };

    let mut out = formula.clone();
    let mut pins = Vec::new();
    let mut install = |out: &mut Formula, which: &FuncVar, fn_base: &str, anchor_base: &str, value: i64| {
        let h = FuncVar::named(fresh(fn_base));
        let anchor = fresh(anchor_base);
        *out = substitute_funcvar(out, which, &h);
        pins.push(Formula::atom(Atom::DerRel {
            f: h.clone(),
            rel: DerRel::Eq,
            bound: NumTerm::int(0),
            lo: ExtEndpoint::NegInfinity,
            hi: ExtEndpoint::PosInfinity,
        }));
        pins.push(Formula::atom(Atom::NumRel {
            rel: NumRel::Eq,
            lhs: NumTerm::apply(h, NumTerm::var(anchor)),
            rhs: NumTerm::int(value),
        }));
    };
    if uses_zero {
        install(&mut out, &FuncVar::Zero, "_const0", "_anchor0", 0);
    }
    if uses_one {
        install(&mut out, &FuncVar::One, "_const1", "_anchor1", 1);
    }
    pins.into_iter().fold(out, Formula::and)
}

fn mentions_const(formula: &Formula, which: &FuncVar) -> bool {
    let mut found = false;
    formula.for_each_atom(&mut |atom| {
        if !found && atom_mentions(atom, which) {
            found = true;
        }
    });
    found
}

fn atom_mentions(atom: &Atom, which: &FuncVar) -> bool {
    let term = |t: &NumTerm| term_mentions(t, which);
    let ep = |e: &ExtEndpoint| matches!(e, ExtEndpoint::Term(t) if term_mentions(t, which));
    match atom {
        Atom::NumRel { lhs, rhs, .. } => term(lhs) || term(rhs),
        Atom::FunEq { f, g, lo, hi } | Atom::FunGt { f, g, lo, hi } => {
            f == which || g == which || ep(lo) || ep(hi)
        }
        Atom::DerRel { f, bound, lo, hi, .. } => f == which || term(bound) || ep(lo) || ep(hi),
        Atom::Shape { f, lo, hi, .. } => f == which || ep(lo) || ep(hi),
    }
}

fn term_mentions(term: &NumTerm, which: &FuncVar) -> bool {
    match term {
        NumTerm::Var(_) | NumTerm::Const(_) => false,
        NumTerm::Binary(_, a, b) => term_mentions(a, which) || term_mentions(b, which),
        NumTerm::Apply(f, t) | NumTerm::Deriv(f, t) => f == which || term_mentions(t, which),
    }
}

fn substitute_funcvar(formula: &Formula, from: &FuncVar, to: &FuncVar) -> Formula {
    match formula {
        Formula::Atom(atom) => Formula::Atom(substitute_atom(atom, from, to)),
        Formula::Not(inner) => Formula::not(substitute_funcvar(inner, from, to)),
        Formula::And(a, b) => {
            Formula::and(substitute_funcvar(a, from, to), substitute_funcvar(b, from, to))
        }
        Formula::Or(a, b) => {
            Formula::or(substitute_funcvar(a, from, to), substitute_funcvar(b, from, to))
        }
    }
}

fn substitute_atom(atom: &Atom, from: &FuncVar, to: &FuncVar) -> Atom {
    let sub_f = |f: &FuncVar| if f == from { to.clone() } else { f.clone() };
    let sub_t = |t: &NumTerm| substitute_term(t, from, to);
    let sub_e = |e: &ExtEndpoint| match e {
        ExtEndpoint::Term(t) => ExtEndpoint::Term(substitute_term(t, from, to)),
        other => other.clone(),
    };
    match atom {
        Atom::NumRel { rel, lhs, rhs } => {
            Atom::NumRel { rel: *rel, lhs: sub_t(lhs), rhs: sub_t(rhs) }
        }
        Atom::FunEq { f, g, lo, hi } => {
            Atom::FunEq { f: sub_f(f), g: sub_f(g), lo: sub_e(lo), hi: sub_e(hi) }
        }
        Atom::FunGt { f, g, lo, hi } => {
            Atom::FunGt { f: sub_f(f), g: sub_f(g), lo: sub_e(lo), hi: sub_e(hi) }
        }
        Atom::DerRel { f, rel, bound, lo, hi } => Atom::DerRel {
            f: sub_f(f),
            rel: *rel,
            bound: sub_t(bound),
            lo: sub_e(lo),
            hi: sub_e(hi),
        },
        Atom::Shape { kind, f, lo, hi } => {
            Atom::Shape { kind: *kind, f: sub_f(f), lo: sub_e(lo), hi: sub_e(hi) }
        }
    }
}

fn substitute_term(term: &NumTerm, from: &FuncVar, to: &FuncVar) -> NumTerm {
    match term {
        NumTerm::Var(_) | NumTerm::Const(_) => term.clone(),
        NumTerm::Binary(op, a, b) => NumTerm::Binary(
            *op,
            Box::new(substitute_term(a, from, to)),
            Box::new(substitute_term(b, from, to)),
        ),
        NumTerm::Apply(f, t) => NumTerm::Apply(
            if f == from { to.clone() } else { f.clone() },
            Box::new(substitute_term(t, from, to)),
        ),
        NumTerm::Deriv(f, t) => NumTerm::Deriv(
            if f == from { to.clone() } else { f.clone() },
            Box::new(substitute_term(t, from, to)),
        ),
    }
}

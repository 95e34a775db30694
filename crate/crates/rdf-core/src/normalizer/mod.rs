//! Normalization of validated formulas into flat conjunctive units.
//!
//! The decision pipeline works on one *conjunct* at a time: a set of flat
//! literals in which every numerical argument is a variable (or an infinity
//! endpoint) and every arithmetic relation has one of a fixed handful of
//! shapes. This module turns an arbitrary validated [`Formula`] into a
//! disjunction of such conjuncts in three stages, each exposed on its own so
//! it can be tested and reused independently:
//!
//! 1. [`to_dnf`] — propositional disjunctive normal form with atoms kept
//!    opaque;
//! 2. [`rewrite_equivalences`] — the equivalence table that eliminates
//!    subtraction/division equalities, disequalities, negated comparisons,
//!    general strict comparisons, and the non-strict monotonicity shapes
//!    (`Up`/`Down` become derivative-sign bounds);
//! 3. [`to_snf`] — term flattening that introduces fresh variables for
//!    compound subterms, producing [`Conjunct`] values over [`Literal`]s.
//!
//! [`normalize`] composes the three stages and is what the pipeline calls.
//! Rewrites with disjunctive right-hand sides fork the branch under
//! construction; the total branch count is capped (default
//! [`DEFAULT_BRANCH_CAP`]) and overflow reports [`NormalizeError::BranchExplosion`].

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{
    free_vars, function_vars, Atom, DerRel, ExtEndpoint, Formula, FuncVar, NumTerm, ShapeKind,
};
use crate::rational::Rational;

mod dnf;
mod rewrite;
mod snf;

pub use dnf::{to_dnf, to_dnf_with_cap};
pub use rewrite::{rewrite_equivalences, rewrite_equivalences_with_cap};
pub use snf::{to_snf, to_snf_with_cap};

/// Default cap on the number of branches a single normalization may produce.
pub const DEFAULT_BRANCH_CAP: usize = 10_000;

/// Errors reported by the normalization stages.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    /// Distribution or branch-forking rewrites exceeded the configured cap.
    #[error("normalization exceeded the cap of {cap} branches")]
    BranchExplosion {
        /// The cap that was in force when the overflow happened.
        cap: usize,
    },
}

/// An interval endpoint after flattening: a numerical variable or an infinity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EndVar {
    /// `-inf`
    NegInf,
    /// A numerical variable.
    Var(String),
    /// `+inf`
    PosInf,
}

impl EndVar {
    /// The variable name, when the endpoint is finite.
    pub fn var(&self) -> Option<&str> {
        match self {
            EndVar::Var(name) => Some(name),
            _ => None,
        }
    }

    /// Converts back to the term-level endpoint representation.
    pub fn to_endpoint(&self) -> ExtEndpoint {
        match self {
            EndVar::NegInf => ExtEndpoint::NegInfinity,
            EndVar::Var(name) => ExtEndpoint::var(name.clone()),
            EndVar::PosInf => ExtEndpoint::PosInfinity,
        }
    }
}

/// A functional atom whose numerical arguments are all flat.
///
/// This mirrors the functional half of [`Atom`] with compound terms ruled out
/// by construction: endpoints are [`EndVar`]s, strict-comparison intervals and
/// derivative bounds are plain variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FunAtom {
    /// `(f = g)[lo, hi]`
    Eq { f: FuncVar, g: FuncVar, lo: EndVar, hi: EndVar },
    /// `(f > g)[lo, hi]` — the interval of a strict comparison is finite, so
    /// both endpoints are variables.
    Gt { f: FuncVar, g: FuncVar, lo: String, hi: String },
    /// `(D[f] ⋈ bound)[lo, hi]`
    Der { f: FuncVar, rel: DerRel, bound: String, lo: EndVar, hi: EndVar },
    /// `Shape(f)[lo, hi]` for one of the eight shape predicates.
    Shape { kind: ShapeKind, f: FuncVar, lo: EndVar, hi: EndVar },
}

impl FunAtom {
    /// The term-level atom this flat atom denotes.
    pub fn to_atom(&self) -> Atom {
        match self {
            FunAtom::Eq { f, g, lo, hi } => Atom::FunEq {
                f: f.clone(),
                g: g.clone(),
                lo: lo.to_endpoint(),
                hi: hi.to_endpoint(),
            },
            FunAtom::Gt { f, g, lo, hi } => Atom::FunGt {
                f: f.clone(),
                g: g.clone(),
                lo: ExtEndpoint::var(lo.clone()),
                hi: ExtEndpoint::var(hi.clone()),
            },
            FunAtom::Der { f, rel, bound, lo, hi } => Atom::DerRel {
                f: f.clone(),
                rel: *rel,
                bound: NumTerm::var(bound.clone()),
                lo: lo.to_endpoint(),
                hi: hi.to_endpoint(),
            },
            FunAtom::Shape { kind, f, lo, hi } => Atom::Shape {
                kind: *kind,
                f: f.clone(),
                lo: lo.to_endpoint(),
                hi: hi.to_endpoint(),
            },
        }
    }

    /// Function variables mentioned by the atom.
    pub fn function_vars(&self) -> Vec<&FuncVar> {
        match self {
            FunAtom::Eq { f, g, .. } | FunAtom::Gt { f, g, .. } => vec![f, g],
            FunAtom::Der { f, .. } | FunAtom::Shape { f, .. } => vec![f],
        }
    }

    /// The two interval endpoints as [`EndVar`]s.
    pub fn endpoints(&self) -> (EndVar, EndVar) {
        match self {
            FunAtom::Eq { lo, hi, .. }
            | FunAtom::Der { lo, hi, .. }
            | FunAtom::Shape { lo, hi, .. } => (lo.clone(), hi.clone()),
            FunAtom::Gt { lo, hi, .. } => (EndVar::Var(lo.clone()), EndVar::Var(hi.clone())),
        }
    }

    /// Variables that delimit the atom's interval (its domain variables).
    pub fn range_vars(&self) -> Vec<&str> {
        match self {
            FunAtom::Eq { lo, hi, .. }
            | FunAtom::Der { lo, hi, .. }
            | FunAtom::Shape { lo, hi, .. } => {
                lo.var().into_iter().chain(hi.var()).collect()
            }
            FunAtom::Gt { lo, hi, .. } => vec![lo, hi],
        }
    }
}

/// One flat literal of a normalized conjunct.
///
/// The variants are exactly the literal inventory the downstream reduction
/// understands; holding a `Literal` is itself the proof that a constraint is
/// in standard shape. `Neq` is representable because intermediate stages
/// (notably the negative-literal gadgets of the reduction) produce it, but a
/// full [`normalize`] pass always splits it into ordered branches.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    /// `x = y + w`
    Sum { x: String, y: String, w: String },
    /// `x = y * w`
    Prod { x: String, y: String, w: String },
    /// `x > 0`
    Pos { x: String },
    /// `x = c` for an exact rational constant `c`.
    ConstDef { x: String, c: Rational },
    /// `x = y`
    Eq { x: String, y: String },
    /// `x ≠ y`
    Neq { x: String, y: String },
    /// `y = f(x)`
    App { y: String, f: FuncVar, x: String },
    /// `y = D[f](x)`
    DApp { y: String, f: FuncVar, x: String },
    /// A functional atom, positive or negated.
    Fun { positive: bool, atom: FunAtom },
}

impl Literal {
    /// Convenience constructor for a positive functional literal.
    pub fn fun(atom: FunAtom) -> Literal {
        Literal::Fun { positive: true, atom }
    }

    /// Convenience constructor for a negated functional literal.
    pub fn not_fun(atom: FunAtom) -> Literal {
        Literal::Fun { positive: false, atom }
    }

    /// The formula this literal denotes.
    pub fn to_formula(&self) -> Formula {
        let eq = |l: NumTerm, r: NumTerm| {
            Formula::atom(Atom::NumRel { rel: crate::formula::NumRel::Eq, lhs: l, rhs: r })
        };
        match self {
            Literal::Sum { x, y, w } => eq(
                NumTerm::var(x.clone()),
                NumTerm::add(NumTerm::var(y.clone()), NumTerm::var(w.clone())),
            ),
            Literal::Prod { x, y, w } => eq(
                NumTerm::var(x.clone()),
                NumTerm::mul(NumTerm::var(y.clone()), NumTerm::var(w.clone())),
            ),
            Literal::Pos { x } => Formula::atom(Atom::NumRel {
                rel: crate::formula::NumRel::Gt,
                lhs: NumTerm::var(x.clone()),
                rhs: NumTerm::int(0),
            }),
            Literal::ConstDef { x, c } => {
                eq(NumTerm::var(x.clone()), NumTerm::constant(c.clone()))
            }
            Literal::Eq { x, y } => eq(NumTerm::var(x.clone()), NumTerm::var(y.clone())),
            Literal::Neq { x, y } => {
                Formula::not(eq(NumTerm::var(x.clone()), NumTerm::var(y.clone())))
            }
            Literal::App { y, f, x } => eq(
                NumTerm::var(y.clone()),
                NumTerm::apply(f.clone(), NumTerm::var(x.clone())),
            ),
            Literal::DApp { y, f, x } => eq(
                NumTerm::var(y.clone()),
                NumTerm::deriv(f.clone(), NumTerm::var(x.clone())),
            ),
            Literal::Fun { positive, atom } => {
                let inner = Formula::atom(atom.to_atom());
                if *positive {
                    inner
                } else {
                    Formula::not(inner)
                }
            }
        }
    }

    /// Whether the literal mentions a function variable.
    pub fn is_functional(&self) -> bool {
        matches!(self, Literal::App { .. } | Literal::DApp { .. } | Literal::Fun { .. })
    }

    /// Collects every numerical variable the literal mentions.
    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Literal::Sum { x, y, w } | Literal::Prod { x, y, w } => {
                out.insert(x.clone());
                out.insert(y.clone());
                out.insert(w.clone());
            }
            Literal::Pos { x } => {
                out.insert(x.clone());
            }
            Literal::ConstDef { x, .. } => {
                out.insert(x.clone());
            }
            Literal::Eq { x, y } | Literal::Neq { x, y } => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Literal::App { y, x, .. } | Literal::DApp { y, x, .. } => {
                out.insert(y.clone());
                out.insert(x.clone());
            }
            Literal::Fun { atom, .. } => {
                match atom {
                    FunAtom::Der { bound, .. } => {
                        out.insert(bound.clone());
                    }
                    FunAtom::Eq { .. } | FunAtom::Gt { .. } | FunAtom::Shape { .. } => {}
                }
                for v in atom.range_vars() {
                    out.insert(v.to_string());
                }
            }
        }
    }
}

/// Deterministic fresh-name generator that never collides with a reserved set.
///
/// Generated names are always underscore-prefixed (`_u1`, `_c2`, …), a
/// namespace source formulas may also use; collisions are avoided by probing
/// the reserved set rather than by assuming the prefix is private.
#[derive(Debug, Clone, Default)]
pub struct FreshGen {
    taken: BTreeSet<String>,
    counters: BTreeMap<String, u64>,
}

impl FreshGen {
    /// A generator that avoids the given names.
    pub fn new<I, S>(taken: I) -> FreshGen
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FreshGen {
            taken: taken.into_iter().map(Into::into).collect(),
            counters: BTreeMap::new(),
        }
    }

    /// A generator seeded with every variable and function name of `formula`.
    pub fn for_formula(formula: &Formula) -> FreshGen {
        let mut taken: BTreeSet<String> = free_vars(formula).into_iter().collect();
        for f in function_vars(formula) {
            taken.insert(f.name().to_string());
        }
        FreshGen { taken, counters: BTreeMap::new() }
    }

    /// Marks a name as taken.
    pub fn reserve(&mut self, name: &str) {
        self.taken.insert(name.to_string());
    }

    /// Returns `_<base><n>` for the smallest untried `n ≥ 1` that is free.
    pub fn fresh(&mut self, base: &str) -> String {
        let counter = self.counters.entry(base.to_string()).or_insert(1);
        loop {
            let candidate = format!("_{base}{counter}");
            *counter += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    /// Returns `name` itself when free, otherwise `name_2`, `name_3`, ….
    pub fn claim(&mut self, name: &str) -> String {
        if self.taken.insert(name.to_string()) {
            return name.to_string();
        }
        let mut suffix = 2u64;
        loop {
            let candidate = format!("{name}_{suffix}");
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
            suffix += 1;
        }
    }
}

/// A conjunction of flat literals with its private fresh-name state.
///
/// Equality compares the literal sets only; the generator state is bookkeeping
/// that later stages use to extend the conjunct without name collisions.
#[derive(Debug, Clone)]
pub struct Conjunct {
    literals: BTreeSet<Literal>,
    fresh: FreshGen,
}

impl PartialEq for Conjunct {
    fn eq(&self, other: &Conjunct) -> bool {
        self.literals == other.literals
    }
}

impl Eq for Conjunct {}

impl Conjunct {
    /// An empty conjunct with the given fresh-name state.
    pub fn new(fresh: FreshGen) -> Conjunct {
        Conjunct { literals: BTreeSet::new(), fresh }
    }

    /// Builds a conjunct from literals, reserving every mentioned variable.
    pub fn from_literals<I: IntoIterator<Item = Literal>>(literals: I, mut fresh: FreshGen) -> Conjunct {
        let literals: BTreeSet<Literal> = literals.into_iter().collect();
        let mut vars = BTreeSet::new();
        for lit in &literals {
            lit.collect_vars(&mut vars);
        }
        for v in vars {
            fresh.reserve(&v);
        }
        Conjunct { literals, fresh }
    }

    /// Inserts a literal; duplicates are ignored.
    pub fn insert(&mut self, literal: Literal) -> bool {
        literal.collect_vars_into_gen(&mut self.fresh);
        self.literals.insert(literal)
    }

    /// Removes a literal, returning whether it was present.
    pub fn remove(&mut self, literal: &Literal) -> bool {
        self.literals.remove(literal)
    }

    /// Whether the conjunct contains the literal.
    pub fn contains(&self, literal: &Literal) -> bool {
        self.literals.contains(literal)
    }

    /// The literal set, in canonical order.
    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.literals
    }

    /// Number of literals.
    pub fn len(&self) -> usize {
        self.literals.len()
    }

    /// Whether the conjunct holds no literals.
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Draws a fresh variable name from the conjunct's namespace.
    pub fn fresh(&mut self, base: &str) -> String {
        self.fresh.fresh(base)
    }

    /// Claims a specific name, suffixing it if already taken.
    pub fn claim(&mut self, name: &str) -> String {
        self.fresh.claim(name)
    }

    /// Marks a name as taken in the conjunct's namespace.
    pub fn reserve(&mut self, name: &str) {
        self.fresh.reserve(name);
    }

    /// The conjunction formula the literal set denotes; `None` when empty.
    pub fn to_formula(&self) -> Option<Formula> {
        Formula::conj(self.literals.iter().map(Literal::to_formula).collect())
    }

    /// Every numerical variable mentioned by some literal.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for lit in &self.literals {
            lit.collect_vars(&mut out);
        }
        out
    }

    /// Every function variable mentioned by some literal.
    pub fn function_vars(&self) -> BTreeSet<FuncVar> {
        let mut out = BTreeSet::new();
        for lit in &self.literals {
            match lit {
                Literal::App { f, .. } | Literal::DApp { f, .. } => {
                    out.insert(f.clone());
                }
                Literal::Fun { atom, .. } => {
                    out.extend(atom.function_vars().into_iter().cloned());
                }
                _ => {}
            }
        }
        out
    }

    /// Domain variables: arguments of function applications and the variables
    /// delimiting functional-atom intervals.
    pub fn domain_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for lit in &self.literals {
            match lit {
                Literal::App { x, .. } | Literal::DApp { x, .. } => {
                    out.insert(x.clone());
                }
                Literal::Fun { atom, .. } => {
                    for v in atom.range_vars() {
                        out.insert(v.to_string());
                    }
                }
                _ => {}
            }
        }
        out
    }
}

impl Literal {
    fn collect_vars_into_gen(&self, gen: &mut FreshGen) {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        for v in vars {
            gen.reserve(&v);
        }
    }
}

/// Runs the full normalization: DNF, equivalence rewriting, and flattening.
///
/// The result is a list of conjuncts whose disjunction is equisatisfiable
/// with `formula`. The input is expected to be validated.
pub fn normalize(formula: &Formula) -> Result<Vec<Conjunct>, NormalizeError> {
    normalize_with_cap(formula, DEFAULT_BRANCH_CAP)
}

/// [`normalize`] with an explicit branch cap.
pub fn normalize_with_cap(
    formula: &Formula,
    cap: usize,
) -> Result<Vec<Conjunct>, NormalizeError> {
    let mut out = Vec::new();
    for branch in to_dnf_with_cap(formula, cap)? {
        for rewritten in rewrite_equivalences_with_cap(&branch, cap)? {
            for conjunct in to_snf_with_cap(&rewritten, cap)? {
                out.push(conjunct);
                if out.len() > cap {
                    return Err(NormalizeError::BranchExplosion { cap });
                }
            }
        }
    }
    Ok(out)
}

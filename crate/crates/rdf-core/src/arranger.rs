//! Arrangements: weak orders over domain variables.
//!
//! The reduction assumes its input conjunct is *ordered*: the domain
//! variables carry a known strict order. An arbitrary conjunct earns that
//! assumption by case analysis — every weak order (ordered set partition) of
//! its domain variables is tried, variables within a block are identified,
//! and consecutive blocks are chained with explicit `<` constraints. The
//! conjunct is satisfiable iff at least one specialization is.
//!
//! Merged blocks matter: a strict chain alone could not realize models where
//! two interval endpoints coincide, so the enumeration ranges over weak
//! orders, not just permutations. The number of arrangements for
//! n = 0, 1, 2, 3, 4 is 1, 1, 3, 13, 75 and grows fast, which is why
//! [`enumerate_arrangements`] refuses more than [`DEFAULT_ARRANGEMENT_CAP`]
//! variables by default and [`contradicts_ground_order`] offers a cheap,
//! sound pre-filter over literal-level order facts.

use std::collections::BTreeMap;

use crate::normalizer::{Conjunct, Literal};
use crate::rational::Rational;

/// Largest domain-variable count enumerated by default (75 arrangements for
/// 4 variables already; 7 gives 47 293).
pub const DEFAULT_ARRANGEMENT_CAP: usize = 7;

/// Too many domain variables to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{vars} domain variables exceed the arrangement cap of {cap}")]
pub struct ArrangementExplosion {
    /// Number of domain variables requested.
    pub vars: usize,
    /// The cap in force.
    pub cap: usize,
}

/// The arrangement misses a domain variable of the conjunct.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("arrangement does not cover domain variable {var}")]
pub struct CoverageError {
    /// The uncovered variable.
    pub var: String,
}

/// One weak order: an ordered list of nonempty, disjoint variable blocks.
///
/// Variables within a block are identified; earlier blocks are strictly
/// smaller than later ones. The first variable of each block acts as the
/// block representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangement {
    blocks: Vec<Vec<String>>,
}

impl Arrangement {
    /// The ordered blocks.
    pub fn blocks(&self) -> &[Vec<String>] {
        &self.blocks
    }

    /// Block representatives in increasing order: the chain `v₁ < … < v_r`.
    pub fn representatives(&self) -> Vec<String> {
        self.blocks.iter().map(|b| b[0].clone()).collect()
    }

    /// Maps every covered variable to its block representative.
    pub fn substitution(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        for block in &self.blocks {
            for var in block {
                map.insert(var.clone(), block[0].clone());
            }
        }
        map
    }

    /// Zero-based position of each covered variable's block.
    fn levels(&self) -> BTreeMap<&str, usize> {
        let mut map = BTreeMap::new();
        for (i, block) in self.blocks.iter().enumerate() {
            for var in block {
                map.insert(var.as_str(), i);
            }
        }
        map
    }
}

impl std::fmt::Display for Arrangement {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.blocks.is_empty() {
            return write!(out, "{{}}");
        }
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(out, " < ")?;
            }
            write!(out, "{{{}}}", block.join(", "))?;
        }
        Ok(())
    }
}

/// Lazily yields every weak order of `vars` exactly once.
///
/// Arrangements are emitted by increasing block count (all-merged first,
/// strict orders last); within one block count, by the lexicographic order of
/// the block-index assignment to `vars`. The stream is deterministic.
pub fn enumerate_arrangements(
    vars: Vec<String>,
) -> Result<Arrangements, ArrangementExplosion> {
    enumerate_arrangements_with_cap(vars, DEFAULT_ARRANGEMENT_CAP)
}

/// [`enumerate_arrangements`] with an explicit variable-count cap.
pub fn enumerate_arrangements_with_cap(
    vars: Vec<String>,
    cap: usize,
) -> Result<Arrangements, ArrangementExplosion> {
    if vars.len() > cap {
        return Err(ArrangementExplosion { vars: vars.len(), cap });
    }
    debug_assert!(
        vars.iter().collect::<std::collections::BTreeSet<_>>().len() == vars.len(),
        "domain variables must be duplicate-free"
    );
    let n = vars.len();
    Ok(Arrangements { vars, blocks: 1, assignment: vec![0; n], finished: false })
}

/// Iterator produced by [`enumerate_arrangements`].
///
/// Internally an arrangement with `k` blocks is a surjection from the
/// variables onto block indices `0..k`; the iterator walks all assignments
/// for k = 1, 2, …, n as a base-`k` odometer and skips non-surjective ones.
#[derive(Debug, Clone)]
pub struct Arrangements {
    vars: Vec<String>,
    blocks: usize,
    assignment: Vec<usize>,
    finished: bool,
}

impl Iterator for Arrangements {
    type Item = Arrangement;

    fn next(&mut self) -> Option<Arrangement> {
        if self.finished {
            return None;
        }
        let n = self.vars.len();
        if n == 0 {
            self.finished = true;
            return Some(Arrangement { blocks: Vec::new() });
        }
        loop {
            if self.blocks > n {
                self.finished = true;
                return None;
            }
            let candidate = self.surjective().then(|| self.build());
            self.advance();
            if let Some(arrangement) = candidate {
                return Some(arrangement);
            }
        }
    }
}

impl Arrangements {
    fn surjective(&self) -> bool {
        let mut seen = vec![false; self.blocks];
        for &level in &self.assignment {
            seen[level] = true;
        }
        seen.into_iter().all(|s| s)
    }

    fn build(&self) -> Arrangement {
        let mut blocks = vec![Vec::new(); self.blocks];
        for (var, &level) in self.vars.iter().zip(&self.assignment) {
            blocks[level].push(var.clone());
        }
        Arrangement { blocks }
    }

    /// Steps the base-`blocks` odometer; on overflow moves to one more block.
    fn advance(&mut self) {
        for digit in self.assignment.iter_mut().rev() {
            *digit += 1;
            if *digit < self.blocks {
                return;
            }
            *digit = 0;
        }
        self.blocks += 1;
        self.assignment = vec![0; self.vars.len()];
    }
}

/// A conjunct specialized to one arrangement, with its recorded chain.
#[derive(Debug, Clone)]
pub struct ArrangedConjunct {
    /// The specialized conjunct (substituted literals plus chain literals).
    pub conjunct: Conjunct,
    /// Block representatives in increasing order: `chain[0] < chain[1] < …`.
    pub chain: Vec<String>,
    /// Every substituted-away variable, mapped to its representative.
    pub aliases: BTreeMap<String, String>,
}

/// Specializes `conjunct` to `arrangement`: merged variables are replaced by
/// their block representative and consecutive representatives are chained
/// with `v_{i+1} = v_i + d ∧ d > 0` for fresh `d`.
///
/// Specialization never drops a literal (beyond exact duplicates and
/// self-equalities created by merging); contradictions with the imposed
/// order are kept for the backend to refute.
pub fn apply_arrangement(
    conjunct: &Conjunct,
    arrangement: &Arrangement,
) -> Result<ArrangedConjunct, CoverageError> {
    let substitution = arrangement.substitution();
    if let Some(missing) = conjunct
        .domain_vars()
        .into_iter()
        .find(|v| !substitution.contains_key(v))
    {
        return Err(CoverageError { var: missing });
    }

    let rename = |name: &String| substitution.get(name).unwrap_or(name).clone();
    let mut out = Conjunct::new(crate::normalizer::FreshGen::default());
    for literal in conjunct.literals() {
        match substitute(literal, &rename) {
            // `x = x` after merging is vacuous.
            Literal::Eq { x, y } if x == y => {}
            other => {
                out.insert(other);
            }
        }
    }
    // Keep the original namespace so chain variables stay fresh.
    for var in conjunct.variables() {
        out.reserve(&var);
    }

    let chain = arrangement.representatives();
    for pair in chain.windows(2) {
        let d = out.fresh("d");
        out.insert(Literal::Sum { x: pair[1].clone(), y: pair[0].clone(), w: d.clone() });
        out.insert(Literal::Pos { x: d });
    }

    let aliases = substitution.into_iter().filter(|(v, rep)| v != rep).collect();
    Ok(ArrangedConjunct { conjunct: out, chain, aliases })
}

fn substitute(literal: &Literal, rename: &impl Fn(&String) -> String) -> Literal {
    use crate::normalizer::{EndVar, FunAtom};
    let end = |e: &EndVar| match e {
        EndVar::Var(v) => EndVar::Var(rename(v)),
        other => other.clone(),
    };
    match literal {
        Literal::Sum { x, y, w } => {
            Literal::Sum { x: rename(x), y: rename(y), w: rename(w) }
        }
        Literal::Prod { x, y, w } => {
            Literal::Prod { x: rename(x), y: rename(y), w: rename(w) }
        }
        Literal::Pos { x } => Literal::Pos { x: rename(x) },
        Literal::ConstDef { x, c } => Literal::ConstDef { x: rename(x), c: c.clone() },
        Literal::Eq { x, y } => Literal::Eq { x: rename(x), y: rename(y) },
        Literal::Neq { x, y } => Literal::Neq { x: rename(x), y: rename(y) },
        Literal::App { y, f, x } => {
            Literal::App { y: rename(y), f: f.clone(), x: rename(x) }
        }
        Literal::DApp { y, f, x } => {
            Literal::DApp { y: rename(y), f: f.clone(), x: rename(x) }
        }
        Literal::Fun { positive, atom } => {
            let atom = match atom {
                FunAtom::Eq { f, g, lo, hi } => FunAtom::Eq {
                    f: f.clone(),
                    g: g.clone(),
                    lo: end(lo),
                    hi: end(hi),
                },
                FunAtom::Gt { f, g, lo, hi } => FunAtom::Gt {
                    f: f.clone(),
                    g: g.clone(),
                    lo: rename(lo),
                    hi: rename(hi),
                },
                FunAtom::Der { f, rel, bound, lo, hi } => FunAtom::Der {
                    f: f.clone(),
                    rel: *rel,
                    bound: rename(bound),
                    lo: end(lo),
                    hi: end(hi),
                },
                FunAtom::Shape { kind, f, lo, hi } => FunAtom::Shape {
                    kind: *kind,
                    f: f.clone(),
                    lo: end(lo),
                    hi: end(hi),
                },
            };
            Literal::Fun { positive: *positive, atom }
        }
    }
}

/// Cheap, sound pre-filter: `true` when the arrangement provably contradicts
/// order facts already visible in the literals, so the specialization can be
/// skipped without a backend call.
///
/// Recognized facts: `y < x` from a `x = y + w` literal paired with `w > 0`;
/// `x = y` from equality literals or equal constant definitions; `x < y`
/// from ordered constant definitions. Anything subtler is left to the
/// backend.
pub fn contradicts_ground_order(conjunct: &Conjunct, arrangement: &Arrangement) -> bool {
    let levels = arrangement.levels();
    let level = |v: &str| levels.get(v).copied();

    let mut constants: BTreeMap<&str, &Rational> = BTreeMap::new();
    for literal in conjunct.literals() {
        match literal {
            Literal::Eq { x, y } => {
                if let (Some(lx), Some(ly)) = (level(x), level(y)) {
                    if lx != ly {
                        return true;
                    }
                }
            }
            Literal::ConstDef { x, c } => {
                constants.insert(x, c);
            }
            Literal::Sum { x, y, w } => {
                // `x = y + w ∧ w > 0` forces `y < x`.
                if conjunct.contains(&Literal::Pos { x: w.clone() }) {
                    if let (Some(ly), Some(lx)) = (level(y), level(x)) {
                        if ly >= lx {
                            return true;
                        }
                    }
                }
            }
            _ => {}
        }
    }

    let pinned: Vec<(&str, &Rational)> =
        constants.into_iter().filter(|(v, _)| level(v).is_some()).collect();
    for (i, &(x, cx)) in pinned.iter().enumerate() {
        for &(y, cy) in &pinned[i + 1..] {
            let (lx, ly) = (level(x).unwrap(), level(y).unwrap());
            let order_ok = match cx.cmp(cy) {
                std::cmp::Ordering::Less => lx < ly,
                std::cmp::Ordering::Equal => lx == ly,
                std::cmp::Ordering::Greater => lx > ly,
            };
            if !order_ok {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FuncVar;
    use crate::normalizer::{normalize, EndVar, FreshGen, FunAtom};
    use crate::parser::parse;
    use crate::rational::rat;
    use std::collections::BTreeSet;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn arrangement_counts_match_the_weak_order_series() {
        for (n, want) in [(0usize, 1usize), (1, 1), (2, 3), (3, 13), (4, 75)] {
            let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let all: Vec<Arrangement> =
                enumerate_arrangements(vars).unwrap().collect();
            assert_eq!(all.len(), want, "count for n = {n}");
            let distinct: BTreeSet<String> =
                all.iter().map(|a| a.to_string()).collect();
            assert_eq!(distinct.len(), want, "distinctness for n = {n}");
        }
    }

    #[test]
    fn two_variable_arrangements_are_exactly_the_three_orders() {
        let all: Vec<String> = enumerate_arrangements(names(&["x", "y"]))
            .unwrap()
            .map(|a| a.to_string())
            .collect();
        assert_eq!(all, vec!["{x, y}", "{x} < {y}", "{y} < {x}"]);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let run = || -> Vec<String> {
            enumerate_arrangements(names(&["a", "b", "c"]))
                .unwrap()
                .map(|a| a.to_string())
                .collect()
        };
        assert_eq!(run(), run());
        assert_eq!(run().len(), 13);
    }

    #[test]
    fn cap_refuses_large_variable_sets() {
        let vars: Vec<String> = (0..8).map(|i| format!("x{i}")).collect();
        assert_eq!(
            enumerate_arrangements(vars).unwrap_err(),
            ArrangementExplosion { vars: 8, cap: 7 }
        );
        assert_eq!(
            enumerate_arrangements_with_cap(names(&["a", "b", "c"]), 2).unwrap_err(),
            ArrangementExplosion { vars: 3, cap: 2 }
        );
    }

    fn sample_conjunct() -> Conjunct {
        // `Up(f)[a, b]` as flat literals: derivative bound plus a constant.
        let out = normalize(&parse("Up(f)[a, b]").unwrap()).unwrap();
        assert_eq!(out.len(), 1);
        out.into_iter().next().unwrap()
    }

    #[test]
    fn strict_arrangement_appends_chain_literals() {
        let conjunct = sample_conjunct();
        let arrangement = Arrangement { blocks: vec![names(&["a"]), names(&["b"])] };
        let arranged = apply_arrangement(&conjunct, &arrangement).unwrap();
        assert_eq!(arranged.chain, names(&["a", "b"]));
        assert!(arranged.aliases.is_empty());
        assert!(arranged
            .conjunct
            .contains(&Literal::Sum { x: "b".into(), y: "a".into(), w: "_d1".into() }));
        assert!(arranged.conjunct.contains(&Literal::Pos { x: "_d1".into() }));
        // Original literals survive substitution.
        assert_eq!(arranged.conjunct.len(), conjunct.len() + 2);
    }

    #[test]
    fn merged_arrangement_substitutes_the_representative() {
        let conjunct = sample_conjunct();
        let arrangement = Arrangement { blocks: vec![names(&["a", "b"])] };
        let arranged = apply_arrangement(&conjunct, &arrangement).unwrap();
        assert_eq!(arranged.chain, names(&["a"]));
        assert_eq!(arranged.aliases.get("b"), Some(&"a".to_string()));
        let shapes: Vec<&Literal> = arranged
            .conjunct
            .literals()
            .iter()
            .filter(|l| matches!(l, Literal::Fun { .. }))
            .collect();
        assert_eq!(shapes.len(), 1);
        assert!(matches!(
            shapes[0],
            Literal::Fun { atom: FunAtom::Der { lo: EndVar::Var(lo), hi: EndVar::Var(hi), .. }, .. }
            if lo == "a" && hi == "a"
        ));
        // No chain literal for a single block.
        assert!(!arranged
            .conjunct
            .literals()
            .iter()
            .any(|l| matches!(l, Literal::Sum { .. })));
    }

    #[test]
    fn merging_drops_self_equalities_but_keeps_contradictions() {
        let mut conjunct = Conjunct::new(FreshGen::default());
        conjunct.insert(Literal::Eq { x: "a".into(), y: "b".into() });
        conjunct.insert(Literal::App { y: "v".into(), f: FuncVar::named("f"), x: "a".into() });
        conjunct.insert(Literal::App { y: "w".into(), f: FuncVar::named("f"), x: "b".into() });
        let merged = apply_arrangement(
            &conjunct,
            &Arrangement { blocks: vec![names(&["a", "b"])] },
        )
        .unwrap();
        // `a = a` vanished, both applications now talk about `a`.
        assert_eq!(merged.conjunct.len(), 2);

        // A strict order keeps the (now contradictory) equality literal.
        let strict = apply_arrangement(
            &conjunct,
            &Arrangement { blocks: vec![names(&["b"]), names(&["a"])] },
        )
        .unwrap();
        assert!(strict.conjunct.contains(&Literal::Eq { x: "a".into(), y: "b".into() }));
        assert_eq!(strict.chain, names(&["b", "a"]));
    }

    #[test]
    fn missing_domain_variable_is_a_coverage_error() {
        let conjunct = sample_conjunct();
        let arrangement = Arrangement { blocks: vec![names(&["a"])] };
        assert_eq!(
            apply_arrangement(&conjunct, &arrangement).unwrap_err(),
            CoverageError { var: "b".into() }
        );
    }

    #[test]
    fn prefilter_rejects_orders_contradicting_slack_chains() {
        // b = a + d ∧ d > 0 forces a < b.
        let mut conjunct = Conjunct::new(FreshGen::default());
        conjunct.insert(Literal::Sum { x: "b".into(), y: "a".into(), w: "d".into() });
        conjunct.insert(Literal::Pos { x: "d".into() });

        let a_then_b = Arrangement { blocks: vec![names(&["a"]), names(&["b"])] };
        let b_then_a = Arrangement { blocks: vec![names(&["b"]), names(&["a"])] };
        let merged = Arrangement { blocks: vec![names(&["a", "b"])] };
        assert!(!contradicts_ground_order(&conjunct, &a_then_b));
        assert!(contradicts_ground_order(&conjunct, &b_then_a));
        assert!(contradicts_ground_order(&conjunct, &merged));
    }

    #[test]
    fn prefilter_uses_equalities_and_constants() {
        let mut conjunct = Conjunct::new(FreshGen::default());
        conjunct.insert(Literal::Eq { x: "a".into(), y: "b".into() });
        let split = Arrangement { blocks: vec![names(&["a"]), names(&["b"])] };
        let merged = Arrangement { blocks: vec![names(&["a", "b"])] };
        assert!(contradicts_ground_order(&conjunct, &split));
        assert!(!contradicts_ground_order(&conjunct, &merged));

        let mut pinned = Conjunct::new(FreshGen::default());
        pinned.insert(Literal::ConstDef { x: "a".into(), c: rat(1) });
        pinned.insert(Literal::ConstDef { x: "b".into(), c: rat(2) });
        let a_then_b = Arrangement { blocks: vec![names(&["a"]), names(&["b"])] };
        let b_then_a = Arrangement { blocks: vec![names(&["b"]), names(&["a"])] };
        let together = Arrangement { blocks: vec![names(&["a", "b"])] };
        assert!(!contradicts_ground_order(&pinned, &a_then_b));
        assert!(contradicts_ground_order(&pinned, &b_then_a));
        assert!(contradicts_ground_order(&pinned, &together));
    }

    #[test]
    fn every_arrangement_partitions_the_variables() {
        let vars = names(&["p", "q", "r", "s"]);
        for arrangement in enumerate_arrangements(vars.clone()).unwrap() {
            let mut seen = BTreeSet::new();
            for block in arrangement.blocks() {
                assert!(!block.is_empty(), "empty block in {arrangement}");
                for var in block {
                    assert!(seen.insert(var.clone()), "duplicate {var} in {arrangement}");
                }
            }
            assert_eq!(seen, vars.iter().cloned().collect(), "coverage in {arrangement}");
        }
    }
}

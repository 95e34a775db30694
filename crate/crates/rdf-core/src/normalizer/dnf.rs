//! Propositional disjunctive normal form with opaque atoms.

use super::{NormalizeError, DEFAULT_BRANCH_CAP};
use crate::formula::{Atom, Formula};

/// One disjunctive branch: signed atoms, `true` meaning positive.
type Branch = Vec<(bool, Atom)>;

/// Rewrites a formula into a propositionally equivalent list of branches,
/// each a conjunction of (possibly negated) atoms.
///
/// Negation is pushed down to the atoms and conjunction is distributed over
/// disjunction. Formulas are trees (no shared subterms), so the single
/// structural recursion already visits every subformula exactly once. Branch
/// order follows the source structure and duplicate signed atoms within one
/// branch are dropped, keeping the output deterministic.
pub fn to_dnf(formula: &Formula) -> Result<Vec<Formula>, NormalizeError> {
    to_dnf_with_cap(formula, DEFAULT_BRANCH_CAP)
}

/// [`to_dnf`] with an explicit branch cap.
pub fn to_dnf_with_cap(formula: &Formula, cap: usize) -> Result<Vec<Formula>, NormalizeError> {
    let branches = dnf(formula, true, cap)?;
    Ok(branches.into_iter().map(branch_formula).collect())
}

fn dnf(formula: &Formula, positive: bool, cap: usize) -> Result<Vec<Branch>, NormalizeError> {
    match (formula, positive) {
        (Formula::Atom(atom), _) => Ok(vec![vec![(positive, atom.clone())]]),
        (Formula::Not(inner), _) => dnf(inner, !positive, cap),
        (Formula::And(l, r), true) | (Formula::Or(l, r), false) => {
            product(dnf(l, positive, cap)?, dnf(r, positive, cap)?, cap)
        }
        (Formula::And(l, r), false) | (Formula::Or(l, r), true) => {
            union(dnf(l, positive, cap)?, dnf(r, positive, cap)?, cap)
        }
    }
}

fn union(mut left: Vec<Branch>, right: Vec<Branch>, cap: usize) -> Result<Vec<Branch>, NormalizeError> {
    if left.len().saturating_add(right.len()) > cap {
        return Err(NormalizeError::BranchExplosion { cap });
    }
    left.extend(right);
    Ok(left)
}

fn product(left: Vec<Branch>, right: Vec<Branch>, cap: usize) -> Result<Vec<Branch>, NormalizeError> {
    if left.len().saturating_mul(right.len()) > cap {
        return Err(NormalizeError::BranchExplosion { cap });
    }
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in &left {
        for r in &right {
            let mut branch = l.clone();
            for lit in r {
                if !branch.contains(lit) {
                    branch.push(lit.clone());
                }
            }
            out.push(branch);
        }
    }
    Ok(out)
}

fn branch_formula(branch: Branch) -> Formula {
    let parts: Vec<Formula> = branch
        .into_iter()
        .map(|(positive, atom)| {
            let f = Formula::atom(atom);
            if positive {
                f
            } else {
                Formula::not(f)
            }
        })
        .collect();
    Formula::conj(parts).expect("a branch always carries at least one literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{NumRel, NumTerm};
    use crate::parser::parse;
    use proptest::prelude::*;

    #[test]
    fn single_atom_is_its_own_branch() {
        let f = parse("x > 0").unwrap();
        assert_eq!(to_dnf(&f).unwrap(), vec![f]);
    }

    #[test]
    fn conjunction_distributes_over_disjunction() {
        let f = parse("(x = 1 | y = 2) & z = 3").unwrap();
        let branches = to_dnf(&f).unwrap();
        assert_eq!(
            branches,
            vec![parse("x = 1 & z = 3").unwrap(), parse("y = 2 & z = 3").unwrap()]
        );
    }

    #[test]
    fn linearity_formula_splits_into_two_branches() {
        // Constant derivative versus the negation of convex-and-concave.
        let f = parse("(D[f] = t)[a, b] & !(Convex(f)[a, b] & Concave(f)[a, b])").unwrap();
        let branches = to_dnf(&f).unwrap();
        assert_eq!(branches.len(), 2);
        assert_eq!(
            branches[0],
            parse("(D[f] = t)[a, b] & !Convex(f)[a, b]").unwrap()
        );
        assert_eq!(
            branches[1],
            parse("(D[f] = t)[a, b] & !Concave(f)[a, b]").unwrap()
        );
    }

    #[test]
    fn negation_pushes_through_connectives() {
        let f = parse("!(x = 1 & y = 2)").unwrap();
        let branches = to_dnf(&f).unwrap();
        assert_eq!(
            branches,
            vec![parse("x != 1").unwrap(), parse("y != 2").unwrap()]
        );

        let g = parse("!(x = 1 | y = 2)").unwrap();
        assert_eq!(to_dnf(&g).unwrap(), vec![parse("x != 1 & y != 2").unwrap()]);

        let h = parse("!!(x = 1)").unwrap();
        assert_eq!(to_dnf(&h).unwrap(), vec![parse("x = 1").unwrap()]);
    }

    #[test]
    fn duplicate_literals_collapse_within_a_branch() {
        let f = parse("x = 1 & (x = 1 & x = 1)").unwrap();
        assert_eq!(to_dnf(&f).unwrap(), vec![parse("x = 1").unwrap()]);
    }

    #[test]
    fn branch_cap_is_enforced() {
        let f = parse("(a = 1 | b = 1) & (c = 1 | d = 1)").unwrap();
        assert_eq!(
            to_dnf_with_cap(&f, 3),
            Err(NormalizeError::BranchExplosion { cap: 3 })
        );
        assert_eq!(to_dnf_with_cap(&f, 4).unwrap().len(), 4);
    }

    /// Atom `i` of the opaque pool used by the truth-table property.
    fn pool_atom(i: usize) -> Atom {
        Atom::NumRel {
            rel: NumRel::Eq,
            lhs: NumTerm::var(format!("p{i}")),
            rhs: NumTerm::int(1),
        }
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = (0usize..6).prop_map(|i| Formula::atom(pool_atom(i)));
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                inner.prop_map(Formula::not),
            ]
        })
    }

    /// Evaluates a formula over the opaque pool under a bitmask assignment.
    fn eval(f: &Formula, bits: u8) -> bool {
        match f {
            Formula::Atom(Atom::NumRel { lhs: NumTerm::Var(name), .. }) => {
                let i: usize = name[1..].parse().unwrap();
                bits & (1 << i) != 0
            }
            Formula::Atom(_) => unreachable!("pool atoms are variable comparisons"),
            Formula::Not(inner) => !eval(inner, bits),
            Formula::And(l, r) => eval(l, bits) && eval(r, bits),
            Formula::Or(l, r) => eval(l, bits) || eval(r, bits),
        }
    }

    fn is_signed_atom_conjunction(f: &Formula) -> bool {
        match f {
            Formula::Atom(_) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(_)),
            Formula::And(l, r) => is_signed_atom_conjunction(l) && is_signed_atom_conjunction(r),
            Formula::Or(_, _) => false,
        }
    }

    proptest! {
        /// The output is a disjunction of signed-atom conjunctions that agrees
        /// with the input on every assignment of the six pool atoms.
        #[test]
        fn dnf_preserves_truth_tables(f in arb_formula()) {
            let branches = to_dnf(&f).unwrap();
            for b in &branches {
                prop_assert!(is_signed_atom_conjunction(b));
            }
            for bits in 0u8..64 {
                let want = eval(&f, bits);
                let got = branches.iter().any(|b| eval(b, bits));
                prop_assert_eq!(want, got, "assignment {:06b}", bits);
            }
        }
    }
}

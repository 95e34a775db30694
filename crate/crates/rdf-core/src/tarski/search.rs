//! Self-contained rational model search.
//!
//! This is the fallback used when no external solver is configured: it can
//! confirm satisfiability by exhibiting an exact rational witness, and it
//! can say `unknown` — it never claims `unsat`, because exhausting a finite
//! search proves nothing about the reals.
//!
//! Three phases, each exact:
//! 1. Linear equalities among the top-level conjuncts are eliminated by
//!    Gaussian substitution, shrinking the search to the free variables.
//! 2. With at most two free variables, small rationals are enumerated in
//!    order of increasing height (max of |numerator| and denominator).
//! 3. Otherwise (or when enumeration fails), seeded hill-climbing minimizes
//!    an exact violation measure; a measure of zero is re-checked with
//!    [`evaluate_exact`] before `sat` is reported.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{rat, ratio, Rational};

use super::formula::{evaluate_exact, PolyAtom, PolyRel, TarskiBody, TarskiFormula};
use super::poly::Polynomial;
use super::{Diagnostics, SatStatus, SolveResult};

/// Effort bounds for [`search_internal`].
#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Largest |numerator| tried during enumeration.
    pub max_numerator: i64,
    /// Largest denominator tried during enumeration.
    pub max_denominator: i64,
    /// Number of hill-climbing restarts.
    pub restarts: usize,
    /// Proposal steps per restart.
    pub steps: usize,
    /// RNG seed; equal seeds give identical searches.
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_numerator: 8,
            max_denominator: 4,
            restarts: 24,
            steps: 800,
            seed: 20260822,
        }
    }
}

/// Searches for an exact rational witness within `budget`.
///
/// Returns `sat` with a validated witness, or `unknown`; never `unsat`.
pub fn search_internal(formula: &TarskiFormula, budget: &SearchBudget) -> SolveResult {
    let started = Instant::now();
    let finish = |status, witness, notes: Vec<String>| SolveResult {
        status,
        witness,
        validated: matches!(status, SatStatus::Sat),
        diagnostics: Diagnostics {
            solver: "internal-search".to_string(),
            wall_time: started.elapsed(),
            transcript: None,
            notes,
        },
    };

    // Phase 1: solve the linear equalities among the top-level conjuncts.
    let conjuncts: Vec<&TarskiBody> = match formula.body() {
        TarskiBody::And(parts) => parts.iter().collect(),
        TarskiBody::True => Vec::new(),
        other => vec![other],
    };
    let mut solved: BTreeMap<String, LinearExpr> = BTreeMap::new();
    for conjunct in &conjuncts {
        let TarskiBody::Atom(PolyAtom { poly, rel: PolyRel::Eq }) = conjunct else {
            continue;
        };
        let Some(mut row) = LinearExpr::from_poly(poly) else { continue };
        for (var, expr) in &solved {
            row.substitute(var, expr);
        }
        let Some(pivot) = row.coeffs.keys().next().cloned() else {
            if row.constant.is_zero() {
                continue;
            }
            // The equalities alone are contradictory; still not our place
            // to say unsat — that is the external solver's job.
            return finish(
                SatStatus::Unknown,
                None,
                vec!["linear equalities are inconsistent; refutation left to the external solver".to_string()],
            );
        };
        let scale = -rat(1) / row.coeffs.remove(&pivot).unwrap();
        let expr = LinearExpr {
            constant: &row.constant * &scale,
            coeffs: row.coeffs.iter().map(|(v, c)| (v.clone(), c * &scale)).collect(),
        };
        for existing in solved.values_mut() {
            existing.substitute(&pivot, &expr);
        }
        solved.insert(pivot, expr);
    }
    let free: Vec<String> = formula
        .variables()
        .iter()
        .filter(|v| !solved.contains_key(*v))
        .cloned()
        .collect();

    let complete = |free_values: &BTreeMap<String, Rational>| {
        let mut full = free_values.clone();
        for (var, expr) in &solved {
            full.insert(var.clone(), expr.evaluate(free_values));
        }
        full
    };
    // The final word on any candidate: exact evaluation of the original
    // formula, independent of the elimination above.
    let accepts = |free_values: &BTreeMap<String, Rational>| {
        let full = complete(free_values);
        matches!(evaluate_exact(formula, &full), Ok(true)).then_some(full)
    };

    // Phase 2: small-rational enumeration for tiny free-variable counts.
    if free.len() <= 2 {
        let values = enumeration_values(budget);
        let mut tried = 0usize;
        let mut candidates: Box<dyn Iterator<Item = Vec<Rational>>> = match free.len() {
            0 => Box::new(std::iter::once(Vec::new())),
            1 => Box::new(values.iter().map(|v| vec![v.clone()]).collect::<Vec<_>>().into_iter()),
            _ => Box::new(ordered_pairs(&values).into_iter()),
        };
        if let Some(witness) = candidates.find_map(|candidate| {
            tried += 1;
            let assignment: BTreeMap<String, Rational> =
                free.iter().cloned().zip(candidate).collect();
            accepts(&assignment)
        }) {
            return finish(
                SatStatus::Sat,
                Some(witness),
                vec![format!("enumeration found a witness after {tried} candidates")],
            );
        }
        if free.is_empty() {
            return finish(
                SatStatus::Unknown,
                None,
                vec!["fully determined assignment does not satisfy the formula".to_string()],
            );
        }
    }

    // Phase 3: seeded hill-climbing on an exact violation measure.
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let deltas: Vec<Rational> = [4, 2, 1].iter().map(|&n| rat(n)).chain(
        [(1, 2), (1, 4), (1, 8)].iter().map(|&(n, d)| ratio(n, d)),
    ).flat_map(|d| [d.clone(), -d]).collect();

    for restart in 0..budget.restarts.max(1) {
        let mut assignment = starting_point(restart, &free, &mut rng);
        let mut current = violation(formula.body(), true, &complete(&assignment));
        if current.is_zero() {
            if let Some(witness) = accepts(&assignment) {
                return finish(
                    SatStatus::Sat,
                    Some(witness),
                    vec![format!("hill-climbing start {restart} already satisfies the formula")],
                );
            }
        }
        let mut stagnant = 0usize;
        for step in 0..budget.steps {
            let var = match free.choose(&mut rng) {
                Some(v) => v.clone(),
                None => break,
            };
            let delta = deltas.choose(&mut rng).unwrap().clone();
            let mut candidate = assignment.clone();
            *candidate.get_mut(&var).unwrap() += delta;
            let next = violation(formula.body(), true, &complete(&candidate));
            if next < current {
                assignment = candidate;
                current = next;
                stagnant = 0;
                if current.is_zero() {
                    if let Some(witness) = accepts(&assignment) {
                        return finish(
                            SatStatus::Sat,
                            Some(witness),
                            vec![format!(
                                "hill-climbing found a witness (restart {restart}, step {step})"
                            )],
                        );
                    }
                }
            } else {
                stagnant += 1;
                if stagnant > 120 {
                    break;
                }
            }
        }
    }

    finish(
        SatStatus::Unknown,
        None,
        vec![format!(
            "no witness within budget ({} restarts × {} steps)",
            budget.restarts, budget.steps
        )],
    )
}

/// All reduced rationals within the numerator/denominator bounds, ordered by
/// height (max of |numerator| and denominator), then by value.
fn enumeration_values(budget: &SearchBudget) -> Vec<Rational> {
    let mut values: Vec<(i64, Rational)> = Vec::new();
    for den in 1..=budget.max_denominator.max(1) {
        for num in -budget.max_numerator.max(0)..=budget.max_numerator.max(0) {
            if gcd(num.unsigned_abs(), den.unsigned_abs()) != 1 {
                continue;
            }
            values.push((num.abs().max(den), ratio(num, den)));
        }
    }
    values.sort_by(|(ha, va), (hb, vb)| ha.cmp(hb).then_with(|| va.cmp(vb)));
    values.into_iter().map(|(_, v)| v).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// All pairs from `values`, in order of the larger index — iterative
/// deepening over the value heights.
fn ordered_pairs(values: &[Rational]) -> Vec<Vec<Rational>> {
    let mut pairs = Vec::with_capacity(values.len() * values.len());
    for bound in 0..values.len() {
        for i in 0..=bound {
            pairs.push(vec![values[i].clone(), values[bound].clone()]);
            if i != bound {
                pairs.push(vec![values[bound].clone(), values[i].clone()]);
            }
        }
    }
    pairs
}

/// Deterministic seeds first, then random dyadic assignments.
fn starting_point(
    restart: usize,
    free: &[String],
    rng: &mut ChaCha8Rng,
) -> BTreeMap<String, Rational> {
    let mut value = |i: usize| match restart {
        0 => rat(0),
        1 => rat(i as i64 + 1),
        2 => rat(-(i as i64 + 1)),
        3 => ratio(i as i64 + 1, 2),
        _ => ratio(rng.gen_range(-12..=12), 1i64 << rng.gen_range(0..=2u32)),
    };
    free.iter().enumerate().map(|(i, v)| (v.clone(), value(i))).collect()
}

/// Exact distance-to-satisfaction measure: zero iff the body evaluates to
/// `want` under the (total) assignment.
fn violation(body: &TarskiBody, want: bool, assignment: &BTreeMap<String, Rational>) -> Rational {
    match body {
        TarskiBody::True => {
            if want {
                Rational::zero()
            } else {
                rat(1)
            }
        }
        TarskiBody::Atom(PolyAtom { poly, rel }) => {
            let value = match poly.evaluate(assignment) {
                Ok(v) => v,
                Err(_) => return rat(1_000_000_000),
            };
            match (rel, want) {
                (PolyRel::Eq, true) => value.abs(),
                (PolyRel::Eq, false) => {
                    if value.is_zero() {
                        rat(1)
                    } else {
                        Rational::zero()
                    }
                }
                (PolyRel::Lt, true) => {
                    if value.is_negative() {
                        Rational::zero()
                    } else {
                        value + rat(1)
                    }
                }
                (PolyRel::Lt, false) => {
                    if value.is_negative() {
                        -value
                    } else {
                        Rational::zero()
                    }
                }
                (PolyRel::Le, true) => {
                    if value.is_positive() {
                        value
                    } else {
                        Rational::zero()
                    }
                }
                (PolyRel::Le, false) => {
                    if value.is_positive() {
                        Rational::zero()
                    } else {
                        -value + rat(1)
                    }
                }
            }
        }
        TarskiBody::And(parts) => combine(parts, want, assignment, want),
        TarskiBody::Or(parts) => combine(parts, want, assignment, !want),
        TarskiBody::Implies(a, b) => {
            if want {
                violation(a, false, assignment).min(violation(b, true, assignment))
            } else {
                violation(a, true, assignment) + violation(b, false, assignment)
            }
        }
        TarskiBody::Not(inner) => violation(inner, !want, assignment),
    }
}

/// Sum the children when all must hold, take the minimum when one suffices.
fn combine(
    parts: &[TarskiBody],
    want: bool,
    assignment: &BTreeMap<String, Rational>,
    all_must_hold: bool,
) -> Rational {
    if all_must_hold {
        parts.iter().map(|p| violation(p, want, assignment)).sum()
    } else {
        parts
            .iter()
            .map(|p| violation(p, want, assignment))
            .min()
            .unwrap_or_else(|| rat(1))
    }
}

/// An affine expression `constant + Σ coeff·var` used during elimination.
#[derive(Debug, Clone)]
struct LinearExpr {
    constant: Rational,
    coeffs: BTreeMap<String, Rational>,
}

impl LinearExpr {
    /// `None` when the polynomial is not affine.
    fn from_poly(poly: &Polynomial) -> Option<LinearExpr> {
        let mut expr = LinearExpr { constant: Rational::zero(), coeffs: BTreeMap::new() };
        for (mono, coeff) in poly.terms() {
            match mono.degree() {
                0 => expr.constant += coeff,
                1 => {
                    let (var, _) = mono.exponents().next().unwrap();
                    *expr.coeffs.entry(var.to_string()).or_insert_with(Rational::zero) +=
                        coeff;
                }
                _ => return None,
            }
        }
        expr.coeffs.retain(|_, c| !c.is_zero());
        Some(expr)
    }

    /// Replaces `var` by `replacement` throughout.
    fn substitute(&mut self, var: &str, replacement: &LinearExpr) {
        let Some(factor) = self.coeffs.remove(var) else { return };
        self.constant += &factor * &replacement.constant;
        for (v, c) in &replacement.coeffs {
            let slot = self.coeffs.entry(v.clone()).or_insert_with(Rational::zero);
            *slot += &factor * c;
        }
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    fn evaluate(&self, assignment: &BTreeMap<String, Rational>) -> Rational {
        let mut value = self.constant.clone();
        for (var, coeff) in &self.coeffs {
            value += coeff * assignment.get(var).cloned().unwrap_or_else(Rational::zero);
        }
        value
    }
}

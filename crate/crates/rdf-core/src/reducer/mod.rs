//! Reduction of ordered conjuncts to existential real arithmetic.
//!
//! The pipeline has already normalized the input into flat conjunctions
//! ([`Conjunct`]) and fixed an order on the domain variables
//! ([`ArrangedConjunct`]). This module removes the functional content of such
//! a conjunct in three steps and leaves a polynomial-arithmetic formula
//! ([`TarskiFormula`]) that is equisatisfiable with it:
//!
//! 1. [`step1_remove_negatives`] — every negated functional literal is
//!    replaced by a positive existential gadget ("there is a point where the
//!    property fails"), after which the gadget's fresh comparison atoms
//!    re-enter the normalizer and may fork the conjunct;
//! 2. [`step2_explicit_eval`] — for every function `f` and chain point `v_j`
//!    two sampling variables are introduced, `y_j^f = f(v_j)` and
//!    `t_j^f = D[f](v_j)`, and preexisting applications at chain points are
//!    linked to them;
//! 3. [`step3_remove_functionals`] — each positive functional literal is
//!    transcribed into polynomial constraints over the samples (value
//!    equalities and comparisons, slope bounds through divided differences,
//!    convexity windows, asymptotic-slope parameters at infinite interval
//!    ends), and all literals mentioning a function are dropped.
//!
//! [`reduce`] composes the steps. Step 1 may introduce new domain variables
//! (the gadget sample points), so the reduction re-runs the arrangement fan
//! on every branch whose domain grew; the result is therefore a list of
//! [`ReducedBranch`]es whose disjunction is equisatisfiable with the input.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::arranger::{
    apply_arrangement, contradicts_ground_order, enumerate_arrangements, ArrangedConjunct,
    ArrangementExplosion,
};
use crate::formula::FuncVar;
use crate::normalizer::{Conjunct, EndVar, NormalizeError};
use crate::tarski::{TarskiBody, TarskiFormula};

mod families;
mod negatives;

pub use families::{step2_explicit_eval, step3_remove_functionals};
pub use negatives::step1_remove_negatives;

/// A functional literal refers to a point that is not on the ordered chain.
///
/// Function applications and interval endpoints can only be eliminated at
/// known sample positions; a variable outside the chain means the conjunct
/// was not (re)ordered after its domain variables changed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("variable {var} is used as a function-domain point but is not on the ordered chain")]
pub struct MissingChain {
    /// The offending variable.
    pub var: String,
}

/// Errors surfaced by [`reduce`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    /// Renormalizing the step-1 gadgets exceeded the branch cap.
    #[error(transparent)]
    Branching(#[from] NormalizeError),
    /// Reordering a branch would enumerate too many arrangements.
    #[error(transparent)]
    Explosion(#[from] ArrangementExplosion),
    /// A branch conjunct mentions an off-chain domain point.
    #[error(transparent)]
    MissingChain(#[from] MissingChain),
}

/// The two sampling variables of one function at one chain position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSamples {
    /// Holds the function value at the position (`y_j^f = f(v_j)`).
    pub value: String,
    /// Holds the derivative value at the position (`t_j^f = D[f](v_j)`).
    pub deriv: String,
}

/// Asymptotic-slope parameters of one function on the two unbounded tails.
///
/// An interval reaching `-inf` (resp. `+inf`) constrains the function beyond
/// the sampled chain; the tail behaviour is summarized by one slope variable
/// per side, which the constraint families bound exactly like a derivative
/// sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Asymptotes {
    /// Slope parameter for the tail toward `-inf`.
    pub start: String,
    /// Slope parameter for the tail toward `+inf`.
    pub end: String,
}

/// Sampling bookkeeping shared by steps 2 and 3 and by witness construction.
///
/// Positions are 1-based: `chain()[j - 1]` is the variable at position `j`.
/// Every function variable of the conjunct has samples at every position and
/// both asymptote parameters; the accessors panic when that invariant is
/// broken, which can only happen by mixing contexts between conjuncts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionContext {
    chain: Vec<String>,
    samples: BTreeMap<(FuncVar, usize), FunctionSamples>,
    asymptotes: BTreeMap<FuncVar, Asymptotes>,
}

impl ReductionContext {
    /// Claims sampling variables for every function at every chain position.
    ///
    /// Names follow the `_y<j>_<f>` / `_t<j>_<f>` / `_g0_<f>` / `_gr_<f>`
    /// pattern, suffixed by the conjunct's namespace when already taken.
    pub fn build(chain: Vec<String>, conjunct: &mut Conjunct) -> ReductionContext {
        let mut samples = BTreeMap::new();
        let mut asymptotes = BTreeMap::new();
        for f in conjunct.function_vars() {
            let fname = f.name().to_string();
            for (pos, _) in chain.iter().enumerate() {
                let j = pos + 1;
                let value = conjunct.claim(&format!("_y{j}_{fname}"));
                let deriv = conjunct.claim(&format!("_t{j}_{fname}"));
                samples.insert((f.clone(), j), FunctionSamples { value, deriv });
            }
            let start = conjunct.claim(&format!("_g0_{fname}"));
            let end = conjunct.claim(&format!("_gr_{fname}"));
            asymptotes.insert(f, Asymptotes { start, end });
        }
        ReductionContext { chain, samples, asymptotes }
    }

    /// The ordered domain variables, positions 1 through `len()`.
    pub fn chain(&self) -> &[String] {
        &self.chain
    }

    /// Number of chain positions.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    /// Whether the chain is empty (no functions and no domain points).
    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// The functions that carry samples, in canonical order.
    pub fn functions(&self) -> impl Iterator<Item = &FuncVar> {
        self.asymptotes.keys()
    }

    /// The 1-based index of an interval endpoint on the chain.
    ///
    /// `-inf` indexes the first position and `+inf` the last, so that every
    /// constraint family ranges over plain positions; a finite endpoint that
    /// is not a chain variable reports [`MissingChain`].
    pub fn ind(&self, end: &EndVar) -> Result<usize, MissingChain> {
        match end {
            EndVar::NegInf => Ok(1),
            EndVar::PosInf => Ok(self.chain.len()),
            EndVar::Var(v) => self
                .chain
                .iter()
                .position(|c| c == v)
                .map(|p| p + 1)
                .ok_or_else(|| MissingChain { var: v.clone() }),
        }
    }

    /// The position of a plain chain variable, 1-based.
    pub fn position(&self, var: &str) -> Option<usize> {
        self.chain.iter().position(|c| c == var).map(|p| p + 1)
    }

    /// The sampling variables of `f` at position `j`.
    pub fn samples(&self, f: &FuncVar, j: usize) -> &FunctionSamples {
        self.samples
            .get(&(f.clone(), j))
            .expect("every function is sampled at every chain position")
    }

    /// The value-sample variable `y_j^f`.
    pub fn value_var(&self, f: &FuncVar, j: usize) -> &str {
        &self.samples(f, j).value
    }

    /// The derivative-sample variable `t_j^f`.
    pub fn deriv_var(&self, f: &FuncVar, j: usize) -> &str {
        &self.samples(f, j).deriv
    }

    /// The asymptotic-slope parameters of `f`.
    pub fn asymptotes(&self, f: &FuncVar) -> &Asymptotes {
        self.asymptotes
            .get(f)
            .expect("every function has asymptote parameters")
    }
}

/// One branch of a reduction: the fully sampled ordered conjunct, its
/// sampling context, and the arithmetic formula that models it.
#[derive(Debug, Clone)]
pub struct ReducedBranch {
    /// The conjunct after gadget removal, ordering, and explicit sampling.
    pub arranged: ArrangedConjunct,
    /// Chain and sample-variable bookkeeping for witness reconstruction.
    pub context: ReductionContext,
    /// The function-free formula equisatisfiable with this branch.
    pub formula: TarskiFormula,
}

/// The reduction of one ordered conjunct.
///
/// Negative-literal gadgets and reordering both fork, so the result is a
/// list; the input conjunct is satisfiable exactly when some branch formula
/// is. An empty list means every branch was discharged as vacuously false.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// The branches, in deterministic order.
    pub branches: Vec<ReducedBranch>,
}

impl Reduction {
    /// Single-formula view: the disjunction of the branch formulas.
    ///
    /// An empty reduction yields the unsatisfiable formula `¬true`.
    pub fn formula(&self) -> TarskiFormula {
        match self.branches.len() {
            0 => TarskiFormula::new(TarskiBody::negate(TarskiBody::True)),
            1 => self.branches[0].formula.clone(),
            _ => TarskiFormula::new(TarskiBody::or(
                self.branches.iter().map(|b| b.formula.body().clone()).collect(),
            )),
        }
    }
}

/// Reduces an ordered conjunct to function-free arithmetic.
///
/// Composes the three steps: gadget removal (which renormalizes and may
/// fork), reordering of branches whose domain variables changed, explicit
/// sampling, and functional elimination. Deterministic for deterministic
/// input.
pub fn reduce(ordered: &ArrangedConjunct) -> Result<Reduction, ReduceError> {
    let known: BTreeSet<&str> = ordered.chain.iter().map(String::as_str).collect();
    let mut branches = Vec::new();
    for conjunct in step1_remove_negatives(&ordered.conjunct)? {
        let domain = conjunct.domain_vars();
        if domain.iter().all(|v| known.contains(v.as_str())) {
            // No gadget introduced a new domain point: the established order
            // covers this branch (restricted to the surviving variables).
            let chain: Vec<String> = ordered
                .chain
                .iter()
                .filter(|v| domain.contains(*v))
                .cloned()
                .collect();
            let arranged = ArrangedConjunct {
                conjunct,
                chain,
                aliases: ordered.aliases.clone(),
            };
            branches.push(reduce_ordered_branch(arranged)?);
        } else {
            // Gadget points joined the domain: fan out over the orders of the
            // new domain set. The retained chain literals of the original
            // order ground-contradict every arrangement that disagrees with
            // it, so the established order is preserved.
            let vars: Vec<String> = domain.iter().cloned().collect();
            for arrangement in enumerate_arrangements(vars)? {
                if contradicts_ground_order(&conjunct, &arrangement) {
                    continue;
                }
                let mut rearranged = apply_arrangement(&conjunct, &arrangement)
                    .expect("arrangements enumerate exactly the branch domain variables");
                rearranged.aliases = compose_aliases(&ordered.aliases, &rearranged.aliases);
                branches.push(reduce_ordered_branch(rearranged)?);
            }
        }
    }
    Ok(Reduction { branches })
}

/// Steps 2 and 3 on one ordered branch.
fn reduce_ordered_branch(mut arranged: ArrangedConjunct) -> Result<ReducedBranch, ReduceError> {
    let mut chain = arranged.chain.clone();
    if chain.is_empty() && !arranged.conjunct.function_vars().is_empty() {
        // Functions constrained only on unbounded intervals have no domain
        // point to sample; pin one anchor so every function owns at least one
        // value/derivative sample for the constraint families to range over.
        chain.push(arranged.conjunct.fresh("anchor"));
        arranged.chain = chain.clone();
    }
    let context = ReductionContext::build(chain, &mut arranged.conjunct);
    arranged.conjunct = step2_explicit_eval(&arranged.conjunct, &context);
    let formula = step3_remove_functionals(&arranged.conjunct, &context)?;
    Ok(ReducedBranch { arranged, context, formula })
}

/// Chains two merge maps: variables merged by the first arrangement follow
/// their representative through the second.
fn compose_aliases(
    earlier: &BTreeMap<String, String>,
    later: &BTreeMap<String, String>,
) -> BTreeMap<String, String> {
    let mut out = later.clone();
    for (merged, rep) in earlier {
        let target = later.get(rep).unwrap_or(rep);
        out.insert(merged.clone(), target.clone());
    }
    out
}

//! Assembly of explicit models from arithmetic witnesses.
//!
//! A satisfying assignment of the reduced formula pins each function down
//! at the chain points: values `y_j`, slopes `t_j`, and asymptotic slopes
//! toward the infinite ends. [`build_model`] turns that data into concrete
//! [`PiecewiseModel`]s — one bounded piece per chain gap, one exponential
//! tail per side — while honouring three structural obligations:
//!
//! * functions equated on an interval share the identical piece objects
//!   there, so pointwise equality holds by construction;
//! * every piece satisfies the shape requirements collected from the atoms
//!   covering its span (monotonicity, bending, derivative bounds);
//! * functions compared on an interval are refitted with tighter boundary
//!   layers until each stays within a third of the smallest sample gap of
//!   its chord, which forces strict dominance between the sample points.
//!
//! The numeric half of the witness is never adjusted: model construction
//! only chooses function shapes between the pinned samples.

use std::collections::{BTreeMap, BTreeSet};

use super::fit::{fit_segment, fit_tail, InfeasibleSegment, InfeasibleTail, ShapeRequirement};
use super::model::{ModelError, Piece, PiecewiseModel, TailSide};
use crate::formula::{ExplicitModel, FuncVar, ShapeKind};
use crate::normalizer::{Conjunct, EndVar, FunAtom, Literal};
use crate::rational::{rat, to_f64, Rational};
use crate::reducer::ReductionContext;

/// Bound on the envelope/dominance refit loop.
const MAX_ENVELOPE_RETRIES: u32 = 20;

/// Samples per knot gap when verifying dominance densely.
const DOMINANCE_SAMPLES: usize = 64;

/// Uniform probes per piece when measuring deviation from a chord.
const CHORD_SAMPLES: usize = 256;

/// Model construction failed; satisfiability of the formula is untouched —
/// the caller reports a certification failure, not an unsat verdict.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    /// A bounded span's pinned data admits no piece with its shapes.
    #[error("function {function} on {place}: {source}")]
    Segment { function: String, place: String, source: InfeasibleSegment },
    /// A tail's pinned data admits no piece with its shapes.
    #[error("function {function} on {place}: {source}")]
    Tail { function: String, place: String, source: InfeasibleTail },
    /// The fitted pieces of one function do not glue into a model.
    #[error("function {function} does not assemble: {source}")]
    Assembly { function: String, source: ModelError },
    /// A comparison-covered sample pair has no positive gap, so the witness
    /// cannot satisfy the comparison it was validated against.
    #[error("comparison of {f} over {g} has no positive sample gap")]
    NoGap { f: String, g: String },
    /// Dominance between compared functions failed to verify within the
    /// retry budget.
    #[error("dominance of compared functions not verified within {retries} refits")]
    RetriesExhausted { retries: u32 },
}

/// An explicit model paired with the exact rational assignment it realizes;
/// arithmetic literals are certified against the exact half, function
/// behaviour against the model half.
#[derive(Debug, Clone)]
pub struct WitnessedModel {
    pub model: ExplicitModel,
    pub exact: BTreeMap<String, Rational>,
}

/// One fitting task: either the bounded span between chain positions `j`
/// and `j + 1`, or an unbounded side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    LeftTail,
    Gap(usize),
    RightTail,
}

impl Slot {
    fn describe(self, ctx: &ReductionContext) -> String {
        match self {
            Slot::LeftTail => format!("(-inf, {}]", ctx.chain()[0]),
            Slot::Gap(j) => format!("[{}, {}]", ctx.chain()[j - 1], ctx.chain()[j]),
            Slot::RightTail => format!("[{}, +inf)", ctx.chain()[ctx.len() - 1]),
        }
    }
}

/// Union-find over `(function, slot)` keys; equality coverage merges slots
/// so that one fitted piece serves the whole class.
struct Sharing {
    parent: BTreeMap<(FuncVar, Slot), (FuncVar, Slot)>,
}

impl Sharing {
    fn new() -> Sharing {
        Sharing { parent: BTreeMap::new() }
    }

    fn find(&self, mut key: (FuncVar, Slot)) -> (FuncVar, Slot) {
        while let Some(next) = self.parent.get(&key) {
            key = next.clone();
        }
        key
    }

    /// Merges two classes; the smaller root wins so the choice of
    /// representative is deterministic.
    fn union(&mut self, a: (FuncVar, Slot), b: (FuncVar, Slot)) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (hi, lo) = if ra > rb { (ra, rb) } else { (rb, ra) };
            self.parent.insert(hi, lo);
        }
    }
}

/// Shape requirements and comparison obligations harvested from the
/// positive functional literals of a conjunct.
struct Coverage {
    sharing: Sharing,
    requirements: BTreeMap<(FuncVar, Slot), Vec<ShapeRequirement>>,
    /// `(f, g, a, b)`: `f > g` pointwise between chain positions `a..=b`.
    dominance: Vec<(FuncVar, FuncVar, usize, usize)>,
    /// Slots that must hug their chords for dominance to interpolate.
    enveloped: BTreeSet<(FuncVar, Slot)>,
}

/// Chain positions and tail flags covered by an interval `[lo, hi]`.
///
/// Returns `None` for vacuous intervals (reversed endpoints, and for shape
/// atoms also a single merged point). For live intervals, `a..=b` are the
/// covered positions and the flags say whether the corresponding unbounded
/// side is included.
fn live_range(
    ctx: &ReductionContext,
    lo: &EndVar,
    hi: &EndVar,
) -> Option<(usize, usize, bool, bool)> {
    if matches!(lo, EndVar::PosInf) || matches!(hi, EndVar::NegInf) {
        return None;
    }
    let a = ctx.ind(lo).expect("range variables of a reduced conjunct lie on its chain");
    let b = ctx.ind(hi).expect("range variables of a reduced conjunct lie on its chain");
    if matches!((lo, hi), (EndVar::Var(_), EndVar::Var(_))) && a > b {
        return None;
    }
    Some((a, b, matches!(lo, EndVar::NegInf), matches!(hi, EndVar::PosInf)))
}

fn shape_requirement(kind: ShapeKind) -> ShapeRequirement {
    match kind {
        ShapeKind::Up => ShapeRequirement::Monotone { up: true, strict: false },
        ShapeKind::StrictUp => ShapeRequirement::Monotone { up: true, strict: true },
        ShapeKind::Down => ShapeRequirement::Monotone { up: false, strict: false },
        ShapeKind::StrictDown => ShapeRequirement::Monotone { up: false, strict: true },
        ShapeKind::Convex => ShapeRequirement::Bend { convex: true, strict: false },
        ShapeKind::StrictConvex => ShapeRequirement::Bend { convex: true, strict: true },
        ShapeKind::Concave => ShapeRequirement::Bend { convex: false, strict: false },
        ShapeKind::StrictConcave => ShapeRequirement::Bend { convex: false, strict: true },
    }
}

impl Coverage {
    fn require(&mut self, f: &FuncVar, slot: Slot, req: ShapeRequirement) {
        self.requirements.entry((f.clone(), slot)).or_default().push(req);
    }

    /// Registers one requirement over all gaps `a..b` and the flagged tails.
    fn require_span(
        &mut self,
        f: &FuncVar,
        (a, b, left, right): (usize, usize, bool, bool),
        req: ShapeRequirement,
    ) {
        for j in a..b {
            self.require(f, Slot::Gap(j), req);
        }
        if left {
            self.require(f, Slot::LeftTail, req);
        }
        if right {
            self.require(f, Slot::RightTail, req);
        }
    }

    fn collect(
        ctx: &ReductionContext,
        conjunct: &Conjunct,
        value_of: &impl Fn(&str) -> f64,
    ) -> Coverage {
        let mut cov = Coverage {
            sharing: Sharing::new(),
            requirements: BTreeMap::new(),
            dominance: Vec::new(),
            enveloped: BTreeSet::new(),
        };
        for literal in conjunct.literals() {
            let Literal::Fun { positive: true, atom } = literal else { continue };
            match atom {
                FunAtom::Eq { f, g, lo, hi } => {
                    let Some((a, b, left, right)) = live_range(ctx, lo, hi) else { continue };
                    // A single merged point only equates the sample values,
                    // which the witness already does exactly.
                    for j in a..b {
                        cov.sharing.union((f.clone(), Slot::Gap(j)), (g.clone(), Slot::Gap(j)));
                    }
                    if left {
                        cov.sharing.union((f.clone(), Slot::LeftTail), (g.clone(), Slot::LeftTail));
                    }
                    if right {
                        cov.sharing
                            .union((f.clone(), Slot::RightTail), (g.clone(), Slot::RightTail));
                    }
                }
                FunAtom::Gt { f, g, lo, hi } => {
                    let a = ctx
                        .position(lo)
                        .expect("range variables of a reduced conjunct lie on its chain");
                    let b = ctx
                        .position(hi)
                        .expect("range variables of a reduced conjunct lie on its chain");
                    if a > b {
                        continue;
                    }
                    cov.dominance.push((f.clone(), g.clone(), a, b));
                    for j in a..b {
                        cov.enveloped.insert((f.clone(), Slot::Gap(j)));
                        cov.enveloped.insert((g.clone(), Slot::Gap(j)));
                    }
                }
                FunAtom::Der { f, rel, bound, lo, hi } => {
                    let Some(range) = live_range(ctx, lo, hi) else { continue };
                    let req = ShapeRequirement::Derivative { rel: *rel, bound: value_of(bound) };
                    cov.require_span(f, range, req);
                }
                FunAtom::Shape { kind, f, lo, hi } => {
                    let Some(range) = live_range(ctx, lo, hi) else { continue };
                    let (a, b, left, right) = range;
                    // On a single point every shape holds vacuously.
                    if a == b && !left && !right {
                        continue;
                    }
                    cov.require_span(f, range, shape_requirement(*kind));
                }
            }
        }
        cov
    }

    /// Requirements and envelope flags folded onto class representatives.
    fn fold_onto_roots(
        &self,
        slots: &[(FuncVar, Slot)],
    ) -> (BTreeMap<(FuncVar, Slot), Vec<ShapeRequirement>>, BTreeSet<(FuncVar, Slot)>) {
        let mut reqs: BTreeMap<(FuncVar, Slot), Vec<ShapeRequirement>> = BTreeMap::new();
        let mut enveloped = BTreeSet::new();
        for slot in slots {
            let root = self.sharing.find(slot.clone());
            if let Some(own) = self.requirements.get(slot) {
                reqs.entry(root.clone()).or_default().extend(own.iter().copied());
            } else {
                reqs.entry(root.clone()).or_default();
            }
            if self.enveloped.contains(slot) {
                enveloped.insert(root);
            }
        }
        (reqs, enveloped)
    }
}

/// Builds explicit piecewise models realizing an arithmetic witness.
///
/// `witness` must satisfy the reduced formula of the branch `ctx` and
/// `conjunct` came from (validated by exact evaluation); `conjunct` is the
/// branch conjunct after explicit sampling, whose positive functional
/// literals dictate sharing, shapes, and dominance. Variables the reduced
/// formula left unconstrained default to zero (and tails default to straight
/// rays), which keeps the model total without touching any pinned value.
pub fn build_model(
    ctx: &ReductionContext,
    witness: &BTreeMap<String, Rational>,
    conjunct: &Conjunct,
) -> Result<WitnessedModel, BuildError> {
    // The exact assignment: witness values, completed with zero for
    // variables no reduced constraint mentioned.
    let mut exact: BTreeMap<String, Rational> = witness.clone();
    for var in conjunct.variables() {
        exact.entry(var).or_insert_with(|| rat(0));
    }
    for var in ctx.chain() {
        exact.entry(var.clone()).or_insert_with(|| rat(0));
    }
    let functions: Vec<FuncVar> = ctx.functions().cloned().collect();
    for f in &functions {
        // Unconstrained asymptotic slopes continue the boundary slope, so
        // an unconstrained tail is a straight ray.
        let asym = ctx.asymptotes(f).clone();
        let first = exact.get(ctx.deriv_var(f, 1)).cloned().unwrap_or_else(|| rat(0));
        let last = exact.get(ctx.deriv_var(f, ctx.len())).cloned().unwrap_or_else(|| rat(0));
        exact.entry(asym.start).or_insert(first);
        exact.entry(asym.end).or_insert(last);
    }

    let numeric: BTreeMap<String, f64> =
        exact.iter().map(|(k, v)| (k.clone(), to_f64(v))).collect();
    let value_of = |name: &str| -> f64 {
        numeric.get(name).copied().expect("every conjunct variable has an exact value")
    };

    let coverage = Coverage::collect(ctx, conjunct, &value_of);

    // Every slot of every function, then folded onto sharing classes.
    let r = ctx.len();
    let mut slots: Vec<(FuncVar, Slot)> = Vec::new();
    for f in &functions {
        slots.push((f.clone(), Slot::LeftTail));
        for j in 1..r {
            slots.push((f.clone(), Slot::Gap(j)));
        }
        slots.push((f.clone(), Slot::RightTail));
    }
    let (root_reqs, root_enveloped) = coverage.fold_onto_roots(&slots);

    // The smallest vertical gap over all comparison-covered sample columns
    // bounds how far pieces may stray from their chords.
    let mut min_gap = f64::INFINITY;
    for (f, g, a, b) in &coverage.dominance {
        for i in *a..=*b {
            let gap = value_of(ctx.value_var(f, i)) - value_of(ctx.value_var(g, i));
            if gap <= 0.0 {
                return Err(BuildError::NoGap { f: f.name().to_string(), g: g.name().to_string() });
            }
            min_gap = min_gap.min(gap);
        }
    }

    let breakpoints: Vec<f64> = ctx.chain().iter().map(|v| value_of(v)).collect();

    for retry in 0..=MAX_ENVELOPE_RETRIES {
        // Fit each class representative once, then hand the piece to every
        // member of the class.
        let mut fitted: BTreeMap<(FuncVar, Slot), Piece> = BTreeMap::new();
        for (root, reqs) in &root_reqs {
            let (f, slot) = root;
            let piece = match *slot {
                Slot::Gap(j) => fit_segment(
                    breakpoints[j - 1],
                    breakpoints[j],
                    value_of(ctx.value_var(f, j)),
                    value_of(ctx.value_var(f, j + 1)),
                    value_of(ctx.deriv_var(f, j)),
                    value_of(ctx.deriv_var(f, j + 1)),
                    reqs,
                    retry,
                )
                .map_err(|source| BuildError::Segment {
                    function: f.name().to_string(),
                    place: slot.describe(ctx),
                    source,
                })?,
                Slot::LeftTail => fit_tail(
                    TailSide::Left,
                    breakpoints[0],
                    value_of(ctx.value_var(f, 1)),
                    value_of(ctx.deriv_var(f, 1)),
                    value_of(&ctx.asymptotes(f).start),
                    reqs,
                )
                .map_err(|source| BuildError::Tail {
                    function: f.name().to_string(),
                    place: slot.describe(ctx),
                    source,
                })?,
                Slot::RightTail => fit_tail(
                    TailSide::Right,
                    breakpoints[r - 1],
                    value_of(ctx.value_var(f, r)),
                    value_of(ctx.deriv_var(f, r)),
                    value_of(&ctx.asymptotes(f).end),
                    reqs,
                )
                .map_err(|source| BuildError::Tail {
                    function: f.name().to_string(),
                    place: slot.describe(ctx),
                    source,
                })?,
            };
            fitted.insert(root.clone(), piece);
        }

        let mut functional: BTreeMap<String, PiecewiseModel> = BTreeMap::new();
        for f in &functions {
            let mut pieces = vec![fitted[&coverage.sharing.find((f.clone(), Slot::LeftTail))].clone()];
            for j in 1..r {
                pieces.push(fitted[&coverage.sharing.find((f.clone(), Slot::Gap(j)))].clone());
            }
            pieces.push(fitted[&coverage.sharing.find((f.clone(), Slot::RightTail))].clone());
            let model = PiecewiseModel::new(pieces).map_err(|source| BuildError::Assembly {
                function: f.name().to_string(),
                source,
            })?;
            functional.insert(f.name().to_string(), model);
        }

        if envelope_holds(&fitted, &root_enveloped, min_gap / 3.0)
            && dominance_holds(&coverage, &functional, &breakpoints)
        {
            let model = ExplicitModel { numeric: numeric.clone(), functional };
            return Ok(WitnessedModel { model, exact });
        }
    }
    Err(BuildError::RetriesExhausted { retries: MAX_ENVELOPE_RETRIES })
}

/// Whether every comparison-covered piece stays within `bound` of its own
/// chord, measured on a dense uniform probe.
fn envelope_holds(
    fitted: &BTreeMap<(FuncVar, Slot), Piece>,
    enveloped: &BTreeSet<(FuncVar, Slot)>,
    bound: f64,
) -> bool {
    for key in enveloped {
        let piece = &fitted[key];
        let (lo, hi) = piece.interval();
        let y_lo = piece.value_at(lo);
        let y_hi = piece.value_at(hi);
        for i in 0..=CHORD_SAMPLES {
            let s = i as f64 / CHORD_SAMPLES as f64;
            let x = lo + (hi - lo) * s;
            let chord = y_lo + (y_hi - y_lo) * s;
            if (piece.value_at(x) - chord).abs() >= bound {
                return false;
            }
        }
    }
    true
}

/// Whether every comparison holds strictly on a dense sample of its span.
fn dominance_holds(
    coverage: &Coverage,
    functional: &BTreeMap<String, PiecewiseModel>,
    breakpoints: &[f64],
) -> bool {
    for (f, g, a, b) in &coverage.dominance {
        let mf = &functional[f.name()];
        let mg = &functional[g.name()];
        let (lo, hi) = (breakpoints[a - 1], breakpoints[b - 1]);
        if mf.min_difference(mg, lo, hi, DOMINANCE_SAMPLES) <= 0.0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::DerRel;
    use crate::normalizer::FreshGen;
    use crate::rational::{rat, ratio};

    fn f() -> FuncVar {
        FuncVar::named("f")
    }

    fn g() -> FuncVar {
        FuncVar::named("g")
    }

    fn v(name: &str) -> EndVar {
        EndVar::Var(name.into())
    }

    fn ordered(literals: Vec<Literal>, chain: &[&str]) -> (Conjunct, ReductionContext) {
        let mut conjunct = Conjunct::from_literals(literals, FreshGen::default());
        let chain: Vec<String> = chain.iter().map(|s| s.to_string()).collect();
        let ctx = ReductionContext::build(chain, &mut conjunct);
        (conjunct, ctx)
    }

    fn witness(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, n)| (k.to_string(), rat(*n))).collect()
    }

    #[test]
    fn strictly_increasing_identity_data_builds_the_identity() {
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Shape {
                kind: ShapeKind::StrictUp,
                f: f(),
                lo: v("a"),
                hi: v("b"),
            })],
            &["a", "b"],
        );
        let assignment = witness(&[
            ("a", 0),
            ("b", 1),
            ("_y1_f", 0),
            ("_y2_f", 1),
            ("_t1_f", 1),
            ("_t2_f", 1),
        ]);
        let built = build_model(&ctx, &assignment, &conjunct).unwrap();
        let model = &built.model.functional["f"];
        // The pinned data is the identity on [0, 1]; the unconstrained
        // asymptotic slopes continue the boundary slope, so the whole model
        // is the identity line.
        for x in [-10.0, 0.0, 0.25, 1.0, 42.0] {
            assert!((model.value(x) - x).abs() < 1e-9, "f({x}) = {}", model.value(x));
            assert!((model.derivative(x) - 1.0).abs() < 1e-9);
        }
        // Numeric witness values pass through unchanged.
        assert_eq!(built.model.numeric["a"], 0.0);
        assert_eq!(built.exact["b"], rat(1));
    }

    #[test]
    fn equated_functions_share_identical_pieces() {
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Eq { f: f(), g: g(), lo: v("a"), hi: v("b") })],
            &["a", "b"],
        );
        let assignment = witness(&[
            ("a", 0),
            ("b", 2),
            ("_y1_f", 0),
            ("_y2_f", 4),
            ("_t1_f", 1),
            ("_t2_f", 3),
            ("_y1_g", 0),
            ("_y2_g", 4),
            ("_t1_g", 1),
            ("_t2_g", 3),
        ]);
        let built = build_model(&ctx, &assignment, &conjunct).unwrap();
        let mf = &built.model.functional["f"];
        let mg = &built.model.functional["g"];
        assert!(mf.identical_on(mg, 0.0, 2.0));
        assert_eq!(mf.max_abs_difference(mg, 0.0, 2.0, 32), 0.0);
    }

    #[test]
    fn comparison_refits_until_dominance_holds_densely() {
        // g's slopes force a huge interior bulge at the widest layers; the
        // envelope pass must shrink the layers until f stays above g.
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Gt {
                f: f(),
                g: g(),
                lo: "a".into(),
                hi: "b".into(),
            })],
            &["a", "b"],
        );
        let assignment = witness(&[
            ("a", 0),
            ("b", 1),
            ("_y1_f", 1),
            ("_y2_f", 2),
            ("_t1_f", 1),
            ("_t2_f", 1),
            ("_y1_g", 0),
            ("_y2_g", 0),
            ("_t1_g", 30),
            ("_t2_g", -30),
        ]);
        let built = build_model(&ctx, &assignment, &conjunct).unwrap();
        let mf = &built.model.functional["f"];
        let mg = &built.model.functional["g"];
        // Dense sampling oracle: strict dominance at every probe.
        let mut min_gap = f64::INFINITY;
        for i in 0..=10_000 {
            let x = i as f64 / 10_000.0;
            min_gap = min_gap.min(mf.value(x) - mg.value(x));
        }
        assert!(min_gap > 0.0, "sampled min gap {min_gap}");
    }

    #[test]
    fn comparison_without_sample_gap_is_rejected() {
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Gt {
                f: f(),
                g: g(),
                lo: "a".into(),
                hi: "b".into(),
            })],
            &["a", "b"],
        );
        let assignment = witness(&[
            ("a", 0),
            ("b", 1),
            ("_y1_f", 1),
            ("_y2_f", 0),
            ("_y1_g", 0),
            ("_y2_g", 0),
        ]);
        let err = build_model(&ctx, &assignment, &conjunct).unwrap_err();
        assert!(matches!(err, BuildError::NoGap { .. }), "{err}");
    }

    #[test]
    fn inconsistent_shape_data_names_the_function_and_span() {
        // Strict convexity needs the mean slope strictly between the
        // endpoint slopes; equal slopes with a matching rise are a line.
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Shape {
                kind: ShapeKind::StrictConvex,
                f: f(),
                lo: v("a"),
                hi: v("b"),
            })],
            &["a", "b"],
        );
        let assignment = witness(&[
            ("a", 0),
            ("b", 1),
            ("_y1_f", 0),
            ("_y2_f", 1),
            ("_t1_f", 1),
            ("_t2_f", 1),
        ]);
        let err = build_model(&ctx, &assignment, &conjunct).unwrap_err();
        match err {
            BuildError::Segment { function, place, .. } => {
                assert_eq!(function, "f");
                assert_eq!(place, "[a, b]");
            }
            other => panic!("expected a segment error, got {other}"),
        }
    }

    #[test]
    fn unconstrained_functions_become_flat_rays() {
        // Only a sampling link pins f(a) = 5; slopes stay unconstrained and
        // default to zero, so the model is the constant 5.
        let (mut conjunct, ctx) = ordered(Vec::new(), &["a"]);
        conjunct.insert(Literal::App { y: "x".into(), f: f(), x: "a".into() });
        let assignment = witness(&[("a", 0), ("x", 5), ("_y1_f", 5)]);
        let built = build_model(&ctx, &assignment, &conjunct).unwrap();
        let model = &built.model.functional["f"];
        for x in [-25.0, 0.0, 13.0] {
            assert_eq!(model.value(x), 5.0);
            assert_eq!(model.derivative(x), 0.0);
        }
    }

    #[test]
    fn derivative_bounds_reach_the_infinite_tail() {
        let (conjunct, ctx) = ordered(
            vec![Literal::fun(FunAtom::Der {
                f: f(),
                rel: DerRel::Ge,
                bound: "m".into(),
                lo: EndVar::NegInf,
                hi: v("b"),
            })],
            &["a", "b"],
        );
        let mut assignment = witness(&[
            ("a", 0),
            ("b", 2),
            ("m", 1),
            ("_y1_f", 0),
            ("_y2_f", 3),
            ("_t1_f", 1),
            ("_t2_f", 2),
            ("_g0_f", 1),
        ]);
        assignment.insert("_gr_f".into(), ratio(3, 2));
        let built = build_model(&ctx, &assignment, &conjunct).unwrap();
        let model = &built.model.functional["f"];
        let (dmin, _) = model.derivative_extrema(f64::NEG_INFINITY, 2.0);
        assert!(dmin >= 1.0 - 1e-9, "derivative dips to {dmin}");
    }

    #[test]
    fn vacuous_intervals_impose_nothing() {
        // A reversed comparison and a merged-point shape are both inert, so
        // even contradictory-looking data builds fine.
        let (conjunct, ctx) = ordered(
            vec![
                Literal::fun(FunAtom::Gt { f: f(), g: g(), lo: "b".into(), hi: "a".into() }),
                Literal::fun(FunAtom::Shape {
                    kind: ShapeKind::StrictUp,
                    f: f(),
                    lo: v("a"),
                    hi: v("a"),
                }),
            ],
            &["a", "b"],
        );
        let assignment = witness(&[
            ("a", 0),
            ("b", 1),
            ("_y1_f", 0),
            ("_y2_f", -5),
            ("_y1_g", 3),
            ("_y2_g", 3),
        ]);
        build_model(&ctx, &assignment, &conjunct).unwrap();
    }
}

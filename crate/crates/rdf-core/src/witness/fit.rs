//! Closed-form fitting of single model pieces from endpoint data.
//!
//! A bounded piece between consecutive breakpoints comes from
//! [`fit_segment`]; the two unbounded ends come from [`fit_tail`]. Both
//! receive the values and slopes the arithmetic witness pins down, plus the
//! shape requirements collected from the atoms covering the piece, and
//! return a piece realizing exactly that data. An error means the data
//! itself rules the shape out, which indicates an unvalidated witness (or a
//! bug upstream), never a fitting heuristic giving up on consistent data.
//!
//! The bounded construction is a continuous piecewise-linear derivative
//! profile with at most four knots: a boundary layer of width `w` at each
//! end carries the pinned endpoint slope to an interior plateau whose level
//! is solved in closed form so the profile integrates to the required rise.
//! The layer width starts at half the segment and shrinks geometrically
//! until every requirement holds; strict convexity and concavity tilt the
//! plateau so the slope keeps moving strictly.

use super::model::{Piece, TailSide};
use crate::formula::DerRel;

/// Relative tolerance of the fitter: endpoint matching, feasibility slack,
/// and the C¹ glue of assembled models all use this scale.
pub const FIT_RTOL: f64 = 1e-9;

/// Boundary-layer shrink attempts per [`fit_segment`] call.
const MAX_ATTEMPTS: u32 = 24;

/// Rate doublings per [`fit_tail`] call.
const MAX_RATE_DOUBLINGS: u32 = 20;

/// Samples used by the defensive tail shape check.
const TAIL_SAMPLES: usize = 64;

/// A pointwise or shape condition a fitted piece must satisfy on its whole
/// interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeRequirement {
    /// `f' ⋈ bound` at every point.
    Derivative { rel: DerRel, bound: f64 },
    /// `f` nondecreasing (`up`) or nonincreasing, strictly if `strict`.
    Monotone { up: bool, strict: bool },
    /// `f` convex (`convex`) or concave, strictly if `strict`.
    Bend { convex: bool, strict: bool },
}

/// The endpoint data admits no bounded piece with the required shapes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no bounded piece fits the endpoint data: {reason}")]
pub struct InfeasibleSegment {
    pub reason: String,
}

/// The boundary data admits no tail piece with the required shapes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no tail piece fits the boundary data: {reason}")]
pub struct InfeasibleTail {
    pub reason: String,
}

/// Fits a bounded piece on `[v_lo, v_hi]` matching the endpoint values
/// `y_lo, y_hi` and endpoint slopes `t_lo, t_hi`.
///
/// `shrink` pre-narrows the boundary layers by that many halvings before
/// the internal schedule starts; model assembly raises it when fitted
/// pieces must hug their chords more tightly (see the envelope pass of
/// [`build_model`](super::build_model)).
#[allow(clippy::too_many_arguments)]
pub fn fit_segment(
    v_lo: f64,
    v_hi: f64,
    y_lo: f64,
    y_hi: f64,
    t_lo: f64,
    t_hi: f64,
    requirements: &[ShapeRequirement],
    shrink: u32,
) -> Result<Piece, InfeasibleSegment> {
    if [v_lo, v_hi, y_lo, y_hi, t_lo, t_hi].iter().any(|v| !v.is_finite()) {
        return Err(InfeasibleSegment { reason: "non-finite endpoint data".into() });
    }
    if !(v_lo < v_hi) {
        return Err(InfeasibleSegment {
            reason: format!("domain [{v_lo}, {v_hi}] has no interior"),
        });
    }
    let h = v_hi - v_lo;
    let delta = (y_hi - y_lo) / h;
    check_segment_data(delta, t_lo, t_hi, requirements)
        .map_err(|reason| InfeasibleSegment { reason })?;

    // Exact linear fast path: a constant slope that already integrates to
    // the endpoint rise needs no interior knots.
    let y_slack = FIT_RTOL * (1.0 + y_lo.abs() + y_hi.abs());
    if t_lo == t_hi && (y_lo + t_lo * h - y_hi).abs() <= y_slack {
        let knots = vec![(v_lo, t_lo), (v_hi, t_hi)];
        if profile_ok(&knots, delta, requirements).is_ok() {
            return Ok(Piece::LinearQuadratic { knots, value: y_lo });
        }
    }

    let mut last = String::from("no layer width satisfied every requirement");
    for attempt in shrink..shrink.saturating_add(MAX_ATTEMPTS) {
        let w = h * 0.5f64.powi(attempt as i32 + 1);
        // Plateau level from the integral condition ∫ f' = y_hi − y_lo:
        // the two layers contribute w(t_lo + t_hi)/2 + wM, the plateau
        // (h − 2w)M.
        let m = (y_hi - y_lo - w * (t_lo + t_hi) / 2.0) / (h - w);
        if !m.is_finite() {
            continue;
        }
        let knots = if attempt == 0 {
            // Layers meet in the middle: single interior knot.
            let mid = v_lo + w;
            if !(v_lo < mid && mid < v_hi) {
                continue;
            }
            vec![(v_lo, t_lo), (mid, m), (v_hi, t_hi)]
        } else {
            let x1 = v_lo + w;
            let x2 = v_hi - w;
            if !(v_lo < x1 && x1 < x2 && x2 < v_hi) {
                continue;
            }
            let (m1, m2) = match plateau_tilt(m, t_lo, t_hi, requirements) {
                Ok(pair) => pair,
                Err(reason) => {
                    last = reason;
                    continue;
                }
            };
            vec![(v_lo, t_lo), (x1, m1), (x2, m2), (v_hi, t_hi)]
        };
        match profile_ok(&knots, delta, requirements) {
            Ok(()) => return Ok(Piece::LinearQuadratic { knots, value: y_lo }),
            Err(reason) => last = reason,
        }
    }
    Err(InfeasibleSegment { reason: last })
}

/// Fits an unbounded piece anchored at `(v_bound, y_bound)` with boundary
/// slope `t_bound` and asymptotic slope `gamma` at the infinite end.
///
/// The derivative is `γ + (t − γ)e^{±λ(x − v)}`; when `t = γ` the piece is
/// a linear ray. The rate `λ` starts at 1 and doubles until the sampled
/// shape checks pass (they hold immediately for consistent data; the loop
/// guards the feasibility analysis against its own blind spots).
pub fn fit_tail(
    side: TailSide,
    v_bound: f64,
    y_bound: f64,
    t_bound: f64,
    gamma: f64,
    requirements: &[ShapeRequirement],
) -> Result<Piece, InfeasibleTail> {
    if [v_bound, y_bound, t_bound, gamma].iter().any(|v| !v.is_finite()) {
        return Err(InfeasibleTail { reason: "non-finite boundary data".into() });
    }
    check_tail_data(side, t_bound, gamma, requirements)
        .map_err(|reason| InfeasibleTail { reason })?;
    let mut rate = 1.0;
    for _ in 0..MAX_RATE_DOUBLINGS {
        let piece = Piece::ExponentialTail {
            side,
            boundary: v_bound,
            value: y_bound,
            slope: t_bound,
            gamma,
            rate,
        };
        if tail_samples_ok(&piece, side, v_bound, t_bound, gamma, requirements) {
            return Ok(piece);
        }
        rate *= 2.0;
    }
    Err(InfeasibleTail { reason: "sampled shape checks failed at every rate".into() })
}

/// Requirement slack at the magnitude of the involved quantities.
fn slack(values: &[f64]) -> f64 {
    FIT_RTOL * (1.0 + values.iter().fold(0.0f64, |a, v| a.max(v.abs())))
}

/// Rejects endpoint data no derivative profile can reconcile with the
/// requirements, with collapse cases spelled out: when the mean slope sits
/// exactly on a one-sided bound, the endpoint slopes must sit there too
/// (otherwise the profile would have to cross the bound to keep the mean).
fn check_segment_data(
    delta: f64,
    t_lo: f64,
    t_hi: f64,
    requirements: &[ShapeRequirement],
) -> Result<(), String> {
    for req in requirements {
        match *req {
            ShapeRequirement::Derivative { rel, bound: c } => {
                let eps = slack(&[delta, t_lo, t_hi, c]);
                let named = [("start slope", t_lo), ("end slope", t_hi), ("mean slope", delta)];
                match rel {
                    DerRel::Eq => {
                        for (what, v) in named {
                            if (v - c).abs() > eps {
                                return Err(format!("{what} {v} differs from pinned slope {c}"));
                            }
                        }
                    }
                    DerRel::Ge | DerRel::Gt => {
                        let strict = rel == DerRel::Gt;
                        for (what, v) in named {
                            let bad = if strict { v <= c } else { v < c - eps };
                            if bad {
                                return Err(format!("{what} {v} below derivative bound {c}"));
                            }
                        }
                        if !strict && delta <= c + eps && (t_lo > c + eps || t_hi > c + eps) {
                            return Err(format!(
                                "mean slope sits on the bound {c} but an endpoint slope exceeds it"
                            ));
                        }
                    }
                    DerRel::Le | DerRel::Lt => {
                        let strict = rel == DerRel::Lt;
                        for (what, v) in named {
                            let bad = if strict { v >= c } else { v > c + eps };
                            if bad {
                                return Err(format!("{what} {v} above derivative bound {c}"));
                            }
                        }
                        if !strict && delta >= c - eps && (t_lo < c - eps || t_hi < c - eps) {
                            return Err(format!(
                                "mean slope sits on the bound {c} but an endpoint slope undercuts it"
                            ));
                        }
                    }
                }
            }
            ShapeRequirement::Monotone { up, strict } => {
                let eps = slack(&[delta, t_lo, t_hi]);
                let (sign, word) = if up { (1.0, "increase") } else { (-1.0, "decrease") };
                for (what, v) in [("start slope", t_lo), ("end slope", t_hi), ("mean slope", delta)]
                {
                    if sign * v < -eps {
                        return Err(format!("{what} {v} opposes required {word}"));
                    }
                }
                if strict && !(sign * delta > 0.0) {
                    return Err(format!("endpoint values do not strictly {word}"));
                }
                if !strict
                    && sign * delta <= eps
                    && (sign * t_lo > eps || sign * t_hi > eps)
                {
                    return Err(format!(
                        "flat endpoint rise forces a flat profile, but an endpoint slope {word}s"
                    ));
                }
            }
            ShapeRequirement::Bend { convex, strict } => {
                let eps = slack(&[delta, t_lo, t_hi]);
                // Convexity orders the slopes t_lo ≤ Δ ≤ t_hi (concavity
                // reverses); strict versions need strict gaps.
                let (first, second) = if convex { (t_lo, t_hi) } else { (-t_lo, -t_hi) };
                let d = if convex { delta } else { -delta };
                let word = if convex { "convexity" } else { "concavity" };
                if strict {
                    if !(first < d && d < second) {
                        return Err(format!(
                            "strict {word} needs the mean slope strictly between the endpoint slopes"
                        ));
                    }
                } else {
                    if first > d + eps || second < d - eps {
                        return Err(format!(
                            "{word} needs the mean slope between the endpoint slopes"
                        ));
                    }
                    let lo_pinned = (first - d).abs() <= eps;
                    let hi_pinned = (second - d).abs() <= eps;
                    if (lo_pinned || hi_pinned) && (second - first).abs() > eps && !(lo_pinned && hi_pinned)
                    {
                        return Err(format!(
                            "mean slope equals one endpoint slope, which under {word} forces a \
                             straight segment, but the other endpoint slope differs"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Tilts the plateau for strict bending so the derivative keeps moving
/// strictly across the interior; flat otherwise.
fn plateau_tilt(
    m: f64,
    t_lo: f64,
    t_hi: f64,
    requirements: &[ShapeRequirement],
) -> Result<(f64, f64), String> {
    let strict_convex = requirements
        .iter()
        .any(|r| matches!(r, ShapeRequirement::Bend { convex: true, strict: true }));
    let strict_concave = requirements
        .iter()
        .any(|r| matches!(r, ShapeRequirement::Bend { convex: false, strict: true }));
    if strict_convex {
        if !(t_lo < m && m < t_hi) {
            return Err(format!("plateau level {m} escapes the strict slope corridor"));
        }
        let d = (m - t_lo).min(t_hi - m) / 2.0;
        Ok((m - d, m + d))
    } else if strict_concave {
        if !(t_hi < m && m < t_lo) {
            return Err(format!("plateau level {m} escapes the strict slope corridor"));
        }
        let d = (t_lo - m).min(m - t_hi) / 2.0;
        Ok((m + d, m - d))
    } else {
        Ok((m, m))
    }
}

/// Checks every requirement against a candidate knot profile. The profile
/// is piecewise linear, so pointwise bounds reduce to knot bounds and
/// convexity to monotone knot slopes.
fn profile_ok(
    knots: &[(f64, f64)],
    delta: f64,
    requirements: &[ShapeRequirement],
) -> Result<(), String> {
    let slopes: Vec<f64> = knots.iter().map(|k| k.1).collect();
    let smin = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for req in requirements {
        match *req {
            ShapeRequirement::Derivative { rel, bound: c } => {
                let eps = slack(&[delta, smin, smax, c]);
                let ok = match rel {
                    DerRel::Eq => slopes.iter().all(|s| (s - c).abs() <= eps),
                    DerRel::Ge => smin >= c - eps,
                    DerRel::Gt => smin > c,
                    DerRel::Le => smax <= c + eps,
                    DerRel::Lt => smax < c,
                };
                if !ok {
                    return Err(format!(
                        "profile slopes [{smin}, {smax}] break the {} {c} bound",
                        rel.symbol()
                    ));
                }
            }
            ShapeRequirement::Monotone { up, strict } => {
                let eps = slack(&[smin, smax]);
                let ok = if up { smin >= -eps } else { smax <= eps };
                if !ok {
                    return Err(format!("profile slopes [{smin}, {smax}] change sign"));
                }
                if strict && slopes.windows(2).any(|p| p[0] == 0.0 && p[1] == 0.0) {
                    return Err("flat zero stretch breaks strict monotonicity".into());
                }
            }
            ShapeRequirement::Bend { convex, strict } => {
                let eps = slack(&[smin, smax]);
                for pair in slopes.windows(2) {
                    let step = if convex { pair[1] - pair[0] } else { pair[0] - pair[1] };
                    let ok = if strict { step > 0.0 } else { step >= -eps };
                    if !ok {
                        return Err(format!(
                            "slope step {} to {} bends the wrong way",
                            pair[0], pair[1]
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Rejects boundary data no exponential tail can reconcile with the
/// requirements. On a tail the derivative moves monotonically between the
/// boundary slope `t` (attained) and the asymptote `γ` (a limit), so every
/// check is a condition on that pair, oriented by the side.
fn check_tail_data(
    side: TailSide,
    t: f64,
    gamma: f64,
    requirements: &[ShapeRequirement],
) -> Result<(), String> {
    let lo = t.min(gamma);
    let hi = t.max(gamma);
    for req in requirements {
        match *req {
            ShapeRequirement::Derivative { rel, bound: c } => {
                let eps = slack(&[t, gamma, c]);
                let ok = match rel {
                    DerRel::Eq => (t - c).abs() <= eps && (gamma - c).abs() <= eps,
                    DerRel::Ge => lo >= c - eps,
                    // The asymptote is approached, never attained, so it
                    // may sit exactly on a strict bound.
                    DerRel::Gt => t > c && gamma >= c,
                    DerRel::Le => hi <= c + eps,
                    DerRel::Lt => t < c && gamma <= c,
                };
                if !ok {
                    return Err(format!(
                        "tail slopes ({gamma} asymptotic, {t} boundary) break the {} {c} bound",
                        rel.symbol()
                    ));
                }
            }
            ShapeRequirement::Monotone { up, strict } => {
                let eps = slack(&[t, gamma]);
                let ok = if up { lo >= -eps } else { hi <= eps };
                if !ok {
                    return Err(format!(
                        "tail slopes ({gamma} asymptotic, {t} boundary) change sign"
                    ));
                }
                if strict && t == gamma && t == 0.0 {
                    return Err("constant zero slope breaks strict monotonicity".into());
                }
            }
            ShapeRequirement::Bend { convex, strict } => {
                // A convex function has nondecreasing slope, so toward -inf
                // the slope must fall to the asymptote and toward +inf rise
                // to it; concavity reverses, strictness forbids equality.
                let (ahead, behind) = match side {
                    TailSide::Left => (t, gamma),
                    TailSide::Right => (gamma, t),
                };
                let (first, second) = if convex { (behind, ahead) } else { (ahead, behind) };
                let eps = slack(&[t, gamma]);
                let ok = if strict { second > first } else { second >= first - eps };
                if !ok {
                    let word = if convex { "convexity" } else { "concavity" };
                    return Err(format!(
                        "asymptotic slope {gamma} against boundary slope {t} breaks {word}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Defensive sampled verification of a tail piece: probes the derivative on
/// a finite window toward the infinite end and re-checks each requirement
/// numerically. Exact in theory for the exponential family; kept as a
/// cross-check on the feasibility analysis.
fn tail_samples_ok(
    piece: &Piece,
    side: TailSide,
    v_bound: f64,
    t: f64,
    gamma: f64,
    requirements: &[ShapeRequirement],
) -> bool {
    let span = 1.0 + (t - gamma).abs();
    let (from, to) = match side {
        TailSide::Left => (v_bound - 4.0 * span, v_bound),
        TailSide::Right => (v_bound, v_bound + 4.0 * span),
    };
    let xs: Vec<f64> = (0..=TAIL_SAMPLES)
        .map(|i| from + (to - from) * i as f64 / TAIL_SAMPLES as f64)
        .collect();
    let ds: Vec<f64> = xs.iter().map(|&x| piece.derivative_at(x)).collect();
    let eps = slack(&[t, gamma]) * 16.0;
    requirements.iter().all(|req| match *req {
        ShapeRequirement::Derivative { rel, bound: c } => ds.iter().all(|&d| match rel {
            DerRel::Eq => (d - c).abs() <= eps,
            DerRel::Ge | DerRel::Gt => d >= c - eps,
            DerRel::Le | DerRel::Lt => d <= c + eps,
        }),
        ShapeRequirement::Monotone { up, .. } => {
            ds.iter().all(|&d| if up { d >= -eps } else { d <= eps })
        }
        ShapeRequirement::Bend { convex, .. } => ds.windows(2).all(|p| {
            let step = if convex { p[1] - p[0] } else { p[0] - p[1] };
            step >= -eps
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knots(piece: &Piece) -> &[(f64, f64)] {
        match piece {
            Piece::LinearQuadratic { knots, .. } => knots,
            Piece::ExponentialTail { .. } => panic!("expected a bounded piece"),
        }
    }

    /// Dense finite-difference probe of a piece over `[lo, hi]`: checks the
    /// stored derivative against symmetric differences of the value. The
    /// step is small enough that straddling a curvature knot stays within
    /// the tolerance.
    fn assert_consistent_calculus(piece: &Piece, lo: f64, hi: f64) {
        let n = 10_000;
        let eps = 1e-8;
        for i in 1..n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let fd = (piece.value_at(x + eps) - piece.value_at(x - eps)) / (2.0 * eps);
            assert!(
                (fd - piece.derivative_at(x)).abs() < 1e-6,
                "derivative mismatch at {x}: {fd} vs {}",
                piece.derivative_at(x)
            );
        }
    }

    #[test]
    fn matching_linear_data_fits_a_single_linear_piece() {
        let piece = fit_segment(0.0, 1.0, 0.0, 1.0, 1.0, 1.0, &[], 0).unwrap();
        assert_eq!(knots(&piece), &[(0.0, 1.0), (1.0, 1.0)]);
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            assert!((piece.value_at(x) - x).abs() < 1e-12);
            assert_eq!(piece.derivative_at(x), 1.0);
        }
    }

    #[test]
    fn asymmetric_slopes_fit_a_three_knot_profile() {
        let piece = fit_segment(0.0, 1.0, 0.0, 1.0, 0.0, 2.0, &[], 0).unwrap();
        assert_eq!(knots(&piece).len(), 3);
        assert!((piece.value_at(0.0)).abs() < 1e-12);
        assert!((piece.value_at(1.0) - 1.0).abs() < 1e-12);
        assert_eq!(piece.derivative_at(0.0), 0.0);
        assert_eq!(piece.derivative_at(1.0), 2.0);
        // The derivative must be nondecreasing across the whole piece.
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=10_000 {
            let d = piece.derivative_at(i as f64 / 10_000.0);
            assert!(d >= prev - 1e-12, "derivative dips at sample {i}");
            prev = d;
        }
        assert_consistent_calculus(&piece, 0.0, 1.0);
    }

    #[test]
    fn convexity_with_descending_end_slopes_is_infeasible() {
        let err = fit_segment(
            0.0,
            1.0,
            0.0,
            1.0,
            2.0,
            0.0,
            &[ShapeRequirement::Bend { convex: true, strict: false }],
            0,
        )
        .unwrap_err();
        assert!(err.reason.contains("convexity"), "{}", err.reason);
    }

    #[test]
    fn derivative_lower_bound_holds_across_the_profile() {
        let req = [ShapeRequirement::Derivative { rel: DerRel::Ge, bound: 1.0 }];
        let piece = fit_segment(0.0, 2.0, 0.0, 3.0, 1.0, 2.0, &req, 0).unwrap();
        assert!((piece.value_at(2.0) - 3.0).abs() < 1e-12);
        for i in 0..=1000 {
            let x = 2.0 * i as f64 / 1000.0;
            assert!(piece.derivative_at(x) >= 1.0 - 1e-12, "bound broken at {x}");
        }
    }

    #[test]
    fn strict_increase_with_flat_endpoint_slopes() {
        let req = [ShapeRequirement::Monotone { up: true, strict: true }];
        let piece = fit_segment(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, &req, 0).unwrap();
        assert_eq!(piece.derivative_at(0.0), 0.0);
        assert_eq!(piece.derivative_at(1.0), 0.0);
        let mut prev = piece.value_at(0.0);
        for i in 1..=1000 {
            let v = piece.value_at(i as f64 / 1000.0);
            assert!(v > prev, "not strictly increasing at sample {i}");
            prev = v;
        }
    }

    #[test]
    fn pinned_slope_needs_matching_rise() {
        let req = [ShapeRequirement::Derivative { rel: DerRel::Eq, bound: 2.0 }];
        let piece = fit_segment(0.0, 1.0, 3.0, 5.0, 2.0, 2.0, &req, 0).unwrap();
        assert_eq!(knots(&piece), &[(0.0, 2.0), (1.0, 2.0)]);
        assert!((piece.value_at(1.0) - 5.0).abs() < 1e-12);
        let err = fit_segment(0.0, 1.0, 3.0, 6.0, 2.0, 2.0, &req, 0).unwrap_err();
        assert!(err.reason.contains("mean slope"), "{}", err.reason);
    }

    #[test]
    fn convexity_pinned_at_one_end_requires_a_straight_segment() {
        // Mean slope equals the start slope: convexity then forces f' ≡ Δ,
        // which contradicts the larger end slope.
        let err = fit_segment(
            0.0,
            1.0,
            0.0,
            1.0,
            1.0,
            2.0,
            &[ShapeRequirement::Bend { convex: true, strict: false }],
            0,
        )
        .unwrap_err();
        assert!(err.reason.contains("straight"), "{}", err.reason);
    }

    #[test]
    fn strict_convexity_tilts_the_plateau() {
        let req = [ShapeRequirement::Bend { convex: true, strict: true }];
        // Mean slope 1 strictly between 0 and 10, but the first attempt's
        // plateau level 2·1 − 5 = −3 escapes the corridor, so layers must
        // shrink and the tilted plateau must keep the slope rising.
        let piece = fit_segment(0.0, 1.0, 0.0, 1.0, 0.0, 10.0, &req, 0).unwrap();
        let ks = knots(&piece);
        assert!(ks.len() >= 3);
        for pair in ks.windows(2) {
            assert!(pair[1].1 > pair[0].1, "slope not strictly rising: {ks:?}");
        }
        assert!((piece.value_at(1.0) - 1.0).abs() < 1e-9);
        assert_consistent_calculus(&piece, 0.0, 1.0);
    }

    #[test]
    fn shrink_parameter_tightens_the_chord_envelope() {
        let deviation = |shrink: u32| {
            let piece = fit_segment(0.0, 1.0, 0.0, 1.0, 0.0, 2.0, &[], shrink).unwrap();
            let mut dev = 0.0f64;
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                dev = dev.max((piece.value_at(x) - x).abs());
            }
            dev
        };
        let wide = deviation(0);
        let tight = deviation(4);
        assert!(tight < wide / 4.0, "wide {wide}, tight {tight}");
    }

    #[test]
    fn flat_ray_tail_is_horizontal() {
        let piece =
            fit_tail(TailSide::Left, 0.0, 1.0, 0.0, 0.0, &[]).unwrap();
        for x in [-100.0, -3.0, 0.0] {
            assert_eq!(piece.value_at(x), 1.0);
            assert_eq!(piece.derivative_at(x), 0.0);
        }
    }

    #[test]
    fn strictly_convex_left_tail_is_exponential() {
        let req = [ShapeRequirement::Bend { convex: true, strict: true }];
        let piece = fit_tail(TailSide::Left, 0.0, 1.0, 1.0, 0.0, &req).unwrap();
        // f'(x) = e^x at rate 1; second differences of the value must be
        // strictly positive.
        assert!((piece.derivative_at(-1.0) - (-1.0f64).exp()).abs() < 1e-12);
        let mut prev_d = 0.0;
        for i in 0..=2000 {
            let x = -20.0 + 20.0 * i as f64 / 2000.0;
            let d = piece.derivative_at(x);
            assert!(d > prev_d, "derivative not strictly rising at {x}");
            prev_d = d;
        }
        let f = |x: f64| piece.value_at(x);
        for x in [-5.0, -2.0, -0.5] {
            let second = f(x + 0.01) - 2.0 * f(x) + f(x - 0.01);
            assert!(second > 0.0, "second difference at {x}");
        }
    }

    #[test]
    fn convex_right_tail_needs_dominating_asymptote() {
        let req = [ShapeRequirement::Bend { convex: true, strict: false }];
        let err = fit_tail(TailSide::Right, 0.0, 0.0, 1.0, 0.0, &req).unwrap_err();
        assert!(err.reason.contains("convexity"), "{}", err.reason);
        // The mirrored data is fine: slope rising toward the asymptote.
        fit_tail(TailSide::Right, 0.0, 0.0, 0.0, 1.0, &req).unwrap();
    }

    #[test]
    fn derivative_window_bounds_a_tail() {
        let req = [
            ShapeRequirement::Derivative { rel: DerRel::Ge, bound: 1.0 },
            ShapeRequirement::Derivative { rel: DerRel::Le, bound: 2.0 },
        ];
        let piece = fit_tail(TailSide::Left, 0.0, 0.0, 1.0, 2.0, &req).unwrap();
        for i in 0..=1000 {
            let x = -10.0 + 10.0 * i as f64 / 1000.0;
            let d = piece.derivative_at(x);
            assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&d), "slope {d} at {x}");
        }
    }

    #[test]
    fn constant_zero_tail_cannot_be_strictly_monotone() {
        let req = [ShapeRequirement::Monotone { up: true, strict: true }];
        let err = fit_tail(TailSide::Left, 0.0, 0.0, 0.0, 0.0, &req).unwrap_err();
        assert!(err.reason.contains("strict"), "{}", err.reason);
        // A positive asymptote with a zero boundary slope is strictly
        // increasing: the slope vanishes only at the boundary point.
        fit_tail(TailSide::Left, 0.0, 0.0, 0.0, 2.0, &req).unwrap();
    }
}

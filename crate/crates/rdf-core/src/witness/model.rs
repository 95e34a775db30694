//! The piecewise C¹ function family used for witness models.

/// Which unbounded end an exponential tail covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    /// `(-inf, boundary]`
    Left,
    /// `[boundary, +inf)`
    Right,
}

/// One piece of a model.
///
/// Pieces are self-contained: each knows the function value at its anchor
/// point, so evaluation never walks neighbouring pieces.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    /// A bounded piece on `[knots[0].0, knots[last].0]`. The derivative is
    /// the continuous piecewise-linear interpolation of the `(x, slope)`
    /// knots, so the function is piecewise quadratic. `value` is `f` at the
    /// first knot.
    LinearQuadratic { knots: Vec<(f64, f64)>, value: f64 },
    /// An unbounded piece with derivative `γ + (t − γ)·e^{±λ(x − boundary)}`
    /// (sign chosen so the exponent decays toward the infinite end), which
    /// tends to the asymptotic slope `γ`. `value` and `slope` are `f` and
    /// `f'` at the boundary; `rate` is `λ > 0`. When `slope = γ` the piece
    /// degenerates to a linear ray.
    ExponentialTail { side: TailSide, boundary: f64, value: f64, slope: f64, gamma: f64, rate: f64 },
}

impl Piece {
    /// Interval covered by this piece, with infinities on tail ends.
    pub fn interval(&self) -> (f64, f64) {
        match self {
            Piece::LinearQuadratic { knots, .. } => (knots[0].0, knots[knots.len() - 1].0),
            Piece::ExponentialTail { side: TailSide::Left, boundary, .. } => {
                (f64::NEG_INFINITY, *boundary)
            }
            Piece::ExponentialTail { side: TailSide::Right, boundary, .. } => {
                (*boundary, f64::INFINITY)
            }
        }
    }

    /// Function value at `x` (clamped into the piece's interval).
    pub fn value_at(&self, x: f64) -> f64 {
        match self {
            Piece::LinearQuadratic { knots, value } => {
                let last = knots.len() - 1;
                let x = x.clamp(knots[0].0, knots[last].0);
                let mut v = *value;
                for i in 0..last {
                    let (x0, t0) = knots[i];
                    let (x1, t1) = knots[i + 1];
                    if x >= x1 {
                        // Full knot gap: trapezoid is exact for a linear slope.
                        v += 0.5 * (t0 + t1) * (x1 - x0);
                    } else {
                        let h = x1 - x0;
                        let rate = if h > 0.0 { (t1 - t0) / h } else { 0.0 };
                        let dx = x - x0;
                        return v + t0 * dx + 0.5 * rate * dx * dx;
                    }
                }
                v
            }
            Piece::ExponentialTail { side, boundary, value, slope, gamma, rate } => {
                let d = x - boundary;
                // ∫ γ + (t−γ)e^{±λ(u−v)} du from the boundary v to x.
                let exp_integral = match side {
                    TailSide::Left => ((rate * d).exp() - 1.0) / rate,
                    TailSide::Right => (1.0 - (-rate * d).exp()) / rate,
                };
                value + gamma * d + (slope - gamma) * exp_integral
            }
        }
    }

    /// Derivative at `x` (clamped into the piece's interval).
    pub fn derivative_at(&self, x: f64) -> f64 {
        match self {
            Piece::LinearQuadratic { knots, .. } => {
                let last = knots.len() - 1;
                let x = x.clamp(knots[0].0, knots[last].0);
                for i in 0..last {
                    let (x0, t0) = knots[i];
                    let (x1, t1) = knots[i + 1];
                    if x <= x1 {
                        let h = x1 - x0;
                        if h <= 0.0 {
                            return t1;
                        }
                        return t0 + (t1 - t0) * (x - x0) / h;
                    }
                }
                knots[last].1
            }
            Piece::ExponentialTail { side, boundary, slope, gamma, rate, .. } => {
                let d = x - boundary;
                let e = match side {
                    TailSide::Left => (rate * d).exp(),
                    TailSide::Right => (-rate * d).exp(),
                };
                gamma + (slope - gamma) * e
            }
        }
    }

    /// Knot abscissas interior to the piece (where the derivative profile
    /// may change slope), excluding the piece's own interval ends.
    fn interior_knot_xs(&self) -> Vec<f64> {
        match self {
            Piece::LinearQuadratic { knots, .. } => {
                knots[1..knots.len() - 1].iter().map(|k| k.0).collect()
            }
            Piece::ExponentialTail { .. } => Vec::new(),
        }
    }

    /// `(x, f(x), f'(x))` at the given end of the piece.
    fn boundary_state(&self, right_end: bool) -> (f64, f64, f64) {
        let (lo, hi) = self.interval();
        let x = if right_end { hi } else { lo };
        (x, self.value_at(x), self.derivative_at(x))
    }
}

/// How the derivative behaves over a queried interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivMonotonicity {
    /// `f'` nondecreasing on the whole interval.
    pub nondecreasing: bool,
    /// `f'` nonincreasing on the whole interval.
    pub nonincreasing: bool,
    /// `f'` constant on some subinterval of positive length.
    pub has_flat_stretch: bool,
}

/// Structural defect found when assembling a model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    Empty,
    /// Pieces out of order or not covering the line; the string names the
    /// defect.
    BadCoverage(String),
    /// Adjacent pieces disagree in value or derivative at a shared
    /// breakpoint beyond the glue tolerance.
    DiscontinuousGlue { at: f64, value_gap: f64, derivative_gap: f64 },
    /// A knot list is too short, not sorted, or a rate is not positive.
    BadPiece(String),
}

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelError::Empty => write!(f, "model has no pieces"),
            ModelError::BadCoverage(s) => write!(f, "pieces do not cover the line: {s}"),
            ModelError::DiscontinuousGlue { at, value_gap, derivative_gap } => write!(
                f,
                "pieces do not glue C¹ at {at}: value gap {value_gap:e}, \
                 derivative gap {derivative_gap:e}"
            ),
            ModelError::BadPiece(s) => write!(f, "malformed piece: {s}"),
        }
    }
}

impl std::error::Error for ModelError {}

/// Relative glue tolerance for C¹ continuity across breakpoints.
pub const GLUE_RTOL: f64 = 1e-9;

/// A C¹ function on all of ℝ, stored as ordered pieces: a left exponential
/// tail, zero or more bounded linear-quadratic pieces, and a right
/// exponential tail. Adjacent pieces agree in value and derivative at the
/// shared breakpoint within [`GLUE_RTOL`] (checked at construction).
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseModel {
    pieces: Vec<Piece>,
}

impl PiecewiseModel {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, ModelError> {
        if pieces.is_empty() {
            return Err(ModelError::Empty);
        }
        if !matches!(pieces[0], Piece::ExponentialTail { side: TailSide::Left, .. }) {
            return Err(ModelError::BadCoverage("first piece must be a left tail".into()));
        }
        if !matches!(pieces[pieces.len() - 1], Piece::ExponentialTail { side: TailSide::Right, .. })
        {
            return Err(ModelError::BadCoverage("last piece must be a right tail".into()));
        }
        for piece in &pieces {
            match piece {
                Piece::LinearQuadratic { knots, .. } => {
                    if knots.len() < 2 {
                        return Err(ModelError::BadPiece("bounded piece needs ≥ 2 knots".into()));
                    }
                    if knots.windows(2).any(|p| !(p[0].0 < p[1].0)) {
                        return Err(ModelError::BadPiece("knots not strictly increasing".into()));
                    }
                    if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
                        return Err(ModelError::BadPiece("non-finite knot".into()));
                    }
                }
                Piece::ExponentialTail { boundary, value, slope, gamma, rate, .. } => {
                    if !(*rate > 0.0) {
                        return Err(ModelError::BadPiece("tail rate must be positive".into()));
                    }
                    if ![*boundary, *value, *slope, *gamma].iter().all(|v| v.is_finite()) {
                        return Err(ModelError::BadPiece("non-finite tail parameter".into()));
                    }
                }
            }
        }
        for i in 1..pieces.len() {
            if matches!(pieces[i], Piece::ExponentialTail { side: TailSide::Left, .. })
                || matches!(pieces[i - 1], Piece::ExponentialTail { side: TailSide::Right, .. })
            {
                return Err(ModelError::BadCoverage("tail in the interior".into()));
            }
            let (x_prev, v_prev, d_prev) = pieces[i - 1].boundary_state(true);
            let (x_next, v_next, d_next) = pieces[i].boundary_state(false);
            if x_prev != x_next {
                return Err(ModelError::BadCoverage(format!(
                    "gap between pieces: {x_prev} vs {x_next}"
                )));
            }
            let vgap = (v_prev - v_next).abs();
            let dgap = (d_prev - d_next).abs();
            if vgap > GLUE_RTOL * (1.0 + v_prev.abs()) || dgap > GLUE_RTOL * (1.0 + d_prev.abs()) {
                return Err(ModelError::DiscontinuousGlue {
                    at: x_prev,
                    value_gap: vgap,
                    derivative_gap: dgap,
                });
            }
        }
        Ok(PiecewiseModel { pieces })
    }

    /// The constant function `x ↦ c`.
    pub fn constant(c: f64) -> Self {
        PiecewiseModel::new(vec![
            Piece::ExponentialTail {
                side: TailSide::Left,
                boundary: 0.0,
                value: c,
                slope: 0.0,
                gamma: 0.0,
                rate: 1.0,
            },
            Piece::ExponentialTail {
                side: TailSide::Right,
                boundary: 0.0,
                value: c,
                slope: 0.0,
                gamma: 0.0,
                rate: 1.0,
            },
        ])
        .expect("constant model is well formed")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Model-level breakpoints (piece boundaries), strictly increasing.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for piece in &self.pieces {
            let (lo, hi) = piece.interval();
            for x in [lo, hi] {
                if x.is_finite() && out.last() != Some(&x) {
                    out.push(x);
                }
            }
        }
        out
    }

    fn piece_for(&self, x: f64) -> &Piece {
        for piece in &self.pieces {
            let (_, hi) = piece.interval();
            if x <= hi {
                return piece;
            }
        }
        self.pieces.last().unwrap()
    }

    /// `f(x)`.
    pub fn value(&self, x: f64) -> f64 {
        self.piece_for(x).value_at(x)
    }

    /// `f'(x)`; at `±inf` returns the tail's asymptotic slope.
    pub fn derivative(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            if let Piece::ExponentialTail { gamma, .. } = &self.pieces[0] {
                return *gamma;
            }
        }
        if x == f64::INFINITY {
            if let Piece::ExponentialTail { gamma, .. } = &self.pieces[self.pieces.len() - 1] {
                return *gamma;
            }
        }
        self.piece_for(x).derivative_at(x)
    }

    /// All abscissas in `[lo, hi]` where the derivative profile can change
    /// slope: piece boundaries and interior knots, sorted. Infinite bounds
    /// contribute no points of their own.
    pub fn knot_xs_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut xs = Vec::new();
        for piece in &self.pieces {
            let (plo, phi) = piece.interval();
            if plo.is_finite() && plo >= lo && plo <= hi {
                xs.push(plo);
            }
            for k in piece.interior_knot_xs() {
                if k >= lo && k <= hi {
                    xs.push(k);
                }
            }
            if phi.is_finite() && phi >= lo && phi <= hi {
                xs.push(phi);
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Infimum and supremum of `f'` over `[lo, hi]` (ends may be infinite).
    ///
    /// The derivative is piecewise monotone — linear between knots,
    /// exponential toward `γ` on tails — so the extrema are attained at the
    /// interval ends, at knots, or (for unbounded ends) approached at the
    /// asymptotic slope, all of which are inspected directly.
    pub fn derivative_extrema(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut feed = |d: f64| {
            min = min.min(d);
            max = max.max(d);
        };
        feed(self.derivative(lo));
        feed(self.derivative(hi));
        for x in self.knot_xs_in(lo, hi) {
            feed(self.derivative(x));
        }
        (min, max)
    }

    /// Monotonicity classification of `f'` over `[lo, hi]`.
    pub fn derivative_monotonicity(&self, lo: f64, hi: f64) -> DerivMonotonicity {
        let mut nondecreasing = true;
        let mut nonincreasing = true;
        let mut flat = false;
        for piece in &self.pieces {
            let (plo, phi) = piece.interval();
            let a = plo.max(lo);
            let b = phi.min(hi);
            if !(a < b) {
                continue; // no positive-length overlap
            }
            match piece {
                Piece::LinearQuadratic { knots, .. } => {
                    for pair in knots.windows(2) {
                        let (x0, t0) = pair[0];
                        let (x1, t1) = pair[1];
                        if x1.min(b) <= x0.max(a) {
                            continue; // knot gap misses [a, b]
                        }
                        if t1 > t0 {
                            nonincreasing = false;
                        } else if t1 < t0 {
                            nondecreasing = false;
                        } else {
                            flat = true;
                        }
                    }
                }
                Piece::ExponentialTail { side, slope, gamma, .. } => {
                    // d/dx f' carries the constant sign of (t−γ) on a left
                    // tail and of (γ−t) on a right tail.
                    let (rising, falling) = match side {
                        TailSide::Left => (slope > gamma, slope < gamma),
                        TailSide::Right => (gamma > slope, gamma < slope),
                    };
                    if rising {
                        nonincreasing = false;
                    } else if falling {
                        nondecreasing = false;
                    } else {
                        flat = true;
                    }
                }
            }
        }
        DerivMonotonicity { nondecreasing, nonincreasing, has_flat_stretch: flat }
    }

    /// Whether `f'` is identically zero on some positive-length subinterval
    /// of `[lo, hi]` — the exact obstruction to strict monotonicity when
    /// the derivative is otherwise single-signed.
    pub fn zero_derivative_stretch(&self, lo: f64, hi: f64) -> bool {
        for piece in &self.pieces {
            let (plo, phi) = piece.interval();
            let a = plo.max(lo);
            let b = phi.min(hi);
            if !(a < b) {
                continue;
            }
            match piece {
                Piece::LinearQuadratic { knots, .. } => {
                    for pair in knots.windows(2) {
                        let (x0, t0) = pair[0];
                        let (x1, t1) = pair[1];
                        if x1.min(b) > x0.max(a) && t0 == 0.0 && t1 == 0.0 {
                            return true;
                        }
                    }
                }
                Piece::ExponentialTail { slope, gamma, .. } => {
                    if *slope == 0.0 && *gamma == 0.0 {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Whether `self` and `other` are structurally identical on `[lo, hi]`:
    /// the pieces overlapping the interval match exactly (same kinds, same
    /// numbers). This is the analytic fast path for pointwise equality;
    /// callers fall back to sampling when it returns false.
    pub fn identical_on(&self, other: &PiecewiseModel, lo: f64, hi: f64) -> bool {
        if lo == hi {
            return self.value(lo) == other.value(lo);
        }
        let overlapping = |m: &PiecewiseModel| -> Vec<Piece> {
            m.pieces
                .iter()
                .filter(|p| {
                    let (plo, phi) = p.interval();
                    plo.max(lo) < phi.min(hi) // positive-measure overlap
                })
                .cloned()
                .collect()
        };
        overlapping(self) == overlapping(other)
    }

    /// A finite sampling window for `[lo, hi]`: infinite ends are clipped
    /// to the bounded region of the involved models plus one span of
    /// margin, so tails are probed without evaluating at infinity.
    pub fn clip_window(&self, other: Option<&PiecewiseModel>, lo: f64, hi: f64) -> (f64, f64) {
        let mut bps = self.breakpoints();
        if let Some(o) = other {
            bps.extend(o.breakpoints());
        }
        let (bmin, bmax) = bps
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let span = if bmax > bmin { bmax - bmin } else { 0.0 };
        let margin = span.max(1.0);
        let wlo = if lo.is_finite() { lo } else { bmin - margin };
        let whi = if hi.is_finite() { hi } else { bmax + margin };
        (wlo, whi.max(wlo))
    }

    /// Sample abscissas over finite `[lo, hi]`: all knots of the involved
    /// models plus `per_gap` uniform points per knot gap.
    pub fn sample_xs(
        &self,
        other: Option<&PiecewiseModel>,
        lo: f64,
        hi: f64,
        per_gap: usize,
    ) -> Vec<f64> {
        let mut xs = self.knot_xs_in(lo, hi);
        if let Some(o) = other {
            xs.extend(o.knot_xs_in(lo, hi));
        }
        xs.push(lo);
        xs.push(hi);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut out = Vec::with_capacity(xs.len() * (per_gap + 1));
        for pair in xs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            out.push(a);
            for i in 1..=per_gap {
                out.push(a + (b - a) * i as f64 / (per_gap + 1) as f64);
            }
        }
        out.push(*xs.last().unwrap());
        out
    }

    /// Minimum of `self − other` over finite `[lo, hi]`.
    ///
    /// Samples knots and uniform points; additionally, wherever the
    /// derivative difference changes sign between adjacent samples, the
    /// crossing of its linear interpolant is probed too — on stretches
    /// where both functions are quadratic that crossing is exactly the
    /// interior vertex of the (quadratic) difference.
    pub fn min_difference(&self, other: &PiecewiseModel, lo: f64, hi: f64, per_gap: usize) -> f64 {
        if lo > hi {
            return f64::INFINITY;
        }
        let xs = self.sample_xs(Some(other), lo, hi, per_gap);
        let mut min = f64::INFINITY;
        let diff = |x: f64| self.value(x) - other.value(x);
        min = min.min(diff(xs[0]));
        for pair in xs.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            min = min.min(diff(b));
            let da = self.derivative(a) - other.derivative(a);
            let db = self.derivative(b) - other.derivative(b);
            if da * db < 0.0 {
                let x = a + (b - a) * da / (da - db);
                if x > a && x < b {
                    min = min.min(diff(x));
                }
            }
        }
        min
    }

    /// Maximum of `|self − other|` over finite `[lo, hi]`.
    pub fn max_abs_difference(
        &self,
        other: &PiecewiseModel,
        lo: f64,
        hi: f64,
        per_gap: usize,
    ) -> f64 {
        let down = self.min_difference(other, lo, hi, per_gap);
        let up = other.min_difference(self, lo, hi, per_gap);
        (-down).max(-up).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f(x) = x: two degenerate linear tails glued at 0.
    fn identity() -> PiecewiseModel {
        PiecewiseModel::new(vec![
            Piece::ExponentialTail {
                side: TailSide::Left,
                boundary: 0.0,
                value: 0.0,
                slope: 1.0,
                gamma: 1.0,
                rate: 1.0,
            },
            Piece::ExponentialTail {
                side: TailSide::Right,
                boundary: 0.0,
                value: 0.0,
                slope: 1.0,
                gamma: 1.0,
                rate: 1.0,
            },
        ])
        .unwrap()
    }

    /// A bounded quadratic bend: f' goes 0 → 2 linearly on [0, 1], flat
    /// left tail, linear right tail, so f(x) = x² on [0, 1].
    fn square_on_unit() -> PiecewiseModel {
        PiecewiseModel::new(vec![
            Piece::ExponentialTail {
                side: TailSide::Left,
                boundary: 0.0,
                value: 0.0,
                slope: 0.0,
                gamma: 0.0,
                rate: 1.0,
            },
            Piece::LinearQuadratic { knots: vec![(0.0, 0.0), (1.0, 2.0)], value: 0.0 },
            Piece::ExponentialTail {
                side: TailSide::Right,
                boundary: 1.0,
                value: 1.0,
                slope: 2.0,
                gamma: 2.0,
                rate: 1.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn constant_model_is_flat() {
        let m = PiecewiseModel::constant(3.5);
        for x in [-100.0, -1.0, 0.0, 2.0, 50.0] {
            assert_eq!(m.value(x), 3.5);
            assert_eq!(m.derivative(x), 0.0);
        }
    }

    #[test]
    fn identity_model_evaluates_linearly() {
        let m = identity();
        for x in [-10.0, -0.5, 0.0, 0.25, 7.0] {
            assert!((m.value(x) - x).abs() < 1e-12, "value at {x}");
            assert_eq!(m.derivative(x), 1.0);
        }
    }

    #[test]
    fn quadratic_piece_matches_square() {
        let m = square_on_unit();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            assert!((m.value(x) - x * x).abs() < 1e-12, "f({x})");
            assert!((m.derivative(x) - 2.0 * x).abs() < 1e-12, "f'({x})");
        }
        // Left of 0 it is the constant 0; right of 1 it is 1 + 2(x−1).
        assert_eq!(m.value(-5.0), 0.0);
        assert!((m.value(3.0) - (1.0 + 2.0 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail_approaches_asymptote() {
        // Left tail with slope 1 at the boundary decaying to γ = 0:
        // f' = e^x, f = e^x anchored by f(0) = 1.
        let m = PiecewiseModel::new(vec![
            Piece::ExponentialTail {
                side: TailSide::Left,
                boundary: 0.0,
                value: 1.0,
                slope: 1.0,
                gamma: 0.0,
                rate: 1.0,
            },
            Piece::ExponentialTail {
                side: TailSide::Right,
                boundary: 0.0,
                value: 1.0,
                slope: 1.0,
                gamma: 1.0,
                rate: 1.0,
            },
        ])
        .unwrap();
        for x in [-3.0_f64, -1.0, -0.1] {
            assert!((m.value(x) - x.exp()).abs() < 1e-12, "f({x})");
            assert!((m.derivative(x) - x.exp()).abs() < 1e-12, "f'({x})");
        }
        assert_eq!(m.derivative(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn glue_mismatch_is_rejected() {
        let err = PiecewiseModel::new(vec![
            Piece::ExponentialTail {
                side: TailSide::Left,
                boundary: 0.0,
                value: 0.0,
                slope: 1.0,
                gamma: 1.0,
                rate: 1.0,
            },
            Piece::ExponentialTail {
                side: TailSide::Right,
                boundary: 0.0,
                value: 0.5, // value jump
                slope: 1.0,
                gamma: 1.0,
                rate: 1.0,
            },
        ])
        .unwrap_err();
        assert!(matches!(err, ModelError::DiscontinuousGlue { .. }));
    }

    #[test]
    fn derivative_extrema_attained_at_knots() {
        let m = square_on_unit();
        assert_eq!(m.derivative_extrema(0.0, 1.0), (0.0, 2.0));
        assert_eq!(m.derivative_extrema(0.25, 0.5), (0.5, 1.0));
        // Over the whole line the tails contribute their asymptotes.
        assert_eq!(m.derivative_extrema(f64::NEG_INFINITY, f64::INFINITY), (0.0, 2.0));
    }

    #[test]
    fn derivative_extrema_match_dense_sampling() {
        let m = square_on_unit();
        let (wlo, whi) = m.clip_window(None, f64::NEG_INFINITY, f64::INFINITY);
        let (amin, amax) = m.derivative_extrema(wlo, whi);
        let mut smin = f64::INFINITY;
        let mut smax = f64::NEG_INFINITY;
        for i in 0..=10_000 {
            let x = wlo + (whi - wlo) * i as f64 / 10_000.0;
            let d = m.derivative(x);
            smin = smin.min(d);
            smax = smax.max(d);
        }
        assert!((amin - smin).abs() < 1e-6);
        assert!((amax - smax).abs() < 1e-6);
    }

    #[test]
    fn monotonicity_classification() {
        let m = square_on_unit();
        // Over [0, 1] the derivative rises 0 → 2 strictly.
        let mono = m.derivative_monotonicity(0.0, 1.0);
        assert!(mono.nondecreasing && !mono.nonincreasing && !mono.has_flat_stretch);
        // Over the whole line the flat left tail adds a flat stretch.
        let mono = m.derivative_monotonicity(f64::NEG_INFINITY, f64::INFINITY);
        assert!(mono.nondecreasing && mono.has_flat_stretch);
        let c = PiecewiseModel::constant(1.0);
        let mono = c.derivative_monotonicity(-1.0, 1.0);
        assert!(mono.nondecreasing && mono.nonincreasing && mono.has_flat_stretch);
    }

    #[test]
    fn identical_on_shared_structure() {
        let a = square_on_unit();
        let b = square_on_unit();
        assert!(a.identical_on(&b, 0.0, 1.0));
        assert!(a.identical_on(&b, f64::NEG_INFINITY, f64::INFINITY));
        let c = identity();
        assert!(!a.identical_on(&c, 0.0, 1.0));
        // Single-point comparison degenerates to value equality.
        assert!(a.identical_on(&c, 1.0, 1.0));
        assert!(!a.identical_on(&c, 0.5, 0.5));
    }

    #[test]
    fn min_difference_finds_quadratic_vertex() {
        // f = x² on [0,1] against the chord y = x: the interior minimum of
        // f − g is −1/4 at x = 1/2 and must be found exactly.
        let f = square_on_unit();
        let chord = identity();
        let m = f.min_difference(&chord, 0.0, 1.0, 3);
        assert!((m - (-0.25)).abs() < 1e-12, "interior vertex: {m}");
        let g = PiecewiseModel::constant(0.0);
        assert_eq!(f.min_difference(&g, 0.5, 1.0, 4), 0.25);
    }

    #[test]
    fn max_abs_difference_symmetric() {
        let f = square_on_unit();
        let g = PiecewiseModel::constant(0.0);
        let d = f.max_abs_difference(&g, 0.0, 1.0, 8);
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(f.max_abs_difference(&f.clone(), 0.0, 1.0, 8), 0.0);
    }
}

//! Distance transforms `ψ: [0, ∞) → [0, ∞)` given as finite piecewise-affine
//! maps, and the checks that decide whether `ψ ∘ d` stays an ultrametric.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{RangeSet, Value};
use crate::error::{Error, Result};

/// Behaviour of `ψ` on the first interval `(0, start]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Germ {
    /// The first piece starts at `0`.
    Affine,
    /// `(0, start]` rounds up onto the grid `{start · ratio^-n : n ≥ 0}`.
    Geometric { start: Value, ratio: Value },
}

/// An affine piece `x ↦ slope·x + intercept` ending at `upto`.
///
/// `upto = None` means the piece runs to infinity. `inclusive` says whether
/// `upto` itself belongs to this piece or to the next one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub upto: Option<Value>,
    pub inclusive: bool,
    pub slope: BigRational,
    pub intercept: BigRational,
}

impl Piece {
    pub fn constant(upto: Option<Value>, value: Value) -> Self {
        Piece {
            upto,
            inclusive: true,
            slope: BigRational::zero(),
            intercept: value.into_rational(),
        }
    }

    pub fn linear(upto: Option<Value>, slope: BigRational, intercept: BigRational) -> Self {
        Piece {
            upto,
            inclusive: true,
            slope,
            intercept,
        }
    }

    /// Same piece with an open right end.
    pub fn exclusive(mut self) -> Self {
        self.inclusive = false;
        self
    }

    fn at(&self, x: &BigRational) -> BigRational {
        &self.slope * x + &self.intercept
    }
}

/// A piecewise-affine `ψ` with `ψ(0) = 0`, sorted breakpoints and
/// right-closed pieces by default.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    germ: Germ,
    pieces: Vec<Piece>,
}

struct Span<'a> {
    lo: BigRational,
    lo_closed: bool,
    hi: Option<BigRational>,
    hi_closed: bool,
    piece: &'a Piece,
}

impl<'a> Span<'a> {
    fn is_point(&self) -> bool {
        self.hi.as_ref() == Some(&self.lo)
    }

    /// A point strictly inside the span (or the point itself).
    fn interior(&self) -> BigRational {
        match &self.hi {
            _ if self.is_point() => self.lo.clone(),
            Some(hi) => (&self.lo + hi) / BigRational::from_integer(2.into()),
            None => &self.lo + BigRational::from_integer(1.into()),
        }
    }

    fn half_width(&self) -> BigRational {
        match &self.hi {
            Some(hi) => (hi - &self.lo) / BigRational::from_integer(2.into()),
            None => BigRational::from_integer(1.into()),
        }
    }

    /// Infimum of the piece over the span and whether it is attained.
    fn infimum(&self) -> (BigRational, bool) {
        let p = self.piece;
        if self.is_point() {
            return (p.at(&self.lo), true);
        }
        if p.slope.is_zero() {
            return (p.intercept.clone(), true);
        }
        if p.slope.is_positive() {
            (p.at(&self.lo), self.lo_closed)
        } else {
            match &self.hi {
                Some(hi) => (p.at(hi), self.hi_closed),
                None => unreachable!("decreasing unbounded pieces are rejected"),
            }
        }
    }
}

impl StepFunction {
    /// Builds `ψ`, checking that breakpoints increase and that every value
    /// on `(0, ∞)` is non-negative.
    pub fn new(germ: Germ, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidStepFunction("no pieces".into()));
        }
        if let Germ::Geometric { start, ratio } = &germ {
            if !start.is_positive() || *ratio <= Value::one() {
                return Err(Error::InvalidStepFunction("geometric germ needs start > 0, ratio > 1".into()));
            }
        }
        let f = StepFunction { germ, pieces };
        let mut prev: Option<(BigRational, bool)> = Some((f.start().into_rational(), true));
        for (i, p) in f.pieces.iter().enumerate() {
            let last = i + 1 == f.pieces.len();
            match (&p.upto, last) {
                (None, false) => {
                    return Err(Error::InvalidStepFunction("only the last piece may be unbounded".into()))
                }
                (Some(_), true) => {
                    return Err(Error::InvalidStepFunction("the last piece must be unbounded".into()))
                }
                _ => {}
            }
            if let (Some(u), Some((b, closed))) = (&p.upto, &prev) {
                let u = u.as_rational();
                let ok = u > b || (u == b && !*closed && p.inclusive);
                if !ok {
                    return Err(Error::InvalidStepFunction(format!("breakpoint {u} out of order")));
                }
            }
            prev = p.upto.as_ref().map(|u| (u.as_rational().clone(), p.inclusive));
        }
        if f.pieces.last().is_some_and(|p| p.slope.is_negative()) {
            return Err(Error::InvalidStepFunction("unbounded piece must not decrease".into()));
        }
        for s in f.spans() {
            let (inf, _) = s.infimum();
            if inf.is_negative() {
                return Err(Error::InvalidStepFunction("ψ takes negative values".into()));
            }
        }
        Ok(f)
    }

    pub fn identity() -> Self {
        StepFunction::new(
            Germ::Affine,
            vec![Piece::linear(None, BigRational::from_integer(1.into()), BigRational::zero())],
        )
        .expect("identity is well formed")
    }

    /// `x ↦ min(x, cap)`.
    pub fn truncation(cap: &Value) -> Self {
        StepFunction::new(
            Germ::Affine,
            vec![
                Piece::linear(Some(cap.clone()), BigRational::from_integer(1.into()), BigRational::zero()),
                Piece::constant(None, cap.clone()),
            ],
        )
        .expect("truncation is well formed")
    }

    /// Rounds every distance up to the next term of the strictly decreasing
    /// sequence `radii`: `(r(n+1), r(n)] ↦ r(n)`, `(r(1), ∞) ↦ r(1)`.
    ///
    /// Below the last listed term the sequence continues geometrically with
    /// the ratio of its last two terms, which keeps `ψ` continuous at `0`.
    pub fn grid_rounding(radii: &[Value]) -> Result<Self> {
        if radii.len() < 2 {
            return Err(Error::InvalidStepFunction("need at least two radii".into()));
        }
        if radii.windows(2).any(|w| w[0] <= w[1]) || !radii.last().unwrap().is_positive() {
            return Err(Error::InvalidStepFunction("radii must be positive and strictly decreasing".into()));
        }
        let n = radii.len();
        let germ = Germ::Geometric {
            start: radii[n - 1].clone(),
            ratio: radii[n - 2].div(&radii[n - 1]),
        };
        let mut pieces: Vec<Piece> = (1..n)
            .rev()
            .map(|j| Piece::constant(Some(radii[j - 1].clone()), radii[j - 1].clone()))
            .collect();
        pieces.push(Piece::constant(None, radii[0].clone()));
        StepFunction::new(germ, pieces)
    }

    /// Piecewise constant: `values[j]` on `(breaks[j-1], breaks[j]]` and
    /// `values.last()` beyond the last break. `breaks.len() + 1 == values.len()`.
    pub fn piecewise_constant(breaks: &[Value], values: &[Value]) -> Result<Self> {
        if breaks.len() + 1 != values.len() {
            return Err(Error::InvalidStepFunction("need one more value than breaks".into()));
        }
        let mut pieces: Vec<Piece> = breaks
            .iter()
            .zip(values)
            .map(|(b, x)| Piece::constant(Some(b.clone()), x.clone()))
            .collect();
        pieces.push(Piece::constant(None, values.last().unwrap().clone()));
        StepFunction::new(Germ::Affine, pieces)
    }

    pub fn germ(&self) -> &Germ {
        &self.germ
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn start(&self) -> Value {
        match &self.germ {
            Germ::Affine => Value::zero(),
            Germ::Geometric { start, .. } => start.clone(),
        }
    }

    fn spans(&self) -> Vec<Span<'_>> {
        let mut lo = self.start().into_rational();
        let mut lo_closed = false;
        let mut out = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let hi = p.upto.as_ref().map(|u| u.as_rational().clone());
            out.push(Span {
                lo: lo.clone(),
                lo_closed,
                hi: hi.clone(),
                hi_closed: p.inclusive,
                piece: p,
            });
            if let Some(h) = hi {
                lo = h;
                lo_closed = !p.inclusive;
            }
        }
        out
    }

    /// `ψ(x)`.
    pub fn eval(&self, x: &Value) -> Value {
        if x.is_zero() {
            return Value::zero();
        }
        if let Germ::Geometric { start, ratio } = &self.germ {
            if x <= start {
                let k = RangeSet::exponent_floor(ratio, &start.div(x));
                return start.mul(&ratio.pow(-k));
            }
        }
        let xr = x.as_rational();
        let piece = self
            .pieces
            .iter()
            .find(|p| match &p.upto {
                None => true,
                Some(u) => xr < u.as_rational() || (p.inclusive && xr == u.as_rational()),
            })
            .expect("last piece is unbounded");
        Value::from_rational(piece.at(xr)).expect("ψ is non-negative by construction")
    }

    /// Junctions `(point, value on the left side, value on the right side)`
    /// including the germ/first-piece junction.
    fn junctions(&self) -> Vec<(BigRational, BigRational, BigRational)> {
        let spans = self.spans();
        let mut out = Vec::new();
        if let Germ::Geometric { start, .. } = &self.germ {
            let g = start.as_rational();
            out.push((g.clone(), g.clone(), spans[0].piece.at(g)));
        }
        for w in spans.windows(2) {
            let b = w[0].hi.clone().expect("inner spans are bounded");
            out.push((b.clone(), w[0].piece.at(&b), w[1].piece.at(&b)));
        }
        out
    }

    /// Non-decreasing on `[0, ∞)`.
    pub fn is_increasing(&self) -> bool {
        let slopes_ok = self.spans().iter().all(|s| s.is_point() || !s.piece.slope.is_negative());
        slopes_ok && self.junctions().iter().all(|(_, left, right)| left <= right)
    }

    /// `ψ⁻¹({0}) = {0}`.
    pub fn is_amenable(&self) -> bool {
        self.spans().iter().all(|s| {
            let (inf, attained) = s.infimum();
            inf.is_positive() || (inf.is_zero() && !attained)
        })
    }

    /// `ψ(x) → 0` as `x → 0⁺`.
    pub fn is_continuous_at_zero(&self) -> bool {
        match &self.germ {
            Germ::Geometric { .. } => true,
            Germ::Affine => self.pieces[0].intercept.is_zero(),
        }
    }

    /// Increasing, amenable and continuous at `0`: exactly the maps for which
    /// `ψ ∘ d` is again a compatible ultrametric for every ultrametric `d`.
    pub fn validate(&self) -> bool {
        self.is_increasing() && self.is_amenable() && self.is_continuous_at_zero()
    }

    /// Points `a < b` with `ψ(a) > ψ(b)`, if `ψ` is not increasing.
    pub fn descent(&self) -> Option<(Value, Value)> {
        let to_value = |r: BigRational| Value::from_rational(r).expect("positive point");
        let spans = self.spans();
        for s in &spans {
            if !s.is_point() && s.piece.slope.is_negative() {
                let mid = s.interior();
                let a = (&s.lo + &mid) / BigRational::from_integer(2.into());
                return Some((to_value(a), to_value(mid)));
            }
        }
        // junction at b: left value exceeds right value
        let mut sides: Vec<(Option<&Span<'_>>, &Span<'_>, bool)> = Vec::new();
        if matches!(self.germ, Germ::Geometric { .. }) {
            sides.push((None, &spans[0], true));
        }
        for w in spans.windows(2) {
            sides.push((Some(&w[0]), &w[1], w[0].hi_closed));
        }
        for (left, right, left_owns_point) in sides {
            let b = right.lo.clone();
            let left_val = match left {
                Some(l) => l.piece.at(&b),
                None => b.clone(),
            };
            let right_val = right.piece.at(&b);
            if left_val <= right_val {
                continue;
            }
            let gap = &left_val - &right_val;
            let two = BigRational::from_integer(2.into());
            if left_owns_point {
                // ψ(b) = left_val; step a little into the right span
                let mut t = right.half_width();
                if right.piece.slope.is_positive() {
                    let cap = &gap / (&two * &right.piece.slope);
                    if cap < t {
                        t = cap;
                    }
                }
                if right.is_point() {
                    continue;
                }
                return Some((to_value(b.clone()), to_value(&b + t)));
            } else {
                // ψ(b) = right_val; step a little into the left span
                let l = left.expect("germ always owns its endpoint");
                if l.is_point() {
                    return Some((to_value(l.lo.clone()), to_value(b)));
                }
                let mut t = l.half_width();
                if l.piece.slope.is_positive() {
                    let cap = &gap / (&two * &l.piece.slope);
                    if cap < t {
                        t = cap;
                    }
                }
                return Some((to_value(&b - t), to_value(b)));
            }
        }
        None
    }

    /// A positive point where `ψ` vanishes, if `ψ` is not amenable.
    pub fn zero_point(&self) -> Option<Value> {
        self.spans().iter().find_map(|s| {
            let (inf, attained) = s.infimum();
            if !(inf.is_zero() && attained) {
                return None;
            }
            let p = s.piece;
            let x = if s.is_point() || p.slope.is_zero() {
                s.interior()
            } else if p.slope.is_positive() {
                s.lo.clone()
            } else {
                s.hi.clone().expect("decreasing pieces are bounded")
            };
            Value::from_rational(x).ok().filter(|x| x.is_positive())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::v;

    fn step_at_one() -> StepFunction {
        // 0 on (0, 1), 1 on [1, ∞)
        StepFunction::new(
            Germ::Affine,
            vec![Piece::constant(Some(v("1")), v("0")).exclusive(), Piece::constant(None, v("1"))],
        )
        .unwrap()
    }

    #[test]
    fn truncation_is_admissible() {
        let psi = StepFunction::truncation(&v("3"));
        assert!(psi.validate());
        assert_eq!(psi.eval(&v("5")), v("3"));
        assert_eq!(psi.eval(&v("2")), v("2"));
    }

    #[test]
    fn step_is_not_amenable() {
        let psi = step_at_one();
        assert!(psi.is_increasing());
        assert!(!psi.is_amenable());
        assert!(!psi.validate());
        assert_eq!(psi.eval(&v("1/2")), v("0"));
        assert_eq!(psi.eval(&v("1")), v("1"));
        assert!(psi.zero_point().is_some());
    }

    #[test]
    fn grid_rounding_matches_case_formula() {
        let psi = StepFunction::grid_rounding(&[v("1"), v("1/2"), v("1/4")]).unwrap();
        assert!(psi.validate());
        assert_eq!(psi.eval(&v("3/10")), v("1/2"));
        assert_eq!(psi.eval(&v("3/5")), v("1"));
        assert_eq!(psi.eval(&v("7")), v("1"));
        assert_eq!(psi.eval(&v("1/4")), v("1/4"));
        assert_eq!(psi.eval(&v("1/5")), v("1/4"));
        assert_eq!(psi.eval(&v("1/9")), v("1/8"));
    }

    #[test]
    fn positive_intercept_breaks_continuity() {
        let psi = StepFunction::piecewise_constant(&[v("1")], &[v("1"), v("2")]).unwrap();
        assert!(psi.is_increasing());
        assert!(psi.is_amenable());
        assert!(!psi.is_continuous_at_zero());
    }

    #[test]
    fn descents_are_found() {
        let psi = StepFunction::piecewise_constant(&[v("1"), v("2")], &[v("1"), v("3"), v("2")]).unwrap();
        let (a, b) = psi.descent().unwrap();
        assert!(a < b && psi.eval(&a) > psi.eval(&b));

        let dec = StepFunction::new(
            Germ::Affine,
            vec![
                Piece::linear(Some(v("1")), BigRational::from_integer(1.into()), BigRational::zero()),
                Piece::linear(Some(v("2")), BigRational::from_integer((-1).into()), BigRational::from_integer(2.into())),
                Piece::constant(None, v("0")),
            ],
        );
        // hits zero at 2: allowed as a function, not amenable
        let dec = dec.unwrap();
        assert!(!dec.is_increasing());
        let (a, b) = dec.descent().unwrap();
        assert!(a < b && dec.eval(&a) > dec.eval(&b));
    }

    #[test]
    fn rejects_negative_values() {
        let bad = StepFunction::new(
            Germ::Affine,
            vec![Piece::linear(None, BigRational::zero(), BigRational::from_integer((-1).into()))],
        );
        assert!(bad.is_err());
    }
}

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::values::{RangeSet, Value};

/// A finitely supported integer combination of basis labels. The base
/// point `o` is the zero of the module and never appears as a key.
pub type Coeffs = BTreeMap<String, BigInt>;

/// An eventually-zero step function `S₊ → F(ℤ, X, o)`.
///
/// Segment `k` covers `(upto[k-1], upto[k]]` with `upto[-1] = 0`; past the
/// last breakpoint the vector is zero. Canonical form: breakpoints strictly
/// increasing and positive, no zero coefficients, adjacent segments distinct,
/// last segment non-zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UltraVector {
    segments: Vec<(Value, Coeffs)>,
}

fn clean(mut c: Coeffs) -> Coeffs {
    c.retain(|_, n| !n.is_zero());
    c
}

impl UltraVector {
    pub fn zero() -> Self {
        UltraVector::default()
    }

    /// `label` on `(0, upto]`, zero beyond.
    pub fn basis_step(label: &str, upto: &Value) -> Self {
        UltraVector::from_segments(vec![(upto.clone(), Coeffs::from([(label.to_string(), BigInt::from(1))]))])
            .expect("positive breakpoint")
    }

    /// Builds the canonical form of arbitrary right-closed segments.
    pub fn from_segments(segments: Vec<(Value, Coeffs)>) -> Result<Self> {
        let mut prev = Value::zero();
        for (upto, _) in &segments {
            if *upto <= prev {
                return Err(Error::InvalidArgument(format!(
                    "segment breakpoints must increase from 0, got {upto} after {prev}"
                )));
            }
            prev = upto.clone();
        }
        let mut out: Vec<(Value, Coeffs)> = Vec::with_capacity(segments.len());
        for (upto, c) in segments {
            let c = clean(c);
            match out.last_mut() {
                Some(last) if last.1 == c => last.0 = upto,
                _ => out.push((upto, c)),
            }
        }
        while out.last().is_some_and(|s| s.1.is_empty()) {
            out.pop();
        }
        Ok(UltraVector { segments: out })
    }

    pub fn segments(&self) -> &[(Value, Coeffs)] {
        &self.segments
    }

    pub fn is_zero(&self) -> bool {
        self.segments.is_empty()
    }

    /// Last breakpoint: the vector vanishes beyond it.
    pub fn support_end(&self) -> Value {
        self.segments.last().map(|s| s.0.clone()).unwrap_or_else(Value::zero)
    }

    /// Value at `q > 0`.
    pub fn eval(&self, q: &Value) -> Coeffs {
        self.segments
            .iter()
            .find(|(upto, _)| q <= upto)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    /// The same vector with every segment boundary in `grid` made explicit;
    /// `grid` must be sorted and contain this vector's breakpoints.
    fn refine<'a>(&'a self, grid: &'a [Value]) -> impl Iterator<Item = &'a Coeffs> + 'a {
        static EMPTY: Coeffs = BTreeMap::new();
        let mut k = 0;
        grid.iter().map(move |q| {
            while k < self.segments.len() && self.segments[k].0 < *q {
                k += 1;
            }
            self.segments.get(k).map_or(&EMPTY, |s| &s.1)
        })
    }

    fn merged_grid<'a>(vs: impl IntoIterator<Item = &'a UltraVector>) -> Vec<Value> {
        let mut grid: Vec<Value> = vs.into_iter().flat_map(|v| v.segments.iter().map(|s| s.0.clone())).collect();
        grid.sort();
        grid.dedup();
        grid
    }

    /// `Σ nᵢ · vᵢ`.
    pub fn combination(terms: &[(BigInt, &UltraVector)]) -> UltraVector {
        let grid = Self::merged_grid(terms.iter().map(|t| t.1));
        let mut segs: Vec<(Value, Coeffs)> = grid.iter().map(|q| (q.clone(), Coeffs::new())).collect();
        for (n, v) in terms {
            if n.is_zero() {
                continue;
            }
            for (slot, c) in segs.iter_mut().zip(v.refine(&grid)) {
                for (label, k) in c {
                    *slot.1.entry(label.clone()).or_default() += n * k;
                }
            }
        }
        UltraVector::from_segments(segs).expect("merged grid is sorted")
    }

    pub fn add(&self, other: &UltraVector) -> UltraVector {
        Self::combination(&[(BigInt::from(1), self), (BigInt::from(1), other)])
    }

    pub fn sub(&self, other: &UltraVector) -> UltraVector {
        Self::combination(&[(BigInt::from(1), self), (BigInt::from(-1), other)])
    }

    pub fn neg(&self) -> UltraVector {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, n: &BigInt) -> UltraVector {
        Self::combination(&[(n.clone(), self)])
    }

    /// Merged segments `(lo, hi]` on which `self` and `other` differ.
    pub fn disagreement(&self, other: &UltraVector) -> Vec<(Value, Value)> {
        let grid = Self::merged_grid([self, other]);
        let mut lo = Value::zero();
        let mut out = Vec::new();
        for ((q, a), b) in grid.iter().zip(self.refine(&grid)).zip(other.refine(&grid)) {
            if a != b {
                out.push((lo.clone(), q.clone()));
            }
            lo = q.clone();
        }
        out
    }

    /// `Δ(f, g) = sup{q ∈ S₊ : f(q) ≠ g(q)}`, taken segment by segment with
    /// the range set's interval sup.
    pub fn delta(&self, other: &UltraVector, s: &RangeSet) -> Value {
        self.disagreement(other)
            .iter()
            .filter_map(|(lo, hi)| s.sup_in(lo, hi))
            .max()
            .unwrap_or_else(Value::zero)
    }

    /// `Δ(f, 0)`.
    pub fn norm(&self, s: &RangeSet) -> Value {
        self.delta(&UltraVector::zero(), s)
    }
}

impl fmt::Display for UltraVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.is_empty() {
            return f.write_str("0");
        }
        let mut lo = Value::zero();
        for (k, (upto, c)) in self.segments.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            let terms: Vec<String> = c.iter().map(|(l, n)| format!("{n}·{l}")).collect();
            let body = if terms.is_empty() { "0".to_string() } else { terms.join("+") };
            write!(f, "({lo},{upto}]:{body}")?;
            lo = upto.clone();
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SegmentRepr {
    upto: Value,
    coeffs: BTreeMap<String, IntRepr>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    segments: Vec<SegmentRepr>,
}

/// JSON integer when it fits in `i64`, decimal string otherwise.
struct IntRepr(BigInt);

impl Serialize for IntRepr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(n) => s.serialize_i64(n),
            None => s.collect_str(&self.0),
        }
    }
}

impl<'de> Deserialize<'de> for IntRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(|n| IntRepr(BigInt::from(n)))
                .ok_or_else(|| de::Error::custom("coefficient must be an integer")),
            serde_json::Value::String(s) => s.parse().map(IntRepr).map_err(de::Error::custom),
            _ => Err(de::Error::custom("coefficient must be an integer")),
        }
    }
}

impl Serialize for UltraVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorRepr {
            segments: self
                .segments
                .iter()
                .map(|(upto, c)| SegmentRepr {
                    upto: upto.clone(),
                    coeffs: c.iter().map(|(l, n)| (l.clone(), IntRepr(n.clone()))).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UltraVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = VectorRepr::deserialize(d)?;
        let segs = repr
            .segments
            .into_iter()
            .map(|s| (s.upto, s.coeffs.into_iter().map(|(l, n)| (l, n.0)).collect()))
            .collect();
        UltraVector::from_segments(segs).map_err(de::Error::custom)
    }
}

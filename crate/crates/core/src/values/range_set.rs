//! Effective range sets: the admissible distance values `S ⊆ [0, ∞)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::Value;
use crate::error::{Error, Result};

/// The set `S` of admissible distances, always containing `0`.
///
/// `Grid` is `{0} ∪ {ρ^k : kmin ≤ k ≤ kmax}` with either bound possibly
/// missing; a missing `kmin` makes the grid coinitial. Exponents are
/// generated on demand, nothing infinite is stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RangeSetRepr", into = "RangeSetRepr")]
pub enum RangeSet {
    Finite(Vec<Value>),
    Grid {
        ratio: Value,
        kmin: Option<i64>,
        kmax: Option<i64>,
    },
    /// All dyadic rationals `m / 2^k`.
    Dyadic,
    /// All non-negative rationals.
    All,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RangeSetRepr {
    Finite {
        values: Vec<Value>,
    },
    Grid {
        ratio: Value,
        #[serde(default)]
        kmin: Option<i64>,
        #[serde(default)]
        kmax: Option<i64>,
    },
    Dyadic,
    All,
}

impl TryFrom<RangeSetRepr> for RangeSet {
    type Error = Error;

    fn try_from(r: RangeSetRepr) -> Result<Self> {
        match r {
            RangeSetRepr::Finite { values } => Ok(RangeSet::finite(values)),
            RangeSetRepr::Grid { ratio, kmin, kmax } => RangeSet::grid(ratio, kmin, kmax),
            RangeSetRepr::Dyadic => Ok(RangeSet::Dyadic),
            RangeSetRepr::All => Ok(RangeSet::All),
        }
    }
}

impl From<RangeSet> for RangeSetRepr {
    fn from(s: RangeSet) -> Self {
        match s {
            RangeSet::Finite(values) => RangeSetRepr::Finite { values },
            RangeSet::Grid { ratio, kmin, kmax } => RangeSetRepr::Grid { ratio, kmin, kmax },
            RangeSet::Dyadic => RangeSetRepr::Dyadic,
            RangeSet::All => RangeSetRepr::All,
        }
    }
}

fn ln_big(b: &BigInt) -> f64 {
    let bits = b.bits();
    if bits < 1000 {
        b.to_f64().unwrap_or(f64::MAX).ln()
    } else {
        let shift = bits - 60;
        let top: BigInt = b >> shift;
        top.to_f64().unwrap_or(f64::MAX).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn ln_value(x: &Value) -> f64 {
    ln_big(x.numer()) - ln_big(x.denom())
}

impl RangeSet {
    /// Finite set; sorts, removes duplicates and inserts `0`.
    pub fn finite<I: IntoIterator<Item = Value>>(values: I) -> Self {
        let mut vs: Vec<Value> = values.into_iter().collect();
        vs.push(Value::zero());
        vs.sort();
        vs.dedup();
        RangeSet::Finite(vs)
    }

    pub fn grid(ratio: Value, kmin: Option<i64>, kmax: Option<i64>) -> Result<Self> {
        if ratio <= Value::one() {
            return Err(Error::InvalidArgument(format!("grid ratio {ratio} must exceed 1")));
        }
        if let (Some(lo), Some(hi)) = (kmin, kmax) {
            if lo > hi {
                return Err(Error::InvalidArgument(format!("kmin {lo} > kmax {hi}")));
            }
        }
        Ok(RangeSet::Grid { ratio, kmin, kmax })
    }

    /// `{0} ∪ {2^k : k ≤ kmax}`, the usual coinitial test grid.
    pub fn powers_of_two(kmax: Option<i64>) -> Self {
        RangeSet::Grid {
            ratio: Value::from_int(2),
            kmin: None,
            kmax,
        }
    }

    /// The constant `C` for which the set is `C`-quasi-complete.
    pub fn quasi_completeness_constant(&self) -> Value {
        match self {
            RangeSet::Finite(_) | RangeSet::All => Value::one(),
            RangeSet::Grid { ratio, .. } => ratio.clone(),
            RangeSet::Dyadic => Value::from_int(2),
        }
    }

    fn grid_in_bounds(k: i64, kmin: Option<i64>, kmax: Option<i64>) -> bool {
        kmin.is_none_or(|lo| k >= lo) && kmax.is_none_or(|hi| k <= hi)
    }

    /// Largest `k` with `ratio^k <= x`, ignoring bounds. `x > 0`.
    pub(crate) fn exponent_floor(ratio: &Value, x: &Value) -> i64 {
        debug_assert!(x.is_positive());
        let mut k = (ln_value(x) / ln_value(ratio)).floor() as i64;
        while ratio.pow(k) > *x {
            k -= 1;
        }
        while ratio.pow(k + 1) <= *x {
            k += 1;
        }
        k
    }

    /// Smallest `k` with `ratio^k >= x`, ignoring bounds. `x > 0`.
    fn exponent_ceil(ratio: &Value, x: &Value) -> i64 {
        let k = Self::exponent_floor(ratio, x);
        if ratio.pow(k) == *x {
            k
        } else {
            k + 1
        }
    }

    pub fn contains(&self, x: &Value) -> bool {
        if x.is_zero() {
            return true;
        }
        match self {
            RangeSet::Finite(vs) => vs.binary_search(x).is_ok(),
            RangeSet::Grid { ratio, kmin, kmax } => {
                let k = Self::exponent_floor(ratio, x);
                ratio.pow(k) == *x && Self::grid_in_bounds(k, *kmin, *kmax)
            }
            RangeSet::Dyadic => x.is_dyadic(),
            RangeSet::All => true,
        }
    }

    pub fn contains_positive(&self, x: &Value) -> bool {
        x.is_positive() && self.contains(x)
    }

    /// Largest element, when the set is bounded above.
    pub fn max_element(&self) -> Option<Value> {
        match self {
            RangeSet::Finite(vs) => vs.last().cloned(),
            RangeSet::Grid { ratio, kmax, .. } => kmax.map(|k| ratio.pow(k)),
            RangeSet::Dyadic | RangeSet::All => None,
        }
    }

    pub fn has_positive(&self) -> bool {
        match self {
            RangeSet::Finite(vs) => vs.len() > 1,
            _ => true,
        }
    }

    /// A fixed positive element: the least one if it exists, otherwise `1`
    /// (or the top of a grid capped below `1`).
    pub fn canonical_positive(&self) -> Result<Value> {
        match self {
            RangeSet::Finite(vs) => vs.get(1).cloned().ok_or(Error::EmptyPositivePart),
            RangeSet::Grid { ratio, kmin, kmax } => {
                let k = match (kmin, kmax) {
                    (Some(lo), _) => *lo,
                    (None, Some(hi)) => (*hi).min(0),
                    (None, None) => 0,
                };
                Ok(ratio.pow(k))
            }
            RangeSet::Dyadic | RangeSet::All => Ok(Value::one()),
        }
    }

    /// Some `s ∈ S₊` with `x <= s`, as small as the variant allows.
    ///
    /// Guarantees `s <= C·x` with `C` = [`quasi_completeness_constant`]
    /// whenever `x` is itself an element, and for all `x` in `Grid`
    /// (above its floor), `Dyadic` and `All`. For `Finite` sets and
    /// arbitrary `x` the least element `>= x` is returned and the ratio is
    /// whatever it is; see [`achieved_ratio`](Self::achieved_ratio).
    ///
    /// [`quasi_completeness_constant`]: Self::quasi_completeness_constant
    pub fn round_up(&self, x: &Value) -> Result<Value> {
        if !x.is_positive() {
            return Err(Error::NonPositive(x.clone()));
        }
        match self {
            RangeSet::Finite(vs) => vs
                .iter()
                .find(|s| *s >= x)
                .cloned()
                .ok_or_else(|| Error::OutOfRange(x.clone())),
            RangeSet::Grid { ratio, kmin, kmax } => {
                let mut k = Self::exponent_ceil(ratio, x);
                if let Some(hi) = kmax {
                    if k > *hi {
                        return Err(Error::OutOfRange(x.clone()));
                    }
                }
                if let Some(lo) = kmin {
                    k = k.max(*lo);
                }
                Ok(ratio.pow(k))
            }
            RangeSet::Dyadic => {
                if x.is_dyadic() {
                    return Ok(x.clone());
                }
                // finest level with 2^-k <= x keeps the result below 2x
                let two = Value::from_int(2);
                let k = -Self::exponent_floor(&two, x);
                let scale = two.pow(k);
                let steps = Value::from_rational(BigRational::from_integer(x.mul(&scale).ceil_int()))
                    .expect("non-negative");
                Ok(steps.div(&scale))
            }
            RangeSet::All => Ok(x.clone()),
        }
    }

    /// `round_up(x) / x`.
    pub fn achieved_ratio(&self, x: &Value) -> Result<Value> {
        Ok(self.round_up(x)?.div(x))
    }

    /// `sup (S ∩ (lo, hi])`, or `None` when the intersection is empty.
    ///
    /// For the dense variants the supremum is `hi` itself (an element of the
    /// closure of `S`).
    pub fn sup_in(&self, lo: &Value, hi: &Value) -> Option<Value> {
        if hi <= lo {
            return None;
        }
        match self {
            RangeSet::Finite(vs) => vs.iter().rev().find(|s| *s <= hi && *s > lo).cloned(),
            RangeSet::Grid { ratio, kmin, kmax } => {
                let mut k = Self::exponent_floor(ratio, hi);
                if let Some(top) = kmax {
                    k = k.min(*top);
                }
                if kmin.is_some_and(|bottom| k < bottom) {
                    return None;
                }
                let s = ratio.pow(k);
                (s > *lo).then_some(s)
            }
            RangeSet::Dyadic | RangeSet::All => Some(hi.clone()),
        }
    }

    pub fn has_countable_coinitiality(&self) -> bool {
        match self {
            RangeSet::Finite(_) => false,
            RangeSet::Grid { kmin, .. } => kmin.is_none(),
            RangeSet::Dyadic | RangeSet::All => true,
        }
    }

    /// First `n` terms of a strictly decreasing positive null sequence in `S`.
    pub fn coinitial_sequence(&self, n: usize) -> Result<Vec<Value>> {
        match self {
            RangeSet::Finite(_) => Err(Error::NoCoinitiality),
            RangeSet::Grid { kmin: Some(_), .. } => Err(Error::NoCoinitiality),
            RangeSet::Grid { ratio, kmin: None, kmax } => {
                let start = kmax.unwrap_or(-1).min(-1);
                Ok((0..n as i64).map(|i| ratio.pow(start - i)).collect())
            }
            RangeSet::Dyadic => {
                let half = Value::ratio(1, 2);
                Ok((1..=n as i64).map(|i| half.pow(i)).collect())
            }
            RangeSet::All => Ok((1..=n as u64).map(|i| Value::ratio(1, i)).collect()),
        }
    }

    /// Smallest element of `S₊` in the open interval `(lo, hi)`.
    ///
    /// Dense variants have no smallest element there; for them this returns
    /// `None` and callers use [`dyadic_above`](Self::dyadic_above) or the
    /// point itself.
    pub fn least_in_open(&self, lo: &Value, hi: &Value) -> Option<Value> {
        if hi <= lo {
            return None;
        }
        match self {
            RangeSet::Finite(vs) => vs.iter().find(|s| *s > lo && *s < hi && s.is_positive()).cloned(),
            RangeSet::Grid { ratio, kmin, kmax } => {
                let k = if lo.is_positive() {
                    Self::exponent_floor(ratio, lo) + 1
                } else {
                    kmin.unwrap_or_else(|| {
                        // no least positive element: take the largest below hi
                        let top = Self::exponent_floor(ratio, hi);
                        if ratio.pow(top) == *hi {
                            top - 1
                        } else {
                            top
                        }
                    })
                };
                let k = kmin.map_or(k, |bottom| k.max(bottom));
                if kmax.is_some_and(|top| k > top) {
                    return None;
                }
                let s = ratio.pow(k);
                (s < *hi && s > *lo).then_some(s)
            }
            RangeSet::Dyadic | RangeSet::All => None,
        }
    }

    /// Smallest multiple of `2^-level` strictly above `t`.
    pub fn dyadic_above(t: &Value, level: i64) -> Value {
        let scale = Value::from_int(2).pow(level);
        let steps = Value::from_rational(BigRational::from_integer(t.mul(&scale).floor_int() + BigInt::one()))
            .expect("positive");
        steps.div(&scale)
    }

    /// Least `k` with `2^-k < eps`.
    pub fn dyadic_level_below(eps: &Value) -> i64 {
        let two = Value::from_int(2);
        let mut k = -Self::exponent_floor(&two, eps);
        while two.pow(-k) >= *eps {
            k += 1;
        }
        k
    }

    /// Whether the range set is guaranteed to be a subset of `other`.
    pub fn is_subset_of(&self, other: &RangeSet) -> bool {
        match (self, other) {
            (_, RangeSet::All) => true,
            (RangeSet::Finite(vs), o) => vs.iter().all(|x| o.contains(x)),
            (RangeSet::Dyadic, RangeSet::Dyadic) => true,
            (RangeSet::Grid { ratio, .. }, RangeSet::Dyadic) => {
                // powers of ρ are dyadic in both directions only for ρ = 2^j
                ratio.denom().is_one() && ratio.pow(-1).is_dyadic()
            }
            (RangeSet::Grid { ratio: r1, kmin: a1, kmax: b1 }, RangeSet::Grid { ratio: r2, kmin: a2, kmax: b2 }) => {
                r1 == r2
                    && a2.is_none_or(|lo| a1.is_some_and(|x| x >= lo))
                    && b2.is_none_or(|hi| b1.is_some_and(|x| x <= hi))
            }
            _ => false,
        }
    }
}

impl std::fmt::Display for RangeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RangeSet::Finite(vs) => {
                let items: Vec<String> = vs.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            RangeSet::Grid { ratio, kmin, kmax } => {
                let lo = kmin.map_or("-inf".to_string(), |k| k.to_string());
                let hi = kmax.map_or("+inf".to_string(), |k| k.to_string());
                write!(f, "grid({ratio}^k, k in [{lo}, {hi}])")
            }
            RangeSet::Dyadic => f.write_str("dyadic"),
            RangeSet::All => f.write_str("all"),
        }
    }
}

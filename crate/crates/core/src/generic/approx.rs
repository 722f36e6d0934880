//! Moving the values of a finite ultrametric into a smaller range set `T`
//! by an increasing relabelling of the realized distances.

use crate::error::{Error, Result};
use crate::space::{d_distance, FiniteUltrametricSpace};
use crate::values::{RangeSet, Value};

/// Largest dyadic refinement tried when stepping above a previous choice.
const MAX_EXTRA_LEVELS: i64 = 256;

fn pick(t: &RangeSet, a: &Value, prev: &Value, eps: &Value) -> Option<Value> {
    let hi = a.add(eps);
    match t {
        RangeSet::All => Some(a.clone()).filter(|q| q > prev),
        RangeSet::Dyadic => {
            if a.is_dyadic() && a > prev {
                return Some(a.clone());
            }
            let base = a.join(prev);
            let k0 = RangeSet::dyadic_level_below(eps);
            (k0..k0 + MAX_EXTRA_LEVELS)
                .map(|k| RangeSet::dyadic_above(&base, k))
                .find(|q| *q < hi)
        }
        RangeSet::Finite(_) | RangeSet::Grid { .. } => {
            let lo = a.checked_sub(eps).unwrap_or_else(Value::zero).join(prev);
            t.least_in_open(&lo, &hi)
        }
    }
}

/// `T`-valued `e` with `|d − e| < ε` everywhere and the same order of
/// distances: the realized values `a₁ < … < a_m` go to `q₁ < … < q_m` in
/// `T₊`, chosen greedily from below.
///
/// If `d` is already `T`-valued it is returned unchanged (over `T`).
pub fn t_approx(x: &FiniteUltrametricSpace, t: &RangeSet, eps: &Value) -> Result<FiniteUltrametricSpace> {
    if !eps.is_positive() {
        return Err(Error::NonPositive(eps.clone()));
    }
    let values = x.realized_values();
    if values.iter().all(|a| t.contains(a)) {
        return x.with_range_set(t);
    }
    let mut chosen: Vec<(Value, Value)> = Vec::with_capacity(values.len());
    let mut prev = Value::zero();
    for a in values.iter().filter(|a| a.is_positive()) {
        let q = pick(t, a, &prev, eps).ok_or_else(|| Error::ApproximationImpossible(a.clone()))?;
        prev = q.clone();
        chosen.push((a.clone(), q));
    }
    let map = |d: &Value| -> Value {
        if d.is_zero() {
            return Value::zero();
        }
        let k = chosen.binary_search_by(|(a, _)| a.cmp(d)).expect("realized value");
        chosen[k].1.clone()
    };
    let e = FiniteUltrametricSpace::from_fn(x.labels(), t, |i, j| map(x.d(i, j)))?;
    let gap = d_distance(x, &e)?;
    if gap >= *eps {
        return Err(Error::VerificationFailed(format!("sup-difference {gap} is not below {eps}")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::v;

    fn pair_space(a: &str, b: &str, s: &RangeSet) -> FiniteUltrametricSpace {
        FiniteUltrametricSpace::from_fn(["x", "y", "z"], s, |i, j| if (i, j) == (0, 1) { v(a) } else { v(b) }).unwrap()
    }

    #[test]
    fn already_in_target() {
        let x = pair_space("1/2", "1", &RangeSet::All);
        let e = t_approx(&x, &RangeSet::Dyadic, &v("1/100")).unwrap();
        assert_eq!(e.rows(), x.rows());
        assert_eq!(e.range_set(), &RangeSet::Dyadic);
    }

    #[test]
    fn dyadic_example() {
        let x = pair_space("1/3", "1", &RangeSet::All);
        let e = t_approx(&x, &RangeSet::Dyadic, &v("1/10")).unwrap();
        assert_eq!(e.distance("x", "y").unwrap(), &v("3/8"));
        assert_eq!(e.distance("x", "z").unwrap(), &v("1"));
    }

    #[test]
    fn close_values_stay_ordered() {
        let x = pair_space("1/3", "17/50", &RangeSet::All);
        let e = t_approx(&x, &RangeSet::Dyadic, &v("1/10")).unwrap();
        assert!(e.distance("x", "y").unwrap() < e.distance("x", "z").unwrap());
    }

    #[test]
    fn sparse_target_fails() {
        let x = pair_space("1", "2", &RangeSet::All);
        let t = RangeSet::finite([v("1"), v("5")]);
        assert!(matches!(t_approx(&x, &t, &v("1/2")), Err(Error::ApproximationImpossible(a)) if a == v("2")));
    }
}

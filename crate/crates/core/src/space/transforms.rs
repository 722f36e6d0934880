use indexmap::IndexSet;

use super::FiniteUltrametricSpace;
use crate::error::{Error, Result};
use crate::values::{RangeSet, StepFunction, Value};

/// The canonical space on a finite range set: points are the values and
/// `d(x, y) = x ∨ y` off the diagonal, so the realized distances are `S`.
pub fn dlps_space(s: &RangeSet) -> Result<FiniteUltrametricSpace> {
    let RangeSet::Finite(values) = s else {
        return Err(Error::InvalidArgument("canonical space needs a finite range set".into()));
    };
    FiniteUltrametricSpace::from_fn(values.iter().map(Value::to_string), s, |i, j| {
        values[i].join(&values[j])
    })
}

/// Pointwise `min(d, ε)`.
pub fn truncate(x: &FiniteUltrametricSpace, eps: &Value) -> Result<FiniteUltrametricSpace> {
    if !x.range_set().contains_positive(eps) {
        return Err(Error::NotPositiveElement(eps.clone()));
    }
    FiniteUltrametricSpace::from_fn(x.labels(), x.range_set(), |i, j| x.d(i, j).meet(eps))
}

/// The sup-product `d ×∞ e` on `X × Y`; points are labelled `(x,y)`.
pub fn sup_product(x: &FiniteUltrametricSpace, y: &FiniteUltrametricSpace) -> Result<FiniteUltrametricSpace> {
    if x.range_set() != y.range_set() {
        return Err(Error::RangeSetMismatch);
    }
    let m = y.len();
    let labels: Vec<String> = x
        .labels()
        .flat_map(|a| y.labels().map(move |b| format!("({a},{b})")))
        .collect();
    FiniteUltrametricSpace::from_fn(labels, x.range_set(), |p, q| {
        x.d(p / m, q / m).join(y.d(p % m, q % m))
    })
}

/// The induced subspace, in the order the subset lists its points.
pub fn restrict<L: AsRef<str>>(x: &FiniteUltrametricSpace, subset: &[L]) -> Result<FiniteUltrametricSpace> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut seen = IndexSet::new();
    for l in subset {
        let i = x.require_index(l.as_ref())?;
        if !seen.insert(i) {
            return Err(Error::DuplicateLabel(l.as_ref().to_string()));
        }
    }
    let idx: Vec<usize> = seen.into_iter().collect();
    FiniteUltrametricSpace::from_fn_unchecked(idx.iter().map(|&i| x.label(i)), x.range_set(), |a, b| {
        x.d(idx[a], idx[b]).clone()
    })
}

/// `ψ ∘ d` over the same range set.
pub fn psi_apply(psi: &StepFunction, x: &FiniteUltrametricSpace) -> Result<FiniteUltrametricSpace> {
    psi_apply_into(psi, x, x.range_set())
}

/// `ψ ∘ d` with values checked against `target`.
pub fn psi_apply_into(
    psi: &StepFunction,
    x: &FiniteUltrametricSpace,
    target: &RangeSet,
) -> Result<FiniteUltrametricSpace> {
    if !psi.validate() {
        return Err(Error::InvalidStepFunction(
            "must be increasing, amenable and continuous at 0".into(),
        ));
    }
    FiniteUltrametricSpace::from_fn(x.labels(), target, |i, j| psi.eval(x.d(i, j)))
}

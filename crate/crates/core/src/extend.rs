//! Extension and interpolation of prescribed ultrametrics on disjoint
//! subsets, with the bound `sup ≤ UD(m, d) ≤ η ≤ C · sup` where `sup` is the
//! largest `UD(eᵢ, d|Aᵢ)`.
//!
//! On a finite space every map is continuous, so the selection step of the
//! general argument is the explicit map `τ̂`: copies for points of the
//! subsets, identity elsewhere. The extension is then
//! `m(x, y) = h(τ̂x, τ̂y) ∨ l(x, y)` with `h` the key amalgam and `l` an
//! auxiliary extension capped at `η`.

use serde::{Deserialize, Serialize};

use crate::amalgam::{amalgam_disjoint, check_family, family_amalgam, key_amalgam, Prescription};
use crate::error::{Error, Result};
use crate::space::{restrict, truncate, ud_distance, FiniteUltrametricSpace, RawSpace, UdValue};
use crate::values::Value;

#[derive(Clone, Debug)]
pub struct InterpolationProblem {
    pub ambient: FiniteUltrametricSpace,
    pub family: Vec<Prescription>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationResult {
    pub m: FiniteUltrametricSpace,
    /// `None` when every prescription already agrees with `d`.
    pub eta: Option<Value>,
    /// `sup_i UD(eᵢ, d|Aᵢ)`.
    pub lower: Value,
    /// `C · lower`.
    pub upper: Value,
    /// `UD(m, d)`.
    pub ud: Value,
    /// `η / lower`.
    pub achieved_ratio: Option<Value>,
    pub trace: Vec<String>,
}

fn finite(ud: UdValue) -> Value {
    ud.finite().cloned().expect("finite spaces have finite UD")
}

/// Largest `UD(eᵢ, d|Aᵢ)` over the family.
pub fn family_discrepancy(x: &FiniteUltrametricSpace, family: &[Prescription]) -> Result<Value> {
    let mut sup = Value::zero();
    for p in family {
        let ud = finite(ud_distance(&restrict(x, &p.subset)?, &p.metric)?);
        sup = sup.join(&ud);
    }
    Ok(sup)
}

impl InterpolationProblem {
    pub fn new(ambient: FiniteUltrametricSpace, family: Vec<Prescription>) -> Result<Self> {
        check_family(&ambient, &family)?;
        Ok(InterpolationProblem { ambient, family })
    }
}

/// Interpolates the family into one ultrametric on the ambient points.
pub fn interpolate(p: &InterpolationProblem) -> Result<InterpolationResult> {
    let x = &p.ambient;
    let s = x.range_set();
    check_family(x, &p.family)?;
    let sup = family_discrepancy(x, &p.family)?;
    if sup.is_zero() {
        return Ok(InterpolationResult {
            m: x.clone(),
            eta: None,
            lower: Value::zero(),
            upper: Value::zero(),
            ud: Value::zero(),
            achieved_ratio: None,
            trace: vec!["every prescription agrees with d".into()],
        });
    }
    let c = s.quasi_completeness_constant();
    let eta = s.round_up(&sup)?;
    let mut trace = vec![format!("eta = round_up({sup}) = {eta}")];

    let h = key_amalgam(x, &p.family, &eta)?;
    trace.push(format!("key amalgam on {} points", h.space.len()));
    let hat: Vec<usize> = x
        .labels()
        .map(|l| {
            let target = (1..h.embeddings.len()).find_map(|k| h.image(k, l)).unwrap_or(l);
            h.space.index_of(target).expect("embedded point")
        })
        .collect();

    let pieces: Vec<FiniteUltrametricSpace> = p.family.iter().map(|q| q.metric.clone()).collect();
    let k = family_amalgam(&pieces, &eta)?.space;
    let rest: Vec<&str> = x.labels().filter(|l| !k.contains_label(l)).collect();
    let r = if rest.is_empty() {
        k
    } else {
        let base = restrict(x, &rest)?;
        let floor = s.round_up(&eta.join(&k.diameter()).join(&x.diameter()))?;
        trace.push(format!("auxiliary extension with floor {floor}"));
        amalgam_disjoint(&k, &base, &floor)?.space
    };
    let l = truncate(&r, &eta)?;
    let li: Vec<usize> = x.labels().map(|lab| l.index_of(lab).unwrap()).collect();

    let m = FiniteUltrametricSpace::from_fn(x.labels(), s, |i, j| {
        h.space.d(hat[i], hat[j]).join(l.d(li[i], li[j]))
    })?;

    for q in &p.family {
        if restrict(&m, &q.subset)?.rows() != restrict(&q.metric, &q.subset)?.rows() {
            return Err(Error::VerificationFailed(format!(
                "m does not restrict to the prescription on {:?}",
                q.subset
            )));
        }
    }
    let ud = finite(ud_distance(&m, x)?);
    let upper = c.mul(&sup);
    if !(sup <= ud && ud <= eta && eta <= upper) {
        return Err(Error::VerificationFailed(format!(
            "sandwich {sup} <= {ud} <= {eta} <= {upper} fails"
        )));
    }
    trace.push(format!("UD(m, d) = {ud}"));
    Ok(InterpolationResult {
        m,
        achieved_ratio: Some(eta.div(&sup)),
        eta: Some(eta),
        lower: sup,
        upper,
        ud,
        trace,
    })
}

/// Extends `e` on `A` to the whole space; `A = ∅` returns `d`.
pub fn extend_from_subset(x: &FiniteUltrametricSpace, e: &FiniteUltrametricSpace) -> Result<FiniteUltrametricSpace> {
    if e.is_empty() {
        return Ok(x.clone());
    }
    let p = InterpolationProblem::new(x.clone(), vec![Prescription::new(e.clone())])?;
    Ok(interpolate(&p)?.m)
}

/// JSON form: `{"ambient": space, "family": [{"subset": [...], "matrix": [[...]]}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemJson {
    pub ambient: RawSpace,
    pub family: Vec<PrescriptionJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrescriptionJson {
    pub subset: Vec<String>,
    pub matrix: Vec<Vec<Value>>,
}

impl ProblemJson {
    pub fn into_problem(self, fallback: Option<&crate::values::RangeSet>) -> Result<InterpolationProblem> {
        let ambient = self.ambient.into_space(fallback)?;
        let family = self
            .family
            .into_iter()
            .map(|p| {
                let metric = crate::space::validate(p.subset.clone(), &p.matrix, ambient.range_set())?;
                Ok(Prescription {
                    subset: p.subset,
                    metric,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        InterpolationProblem::new(ambient, family)
    }
}

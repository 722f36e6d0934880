//! Patching the tail of a telescope into an anti-doubling one while moving
//! the metric by at most `ε` in `UD`.
//!
//! The tail `L` is the limit point together with every block whose radius
//! is at most `ε`. Points outside `L` sit at distance `r(N+i) > ε` from all
//! of `L`, so any ultrametric on `L` of diameter at most `r(N+i₀)` can be
//! put in place of `d|L²` without breaking the strong triangle inequality.
//! The replacement regroups the tail points into equidistant clusters of
//! sizes `2, 3, 4, …` at radii `r(N+i₀), r(N+i₀+1), …`.

use serde::Serialize;

use super::doubling::{DoublingCheck, Witness};
use crate::error::{Error, Result};
use crate::space::{ud_distance, UdValue};
use crate::telescope::{LazyUltrametric, TPoint, TelescopeSpace};
use crate::values::{RangeSet, Value};

/// Longest scan for a block with radius below `ε`.
const MAX_TAIL_SEARCH: u64 = 1 << 20;

/// Extra blocks past the tail start included in certificate prefixes.
pub const PREFIX_MARGIN: u64 = 8;

/// The telescope metric with its tail replaced.
#[derive(Clone, Debug)]
pub struct PerturbedTelescope {
    base: TelescopeSpace,
    eps: Value,
    tail_block: u64,
}

/// First tail position of cluster `k` (from 1): clusters have sizes
/// `2, 3, …`, so `start(k) = (k−1)(k+2)/2`.
fn cluster_start(k: u64) -> u64 {
    (k - 1) * (k + 2) / 2
}

fn cluster_of(pos: u64) -> u64 {
    let mut k = 1;
    while cluster_start(k + 1) <= pos {
        k += 1;
    }
    k
}

impl PerturbedTelescope {
    pub fn base(&self) -> &TelescopeSpace {
        &self.base
    }

    pub fn eps(&self) -> &Value {
        &self.eps
    }

    /// Index of the first block inside the tail.
    pub fn tail_block(&self) -> u64 {
        self.tail_block
    }

    /// Radius of cluster `k`.
    pub fn cluster_radius(&self, k: u64) -> Value {
        self.base.radius(self.tail_block + k - 1)
    }

    /// Points of cluster `k` (size `k + 1`).
    pub fn cluster(&self, k: u64) -> Result<Vec<TPoint>> {
        let start = cluster_start(k);
        (start..start + k + 1).map(|p| self.base.locate(self.tail_block, p)).collect()
    }

    fn cluster_index(&self, p: TPoint) -> Result<Option<u64>> {
        Ok(self.base.position(self.tail_block, p)?.map(cluster_of))
    }

    fn in_tail(&self, p: TPoint) -> bool {
        match p {
            TPoint::Limit => true,
            TPoint::In(i, _) => i >= self.tail_block,
        }
    }
}

impl LazyUltrametric for PerturbedTelescope {
    fn range_set(&self) -> &RangeSet {
        self.base.range_set()
    }

    fn dist(&self, p: TPoint, q: TPoint) -> Result<Value> {
        if !(self.in_tail(p) && self.in_tail(q)) {
            return self.base.dist(p, q);
        }
        if p == q {
            return Ok(Value::zero());
        }
        Ok(match (self.cluster_index(p)?, self.cluster_index(q)?) {
            (None, Some(k)) | (Some(k), None) => self.cluster_radius(k),
            (Some(a), Some(b)) => self.cluster_radius(a.min(b)),
            (None, None) => unreachable!("only one limit point"),
        })
    }

    fn label(&self, p: TPoint) -> Result<String> {
        self.base.label(p)
    }

    fn parse_label(&self, label: &str) -> Result<TPoint> {
        self.base.parse_label(label)
    }

    fn prefix_points(&self, k: u64) -> Result<Vec<TPoint>> {
        self.base.prefix_points(k)
    }
}

/// Exact `(card, α, δ)` of a point set under a lazy metric.
pub fn lazy_alpha_delta<M: LazyUltrametric>(m: &M, pts: &[TPoint]) -> Result<(Value, Value)> {
    let mut sep: Option<Value> = None;
    let mut delta = Value::zero();
    for (a, &p) in pts.iter().enumerate() {
        for &q in &pts[a + 1..] {
            let d = m.dist(p, q)?;
            if sep.as_ref().is_none_or(|s| d < *s) {
                sep = Some(d.clone());
            }
            delta = delta.join(&d);
        }
    }
    sep.map(|s| (s, delta)).ok_or(Error::TooSmall)
}

fn verified_witness<M: LazyUltrametric>(m: &M, q: &DoublingCheck, pts: &[TPoint]) -> Result<Option<Witness>> {
    let (alpha, delta) = lazy_alpha_delta(m, pts)?;
    let w = Witness {
        parameter: q.clone(),
        points: pts.iter().map(|&p| m.label(p)).collect::<Result<_>>()?,
        card: pts.len(),
        alpha,
        delta,
    };
    Ok(w.recheck().then_some(w))
}

/// Witnesses in a telescope: for each parameter, the first block with
/// more than `C + 1` points, checked exactly.
pub fn telescope_anti_doubling_witness(t: &TelescopeSpace, grid: &[DoublingCheck]) -> Result<Vec<Witness>> {
    grid.iter()
        .map(|q| {
            let (_, pts) = t.first_block_of_size(q.equidistant_witness_size())?;
            verified_witness(t, q, &pts)?.ok_or(Error::NoWitnessFound)
        })
        .collect()
}

/// Witnesses in a perturbed telescope: the first tail cluster with more
/// than `C + 1` points.
pub fn perturbed_anti_doubling_witness(m: &PerturbedTelescope, grid: &[DoublingCheck]) -> Result<Vec<Witness>> {
    grid.iter()
        .map(|q| {
            let k = q.equidistant_witness_size() as u64 - 1;
            let pts = m.cluster(k)?;
            verified_witness(m, q, &pts)?.ok_or(Error::NoWitnessFound)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbCertificate {
    pub eps: Value,
    pub tail_block: u64,
    /// `r(N + i₀)`, the diameter of the tail under both metrics.
    pub tail_diameter: Value,
    pub prefix_blocks: u64,
    pub prefix_points: usize,
    /// `UD(d, m)` on the prefix.
    pub prefix_ud: Value,
    pub witnesses: Vec<Witness>,
}

/// Replaces the tail of `t` at scale `ε` by an anti-doubling telescope
/// metric, and certifies the result on a finite prefix and on a witness
/// for every parameter of `grid`.
pub fn genericity_perturb(
    t: &TelescopeSpace,
    eps: &Value,
    grid: &[DoublingCheck],
) -> Result<(PerturbedTelescope, PerturbCertificate)> {
    if !t.range_set().contains_positive(eps) {
        return Err(Error::NotPositiveElement(eps.clone()));
    }
    let tail_block = (1..=MAX_TAIL_SEARCH)
        .find(|&i| t.radius(i) <= *eps)
        .ok_or_else(|| Error::TailNotFound(eps.clone()))?;
    let m = PerturbedTelescope {
        base: t.clone(),
        eps: eps.clone(),
        tail_block,
    };

    let prefix_blocks = tail_block + PREFIX_MARGIN;
    let d_prefix = t.finite_prefix(prefix_blocks)?;
    let m_prefix = m.finite_prefix(prefix_blocks)?;
    let prefix_ud = match ud_distance(&d_prefix, &m_prefix)? {
        UdValue::Finite(u) => u,
        UdValue::Infinity => unreachable!("finite prefixes"),
    };
    if prefix_ud > *eps {
        return Err(Error::BoundViolation {
            ud: prefix_ud.into(),
            bound: eps.clone().into(),
        });
    }
    let witnesses = perturbed_anti_doubling_witness(&m, grid)?;
    let cert = PerturbCertificate {
        eps: eps.clone(),
        tail_block,
        tail_diameter: t.radius(tail_block),
        prefix_blocks,
        prefix_points: m_prefix.len(),
        prefix_ud,
        witnesses,
    };
    Ok((m, cert))
}

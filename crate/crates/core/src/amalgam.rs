//! Amalgams: disjoint unions with a separation floor, gluing along a shared
//! subset, the pullback copy of a space carrying a second metric, and the
//! combined "key" amalgam used by interpolation.
//!
//! Every `inf` in the cross formulas is a finite minimum here.

use indexmap::{IndexMap, IndexSet};
use serde::Serialize;

use crate::error::{Error, Hypothesis, Result};
use crate::space::{restrict, ud_distance, FiniteUltrametricSpace, UdValue};
use crate::values::{RangeSet, Value};

/// An amalgamated space plus, for each input, the map from its labels to
/// labels of the result.
#[derive(Clone, Debug, Serialize)]
pub struct AmalgamResult {
    pub space: FiniteUltrametricSpace,
    pub embeddings: Vec<IndexMap<String, String>>,
}

impl AmalgamResult {
    /// True iff the result restricted along embedding `k` is `input`,
    /// entry by entry.
    pub fn restricts_to(&self, k: usize, input: &FiniteUltrametricSpace) -> bool {
        let Some(map) = self.embeddings.get(k) else {
            return false;
        };
        if map.len() != input.len() {
            return false;
        }
        let idx: Option<Vec<usize>> = input
            .labels()
            .map(|l| map.get(l).and_then(|t| self.space.index_of(t)))
            .collect();
        let Some(idx) = idx else {
            return false;
        };
        (0..input.len()).all(|i| (0..input.len()).all(|j| self.space.d(idx[i], idx[j]) == input.d(i, j)))
    }

    /// Result label of input `k`'s point `label`.
    pub fn image(&self, k: usize, label: &str) -> Option<&str> {
        self.embeddings.get(k)?.get(label).map(String::as_str)
    }
}

fn identity_map(x: &FiniteUltrametricSpace) -> IndexMap<String, String> {
    x.labels().map(|l| (l.to_string(), l.to_string())).collect()
}

fn require_positive(s: &RangeSet, r: &Value) -> Result<()> {
    if s.contains_positive(r) {
        Ok(())
    } else {
        Err(Error::NotPositiveElement(r.clone()))
    }
}

fn same_range_set(x: &FiniteUltrametricSpace, y: &FiniteUltrametricSpace) -> Result<()> {
    if x.range_set() == y.range_set() {
        Ok(())
    } else {
        Err(Error::RangeSetMismatch)
    }
}

/// Disjoint amalgam with cross distances `r ∨ d_X(x, x₀) ∨ d_Y(y₀, y)`,
/// `x₀`, `y₀` the first points of `X`, `Y`.
///
/// All cross distances are at least `r`. For `x, x'` in `X` and `y` in `Y`
/// the two cross legs differ only in `d_X(x,x₀)` vs `d_X(x',x₀)`, and the
/// strong triangle inequality on `X` closes every mixed triangle.
pub fn amalgam_disjoint(x: &FiniteUltrametricSpace, y: &FiniteUltrametricSpace, r: &Value) -> Result<AmalgamResult> {
    same_range_set(x, y)?;
    require_positive(x.range_set(), r)?;
    let n = x.len();
    let labels: Vec<&str> = x.labels().chain(y.labels()).collect();
    let space = FiniteUltrametricSpace::from_fn(labels, x.range_set(), |i, j| match (i < n, j < n) {
        (true, true) => x.d(i, j).clone(),
        (false, false) => y.d(i - n, j - n).clone(),
        (true, false) => r.join(x.d(i, 0)).join(y.d(0, j - n)),
        (false, true) => unreachable!("i < j"),
    })?;
    Ok(AmalgamResult {
        space,
        embeddings: vec![identity_map(x), identity_map(y)],
    })
}

/// Adds a fresh point `o` with `D(x, o) = s ∨ d(x, x₀)`.
pub fn one_point_extend(x: &FiniteUltrametricSpace, o: &str, s: &Value) -> Result<AmalgamResult> {
    if x.contains_label(o) {
        return Err(Error::DuplicateLabel(o.to_string()));
    }
    let single = FiniteUltrametricSpace::singleton(o, x.range_set());
    amalgam_disjoint(x, &single, s)
}

/// Glues `X` and `Y` along their shared labels `Z`.
///
/// Requires `Z ≠ ∅`, `d_X = d_Y` on `Z²`, and `min_{z∈Z} d_X(x, z) = s` for
/// every `x ∈ X∖Z`. The result lists `X` first, then `Y∖Z`; cross distances
/// are `min_{z∈Z} d_X(x, z) ∨ d_Y(z, y)`.
pub fn glue_over_intersection(
    x: &FiniteUltrametricSpace,
    y: &FiniteUltrametricSpace,
    s: &Value,
) -> Result<AmalgamResult> {
    same_range_set(x, y)?;
    require_positive(x.range_set(), s)?;
    let zx: Vec<usize> = (0..x.len()).filter(|&i| y.contains_label(x.label(i))).collect();
    if zx.is_empty() {
        return Err(Error::HypothesisViolation {
            which: Hypothesis::NonEmptyIntersection,
            detail: "the spaces share no point".into(),
        });
    }
    let zy: Vec<usize> = zx.iter().map(|&i| y.index_of(x.label(i)).unwrap()).collect();
    for a in 0..zx.len() {
        for b in a + 1..zx.len() {
            if x.d(zx[a], zx[b]) != y.d(zy[a], zy[b]) {
                return Err(Error::HypothesisViolation {
                    which: Hypothesis::Agreement,
                    detail: format!(
                        "d_X({0},{1}) = {2} but d_Y({0},{1}) = {3}",
                        x.label(zx[a]),
                        x.label(zx[b]),
                        x.d(zx[a], zx[b]),
                        y.d(zy[a], zy[b])
                    ),
                });
            }
        }
    }
    for i in 0..x.len() {
        if zx.contains(&i) {
            continue;
        }
        let gap = zx.iter().map(|&z| x.d(i, z)).min().unwrap();
        if gap != s {
            return Err(Error::HypothesisViolation {
                which: Hypothesis::Equidistance,
                detail: format!("{} is at distance {gap} from the shared subset, not {s}", x.label(i)),
            });
        }
    }
    let rest: Vec<usize> = (0..y.len()).filter(|&j| !x.contains_label(y.label(j))).collect();
    let n = x.len();
    let labels: Vec<&str> = x.labels().chain(rest.iter().map(|&j| y.label(j))).collect();
    let space = FiniteUltrametricSpace::from_fn(labels, x.range_set(), |i, j| match (i < n, j < n) {
        (true, true) => x.d(i, j).clone(),
        (false, false) => y.d(rest[i - n], rest[j - n]).clone(),
        (true, false) => {
            let yj = rest[j - n];
            zx.iter()
                .zip(&zy)
                .map(|(&zi, &zj)| x.d(i, zi).join(y.d(zj, yj)))
                .min()
                .unwrap()
        }
        (false, true) => unreachable!("i < j"),
    })?;
    Ok(AmalgamResult {
        space,
        embeddings: vec![identity_map(x), identity_map(y)],
    })
}

/// Smallest run of primes that makes every copied label fresh.
fn copy_suffix(labels: &[&str], taken: impl Fn(&str) -> bool) -> String {
    let mut suffix = String::from("'");
    while labels.iter().any(|l| taken(&format!("{l}{suffix}"))) {
        suffix.push('\'');
    }
    suffix
}

fn copy_amalgam_avoiding(
    d: &FiniteUltrametricSpace,
    e: &FiniteUltrametricSpace,
    r: &Value,
    taken: impl Fn(&str) -> bool,
) -> Result<AmalgamResult> {
    same_range_set(d, e)?;
    require_positive(d.range_set(), r)?;
    let ud = ud_distance(d, e)?;
    if ud > UdValue::Finite(r.clone()) {
        return Err(Error::BoundViolation {
            ud: ud.finite().cloned().unwrap_or_else(Value::zero).into(),
            bound: r.clone().into(),
        });
    }
    let n = d.len();
    let base: Vec<&str> = d.labels().collect();
    let suffix = copy_suffix(&base, |l| taken(l) || d.contains_label(l));
    let copies: Vec<String> = base.iter().map(|l| format!("{l}{suffix}")).collect();
    // `e` re-indexed to `d`'s point order.
    let perm: Vec<usize> = base.iter().map(|l| e.index_of(l).unwrap()).collect();
    let ed = |a: usize, b: usize| e.d(perm[a], perm[b]);
    let labels: Vec<&str> = base.iter().copied().chain(copies.iter().map(String::as_str)).collect();
    let space = FiniteUltrametricSpace::from_fn(labels, d.range_set(), |i, j| match (i < n, j < n) {
        (true, true) => d.d(i, j).clone(),
        (false, false) => ed(i - n, j - n).clone(),
        (true, false) => (0..n)
            .map(|a| d.d(i, a).join(r).join(ed(a, j - n)))
            .min()
            .unwrap(),
        (false, true) => unreachable!("i < j"),
    })?;
    let copy_map = base
        .iter()
        .zip(&copies)
        .map(|(l, c)| (l.to_string(), c.clone()))
        .collect();
    Ok(AmalgamResult {
        space,
        embeddings: vec![identity_map(d), copy_map],
    })
}

/// `X` carrying `d`, glued to a copy `τX` carrying `e`, with
/// `h(x, τy) = min_a d(x,a) ∨ r ∨ e(a,y)`; in particular `h(x, τx) = r`.
///
/// Copies are labelled `x'` (more primes if needed for freshness).
/// Requires `UD(d, e) ≤ r`.
pub fn copy_amalgam(d: &FiniteUltrametricSpace, e: &FiniteUltrametricSpace, r: &Value) -> Result<AmalgamResult> {
    copy_amalgam_avoiding(d, e, r, |_| false)
}

/// Left fold of [`amalgam_disjoint`] with floor `s`.
pub fn family_amalgam(spaces: &[FiniteUltrametricSpace], s: &Value) -> Result<AmalgamResult> {
    let (first, rest) = spaces
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    require_positive(first.range_set(), s)?;
    let mut seen: IndexSet<&str> = IndexSet::new();
    for x in spaces {
        for l in x.labels() {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
    }
    let mut acc = first.clone();
    for x in rest {
        acc = amalgam_disjoint(&acc, x, s)?.space;
    }
    Ok(AmalgamResult {
        space: acc,
        embeddings: spaces.iter().map(identity_map).collect(),
    })
}

/// One prescribed metric on a subset of the ambient space.
#[derive(Clone, Debug)]
pub struct Prescription {
    pub subset: Vec<String>,
    pub metric: FiniteUltrametricSpace,
}

impl Prescription {
    /// `metric`'s labels define the subset.
    pub fn new(metric: FiniteUltrametricSpace) -> Self {
        Prescription {
            subset: metric.labels().map(str::to_string).collect(),
            metric,
        }
    }
}

/// Checks pairwise disjointness and that every subset lies in `x`.
pub(crate) fn check_family(x: &FiniteUltrametricSpace, family: &[Prescription]) -> Result<()> {
    let mut seen: IndexSet<&str> = IndexSet::new();
    for p in family {
        if p.subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        if p.subset.len() != p.metric.len() || p.subset.iter().any(|l| !p.metric.contains_label(l)) {
            return Err(Error::PointSetMismatch);
        }
        for l in &p.subset {
            x.require_index(l)?;
            if !seen.insert(l) {
                return Err(Error::DisjointnessViolation(l.clone()));
            }
        }
        if p.metric.range_set() != x.range_set() {
            return Err(Error::RangeSetMismatch);
        }
    }
    Ok(())
}

/// The amalgam on `X ⊔ ∐Bᵢ` where `Bᵢ` is a copy of `Aᵢ` carrying `eᵢ`:
/// `h|X² = d`, `h|Bᵢ² = eᵢ`, and `h(a, τa) = η` for every `a ∈ ∐Aᵢ`.
///
/// Each subset is handled in turn: the copy amalgam of `(d|Aᵢ, eᵢ)` at `η`
/// is glued onto the space built so far along `Aᵢ`. Points are then listed
/// as `X`, `B₁`, `B₂`, …. Embedding `0` is the identity on `X`; embedding
/// `i + 1` is the copy map `τ` on `Aᵢ`.
pub fn key_amalgam(x: &FiniteUltrametricSpace, family: &[Prescription], eta: &Value) -> Result<AmalgamResult> {
    require_positive(x.range_set(), eta)?;
    check_family(x, family)?;
    let mut current = x.clone();
    let mut copy_maps = Vec::with_capacity(family.len());
    for p in family {
        let di = restrict(x, &p.subset)?;
        let piece = copy_amalgam_avoiding(&di, &p.metric, eta, |l| current.contains_label(l))?;
        current = glue_over_intersection(&piece.space, &current, eta)?.space;
        copy_maps.push(piece.embeddings[1].clone());
    }
    let order: Vec<String> = x
        .labels()
        .map(str::to_string)
        .chain(copy_maps.iter().flat_map(|m| m.values().cloned()))
        .collect();
    let space = restrict(&current, &order)?;

    let z: Vec<usize> = family
        .iter()
        .flat_map(|p| p.subset.iter().map(|l| space.index_of(l).unwrap()))
        .collect();
    for m in &copy_maps {
        for (a, b) in m {
            let ib = space.index_of(b).unwrap();
            let ia = space.index_of(a).unwrap();
            let gap = z.iter().map(|&k| space.d(ib, k)).min().unwrap();
            if space.d(ia, ib) != eta || gap != eta {
                return Err(Error::VerificationFailed(format!("copy {b} is not at distance {eta} from the subsets")));
            }
        }
    }

    let mut embeddings = vec![identity_map(x)];
    embeddings.extend(copy_maps);
    Ok(AmalgamResult { space, embeddings })
}

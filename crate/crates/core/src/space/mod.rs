//! Finite `S`-valued ultrametric spaces.

mod io;
mod metrics;
mod transforms;

use indexmap::IndexSet;

use crate::error::{Error, Result};
use crate::values::{RangeSet, Value};

pub use io::{RawSpace, SpaceJson};
pub use metrics::{d_distance, isosceles_witness, u_s_distance, ud_distance, UdValue, UltrametricPair};
pub use transforms::{dlps_space, psi_apply, psi_apply_into, restrict, sup_product, truncate};

/// A labelled point set with a validated `S`-valued ultrametric.
///
/// Points keep their input order; every tie-break elsewhere in the crate
/// uses that order. The matrix is stored row-major and full.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteUltrametricSpace {
    points: IndexSet<String>,
    dist: Vec<Value>,
    range_set: RangeSet,
}

pub type Space = FiniteUltrametricSpace;

fn collect_labels<I, L>(labels: I) -> Result<IndexSet<String>>
where
    I: IntoIterator<Item = L>,
    L: Into<String>,
{
    let mut set = IndexSet::new();
    for l in labels {
        let l = l.into();
        if !set.insert(l.clone()) {
            return Err(Error::DuplicateLabel(l));
        }
    }
    if set.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(set)
}

/// Checks a raw matrix and returns the validated space.
///
/// Checks run in a fixed order (shape, diagonal, symmetry, positivity,
/// range-set membership, strong triangle inequality) and report the first
/// offending entry in point order.
pub fn validate<L: Into<String>>(
    points: impl IntoIterator<Item = L>,
    dist: &[Vec<Value>],
    range_set: &RangeSet,
) -> Result<FiniteUltrametricSpace> {
    let points = collect_labels(points)?;
    let n = points.len();
    if dist.len() != n || dist.iter().any(|row| row.len() != n) {
        return Err(Error::Shape { expected: n });
    }
    let flat: Vec<Value> = dist.iter().flatten().cloned().collect();
    let space = FiniteUltrametricSpace {
        points,
        dist: flat,
        range_set: range_set.clone(),
    };
    space.check()?;
    Ok(space)
}

impl FiniteUltrametricSpace {
    /// Builds and validates a space from a distance function on indices.
    pub fn from_fn<L, F>(labels: impl IntoIterator<Item = L>, range_set: &RangeSet, f: F) -> Result<Self>
    where
        L: Into<String>,
        F: FnMut(usize, usize) -> Value,
    {
        let space = Self::from_fn_unchecked(labels, range_set, f)?;
        space.check()?;
        Ok(space)
    }

    /// Like [`from_fn`](Self::from_fn) but only checks the labels; `f` is
    /// evaluated on `i < j` and mirrored.
    pub(crate) fn from_fn_unchecked<L, F>(
        labels: impl IntoIterator<Item = L>,
        range_set: &RangeSet,
        mut f: F,
    ) -> Result<Self>
    where
        L: Into<String>,
        F: FnMut(usize, usize) -> Value,
    {
        let points = collect_labels(labels)?;
        let n = points.len();
        let mut dist = vec![Value::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let x = f(i, j);
                dist[i * n + j] = x.clone();
                dist[j * n + i] = x;
            }
        }
        Ok(FiniteUltrametricSpace {
            points,
            dist,
            range_set: range_set.clone(),
        })
    }

    /// `n` labelled points at mutual distance `value`.
    ///
    /// Only membership of `value` is checked: an equidistant set always
    /// satisfies the strong triangle inequality.
    pub fn equidistant<L: Into<String>>(
        labels: impl IntoIterator<Item = L>,
        value: &Value,
        range_set: &RangeSet,
    ) -> Result<Self> {
        let space = Self::from_fn_unchecked(labels, range_set, |_, _| value.clone())?;
        if space.len() > 1 && !range_set.contains_positive(value) {
            return Err(Error::NotInRangeSet {
                x: space.label(0).to_string(),
                y: space.label(1).to_string(),
                value: value.clone(),
            });
        }
        Ok(space)
    }

    pub fn singleton(label: impl Into<String>, range_set: &RangeSet) -> Self {
        Self::from_fn_unchecked([label.into()], range_set, |_, _| Value::zero()).expect("one label")
    }

    fn check(&self) -> Result<()> {
        let n = self.len();
        let name = |i: usize| self.points[i].clone();
        for i in 0..n {
            if !self.dist[i * n + i].is_zero() {
                return Err(Error::NonZeroDiagonal(name(i)));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let x = &self.dist[i * n + j];
                if *x != self.dist[j * n + i] {
                    return Err(Error::Asymmetric { x: name(i), y: name(j) });
                }
                if x.is_zero() {
                    return Err(Error::ZeroOffDiagonal { x: name(i), y: name(j) });
                }
                if !self.range_set.contains(x) {
                    return Err(Error::NotInRangeSet {
                        x: name(i),
                        y: name(j),
                        value: x.clone(),
                    });
                }
            }
        }
        if let Some((i, j, k)) = self.triangle_violation() {
            return Err(Error::TriangleViolation {
                x: name(i),
                y: name(j),
                z: name(k),
            });
        }
        Ok(())
    }

    /// First `(x, y, z)` with `d(x,y) > d(x,z) ∨ d(z,y)`, in index order.
    fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                let dij = &self.dist[i * n + j];
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let dik = &self.dist[i * n + k];
                    let dkj = &self.dist[k * n + j];
                    if dij > dik && dij > dkj {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.points.iter().map(String::as_str)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.get_index_of(label)
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.points.contains(label)
    }

    pub(crate) fn require_index(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn range_set(&self) -> &RangeSet {
        &self.range_set
    }

    /// `d(i, j)` by index.
    pub fn d(&self, i: usize, j: usize) -> &Value {
        &self.dist[i * self.len() + j]
    }

    /// `d(x, y)` by label.
    pub fn distance(&self, x: &str, y: &str) -> Result<&Value> {
        Ok(self.d(self.require_index(x)?, self.require_index(y)?))
    }

    pub fn row(&self, i: usize) -> &[Value] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<Value>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest distance; `0` for a single point.
    pub fn diameter(&self) -> Value {
        self.dist.iter().max().cloned().unwrap_or_else(Value::zero)
    }

    /// Smallest positive distance, `None` for a single point.
    pub fn separation(&self) -> Option<Value> {
        self.dist.iter().filter(|x| x.is_positive()).min().cloned()
    }

    /// Sorted distinct distances, including `0`.
    pub fn realized_values(&self) -> Vec<Value> {
        let mut vs = self.dist.clone();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Same matrix over another range set; re-checks membership.
    pub fn with_range_set(&self, range_set: &RangeSet) -> Result<Self> {
        let out = FiniteUltrametricSpace {
            points: self.points.clone(),
            dist: self.dist.clone(),
            range_set: range_set.clone(),
        };
        out.check()?;
        Ok(out)
    }

    /// Re-runs full validation. Always `Ok` for spaces built by this crate.
    pub fn revalidate(&self) -> Result<()> {
        self.check()
    }

    /// True iff both spaces have the same labels in the same order and
    /// bit-identical distances.
    pub fn same_matrix(&self, other: &Self) -> bool {
        self.points == other.points && self.dist == other.dist
    }

    /// Relabels points; `f` must be injective.
    pub fn relabel(&self, mut f: impl FnMut(&str) -> String) -> Result<Self> {
        let points = collect_labels(self.points.iter().map(|l| f(l)))?;
        Ok(FiniteUltrametricSpace {
            points,
            dist: self.dist.clone(),
            range_set: self.range_set.clone(),
        })
    }
}

//! Metrics on metrics: `UD^S`, `D_X`, and the canonical `u_S` on values.
//!
//! On a finite point set the least `ε` with `d ≤ e ∨ ε` and `e ≤ d ∨ ε`
//! is the largest `d(x,y) ∨ e(x,y)` over pairs where the two disagree.
//! At such a pair, say `d < e`, the condition `e ≤ d ∨ ε` forces
//! `ε ≥ e = d ∨ e`; conversely that choice of `ε` satisfies both inequalities
//! at every pair, and agreeing pairs impose nothing.

use std::fmt;

use serde::{Serialize, Serializer};

use super::FiniteUltrametricSpace;
use crate::error::{Error, Result};
use crate::values::Value;

/// A value of `cl(S) ⊔ {∞}`. Finite spaces never produce `Infinity`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UdValue {
    Finite(Value),
    Infinity,
}

impl UdValue {
    pub fn finite(&self) -> Option<&Value> {
        match self {
            UdValue::Finite(v) => Some(v),
            UdValue::Infinity => None,
        }
    }

    pub fn join(&self, other: &UdValue) -> UdValue {
        self.clone().max(other.clone())
    }
}

impl fmt::Display for UdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UdValue::Finite(v) => v.fmt(f),
            UdValue::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for UdValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Two metrics on one point set. `e` is re-indexed to `d`'s point order.
#[derive(Clone, Debug)]
pub struct UltrametricPair<'a> {
    d: &'a FiniteUltrametricSpace,
    e: &'a FiniteUltrametricSpace,
    perm: Vec<usize>,
}

impl<'a> UltrametricPair<'a> {
    pub fn new(d: &'a FiniteUltrametricSpace, e: &'a FiniteUltrametricSpace) -> Result<Self> {
        if d.len() != e.len() {
            return Err(Error::PointSetMismatch);
        }
        let perm = d
            .labels()
            .map(|l| e.index_of(l).ok_or(Error::PointSetMismatch))
            .collect::<Result<Vec<_>>>()?;
        Ok(UltrametricPair { d, e, perm })
    }

    pub fn d(&self) -> &FiniteUltrametricSpace {
        self.d
    }

    pub fn e(&self) -> &FiniteUltrametricSpace {
        self.e
    }

    /// `(d(x_i,x_j), e(x_i,x_j))` with indices in `d`'s order.
    pub fn at(&self, i: usize, j: usize) -> (&Value, &Value) {
        (self.d.d(i, j), self.e.d(self.perm[i], self.perm[j]))
    }

    fn pairs(&self) -> impl Iterator<Item = (&Value, &Value)> + '_ {
        let n = self.d.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| self.at(i, j)))
    }

    pub fn ud(&self) -> UdValue {
        let mut best = Value::zero();
        for (a, b) in self.pairs() {
            if a != b {
                let m = a.join(b);
                if m > best {
                    best = m;
                }
            }
        }
        UdValue::Finite(best)
    }

    pub fn dmax(&self) -> Value {
        self.pairs()
            .map(|(a, b)| a.abs_diff(b))
            .max()
            .unwrap_or_else(Value::zero)
    }

    /// First pair (in index order) where the metrics differ.
    pub fn first_disagreement(&self) -> Option<(usize, usize)> {
        let n = self.d.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| {
                let (a, b) = self.at(i, j);
                a != b
            })
    }
}

/// `UD^S(d, e)`.
pub fn ud_distance(d: &FiniteUltrametricSpace, e: &FiniteUltrametricSpace) -> Result<UdValue> {
    Ok(UltrametricPair::new(d, e)?.ud())
}

/// `D_X(d, e) = max |d - e|`.
pub fn d_distance(d: &FiniteUltrametricSpace, e: &FiniteUltrametricSpace) -> Result<Value> {
    Ok(UltrametricPair::new(d, e)?.dmax())
}

/// The canonical ultrametric on values: `0` on the diagonal, `x ∨ y` off it.
pub fn u_s_distance(x: &Value, y: &Value) -> Value {
    if x == y {
        Value::zero()
    } else {
        x.join(y)
    }
}

/// A triangle whose two largest sides differ, if the raw matrix has one.
///
/// Indices are returned as `(i, j, k)` with `d(i,j)` the strictly longest
/// side. Matrices that pass validation never have one.
pub fn isosceles_witness(dist: &[Vec<Value>]) -> Option<(usize, usize, usize)> {
    let n = dist.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut sides = [
                    (&dist[i][j], (i, j, k)),
                    (&dist[i][k], (i, k, j)),
                    (&dist[j][k], (j, k, i)),
                ];
                sides.sort_by(|a, b| b.0.cmp(a.0));
                if sides[0].0 != sides[1].0 {
                    return Some(sides[0].1);
                }
            }
        }
    }
    None
}

impl FiniteUltrametricSpace {
    /// Always `None`: validated spaces are isosceles.
    pub fn isosceles_witness(&self) -> Option<(usize, usize, usize)> {
        isosceles_witness(&self.rows())
    }
}

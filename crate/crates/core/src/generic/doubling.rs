//! The doubling bound `card(A) ≤ C · (δ(A)/α(A))^α`, decided exactly.
//!
//! With `α = p/q`, `C = c₁/c₂` and `δ/α(A) = r₁/r₂` the bound is equivalent
//! to `card^q · c₂^q · r₂^p ≤ c₁^q · r₁^p`, an integer comparison.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::FiniteUltrametricSpace;
use crate::values::Value;

/// Subset sizes up to which [`doubling_check`] enumerates every subset.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// One parameter pair `(C, α)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoublingCheck {
    #[serde(rename = "C")]
    pub c: Value,
    pub alpha: Value,
}

impl DoublingCheck {
    pub fn new(c: Value, alpha: Value) -> Result<Self> {
        for x in [&c, &alpha] {
            if !x.is_positive() {
                return Err(Error::NonPositive(x.clone()));
            }
        }
        Ok(DoublingCheck { c, alpha })
    }

    /// The product grid `cs × alphas`, in row-major order.
    pub fn grid(cs: &[Value], alphas: &[Value]) -> Result<Vec<DoublingCheck>> {
        cs.iter()
            .flat_map(|c| alphas.iter().map(move |a| DoublingCheck::new(c.clone(), a.clone())))
            .collect()
    }

    /// `card ≤ C · (delta / sep)^α` with exact integer arithmetic.
    pub fn bound_holds(&self, card: usize, sep: &Value, delta: &Value) -> bool {
        let p = self.alpha.numer().to_usize().expect("alpha numerator fits in usize");
        let q = self.alpha.denom().to_usize().expect("alpha denominator fits in usize");
        let ratio = delta.div(sep);
        let pow = |b: &BigInt, e: usize| num_traits::pow::pow(b.clone(), e);
        let lhs = pow(&BigInt::from(card), q) * pow(self.c.denom(), q) * pow(ratio.denom(), p);
        let rhs = pow(self.c.numer(), q) * pow(ratio.numer(), p);
        lhs <= rhs
    }

    /// Smallest integer above `C + 1`. An equidistant set of this size
    /// has `δ/α = 1` and so breaks the bound.
    pub fn equidistant_witness_size(&self) -> usize {
        let floor = self.c.floor_int().to_usize().expect("C fits in usize");
        floor + 2
    }
}

/// A property decided by finite configurations of points.
///
/// `violates` looks only at the induced distances on the subset, so a
/// violation found in a subspace is a violation in the whole space.
/// Continuity of the verdict in the metric is not checked.
pub trait TransmissibleCheck {
    /// Smallest configuration size worth testing.
    fn min_witness(&self) -> usize;
    fn violates(&self, x: &FiniteUltrametricSpace, subset: &[usize]) -> bool;
}

impl TransmissibleCheck for DoublingCheck {
    fn min_witness(&self) -> usize {
        2
    }

    fn violates(&self, x: &FiniteUltrametricSpace, subset: &[usize]) -> bool {
        if subset.len() < 2 {
            return false;
        }
        let (sep, delta) = alpha_delta_idx(x, subset);
        !self.bound_holds(subset.len(), &sep, &delta)
    }
}

/// Outcome of a finite-witness search.
#[derive(Clone, Debug, Serialize)]
pub struct TransmissibleVerdict<P> {
    pub parameter: P,
    pub holds: bool,
    pub witness: Option<Vec<String>>,
    /// True if every subset was examined, so `holds` is exact.
    pub exhaustive: bool,
}

fn alpha_delta_idx(x: &FiniteUltrametricSpace, subset: &[usize]) -> (Value, Value) {
    let mut sep: Option<&Value> = None;
    let mut delta = Value::zero();
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            let d = x.d(i, j);
            if sep.is_none_or(|s| d < s) {
                sep = Some(d);
            }
            if *d > delta {
                delta = d.clone();
            }
        }
    }
    (sep.cloned().unwrap_or_else(Value::zero), delta)
}

/// `(α(A), δ(A))`: smallest and largest distance inside `A`.
pub fn alpha_delta<L: AsRef<str>>(x: &FiniteUltrametricSpace, subset: &[L]) -> Result<(Value, Value)> {
    let idx = subset
        .iter()
        .map(|l| x.require_index(l.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let mut uniq = idx.clone();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() < 2 {
        return Err(Error::TooSmall);
    }
    Ok(alpha_delta_idx(x, &uniq))
}

/// Lexicographically least violating subset (index lists compared as
/// sequences), by depth-first enumeration.
pub fn search_exhaustive<T: TransmissibleCheck>(check: &T, x: &FiniteUltrametricSpace) -> Option<Vec<usize>> {
    fn go<T: TransmissibleCheck>(check: &T, x: &FiniteUltrametricSpace, cur: &mut Vec<usize>) -> bool {
        let start = cur.last().map_or(0, |&l| l + 1);
        for i in start..x.len() {
            cur.push(i);
            if cur.len() >= check.min_witness() && check.violates(x, cur) {
                return true;
            }
            if go(check, x, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    go(check, x, &mut cur).then_some(cur)
}

/// Same order as [`search_exhaustive`], specialized to the doubling bound
/// with the running separation and diameter carried along.
fn doubling_exhaustive(q: &DoublingCheck, x: &FiniteUltrametricSpace) -> Option<Vec<usize>> {
    fn go(
        q: &DoublingCheck,
        x: &FiniteUltrametricSpace,
        cur: &mut Vec<usize>,
        sep: Option<&Value>,
        delta: Option<&Value>,
    ) -> bool {
        let start = cur.last().map_or(0, |&l| l + 1);
        for i in start..x.len() {
            let mut s = sep;
            let mut d = delta;
            for &j in cur.iter() {
                let v = x.d(i, j);
                if s.is_none_or(|m| v < m) {
                    s = Some(v);
                }
                if d.is_none_or(|m| v > m) {
                    d = Some(v);
                }
            }
            cur.push(i);
            if cur.len() >= 2 && !q.bound_holds(cur.len(), s.unwrap(), d.unwrap()) {
                return true;
            }
            if go(q, x, cur, s, d) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    go(q, x, &mut cur, None, None).then_some(cur)
}

/// Candidate subsets for large spaces: every closed ball, and inside each
/// ball one representative per sub-ball at the ball's radius (an
/// equidistant set).
fn heuristic_candidates(x: &FiniteUltrametricSpace) -> Vec<Vec<usize>> {
    let n = x.len();
    let mut out = Vec::new();
    for c in 0..n {
        let mut radii: Vec<&Value> = (0..n).filter(|&j| j != c).map(|j| x.d(c, j)).collect();
        radii.sort();
        radii.dedup();
        for r in radii {
            let ball: Vec<usize> = (0..n).filter(|&j| x.d(c, j) <= r).collect();
            let mut reps: Vec<usize> = Vec::new();
            for &j in &ball {
                if reps.iter().all(|&k| x.d(j, k) >= r) {
                    reps.push(j);
                }
            }
            out.push(reps);
            out.push(ball);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// How [`doubling_check`] searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] points, heuristic above.
    Auto,
    Exhaustive,
    Heuristic,
}

pub fn doubling_check(x: &FiniteUltrametricSpace, q: &DoublingCheck, mode: SearchMode) -> TransmissibleVerdict<DoublingCheck> {
    let exhaustive = match mode {
        SearchMode::Auto => x.len() <= EXHAUSTIVE_LIMIT,
        SearchMode::Exhaustive => true,
        SearchMode::Heuristic => false,
    };
    let found = if exhaustive {
        doubling_exhaustive(q, x)
    } else {
        heuristic_candidates(x)
            .into_iter()
            .filter(|a| q.violates(x, a))
            .min()
    };
    TransmissibleVerdict {
        parameter: q.clone(),
        holds: found.is_none(),
        witness: found.map(|a| a.into_iter().map(|i| x.label(i).to_string()).collect()),
        exhaustive,
    }
}

/// A verified violation of one parameter pair.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub parameter: DoublingCheck,
    pub points: Vec<String>,
    pub card: usize,
    pub alpha: Value,
    pub delta: Value,
}

impl Witness {
    /// Re-checks the violation from the recorded numbers.
    pub fn recheck(&self) -> bool {
        self.card == self.points.len() && self.card >= 2 && !self.parameter.bound_holds(self.card, &self.alpha, &self.delta)
    }
}

/// A violating subset of a finite space for every parameter of the grid.
pub fn anti_doubling_witness(x: &FiniteUltrametricSpace, grid: &[DoublingCheck]) -> Result<Vec<Witness>> {
    grid.iter()
        .map(|q| {
            let v = doubling_check(x, q, SearchMode::Auto);
            let points = v.witness.ok_or(Error::NoWitnessFound)?;
            let (alpha, delta) = alpha_delta(x, &points)?;
            Ok(Witness {
                parameter: q.clone(),
                card: points.len(),
                points,
                alpha,
                delta,
            })
        })
        .collect()
}

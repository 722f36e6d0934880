//! Countable ultrametric spaces given by rules: the sequence space on ℕ
//! with `d(n, m) = a(n) ∨ a(m)`, and telescopes made of finite blocks at
//! shrinking radii around a single limit point `inf`.
//!
//! Nothing infinite is stored. Distances are computed on demand and blocks
//! are generated lazily and memoized.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{truncate, FiniteUltrametricSpace, RawSpace};
use crate::values::{RangeSet, Value};

/// A strictly decreasing null sequence `n ↦ r(n)`, `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Radii {
    /// `r(n) = ratio^n` with `0 < ratio < 1`.
    Grid { ratio: Value },
    /// `r(n) = 1/n`.
    Harmonic,
}

impl Radii {
    pub fn grid(ratio: Value) -> Result<Self> {
        if !ratio.is_positive() || ratio >= Value::one() {
            return Err(Error::InvalidArgument(format!("radius ratio {ratio} must lie in (0, 1)")));
        }
        Ok(Radii::Grid { ratio })
    }

    pub fn powers_of_half() -> Self {
        Radii::Grid { ratio: Value::ratio(1, 2) }
    }

    pub fn at(&self, n: u64) -> Value {
        assert!(n >= 1, "radii are indexed from 1");
        match self {
            Radii::Grid { ratio } => ratio.pow(n as i64),
            Radii::Harmonic => Value::ratio(1, n),
        }
    }

    /// Least `n ≥ 1` with `r(n) < tol`.
    pub fn first_below(&self, tol: &Value) -> Result<u64> {
        if !tol.is_positive() {
            return Err(Error::NonPositive(tol.clone()));
        }
        match self {
            Radii::Harmonic => {
                // 1/n < tol  ⇔  n > 1/tol
                let inv = Value::one().div(tol);
                let n = inv.floor_int() + 1u32;
                u64::try_from(n).map_err(|_| Error::TailNotFound(tol.clone()))
            }
            Radii::Grid { .. } => {
                let mut n = 1;
                while self.at(n) >= *tol {
                    n += 1;
                }
                Ok(n)
            }
        }
    }

    /// A range set containing every radius.
    pub fn default_range_set(&self) -> RangeSet {
        match self {
            Radii::Grid { ratio } => {
                RangeSet::grid(Value::one().div(ratio), None, None).expect("ratio inverse exceeds 1")
            }
            Radii::Harmonic => RangeSet::All,
        }
    }
}

/// The space `ℕ` with `d(n, m) = a(n) ∨ a(m)`: Cauchy but without a limit.
#[derive(Clone, Debug)]
pub struct SequenceSpace {
    pub radii: Radii,
}

/// Cauchy-without-limit certificate for a [`SequenceSpace`].
#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub tol: Value,
    /// Least index with all pairwise distances beyond it below `tol`.
    pub n: u64,
    /// `sup_{m ≠ m' ≥ n} d(m, m') = a(n)`.
    pub tail_diameter: Value,
    /// `(k, inf_{m ≠ k} d(k, m))` for `k ≤ n`; each equals `a(k) > 0`.
    pub infima: Vec<(u64, Value)>,
}

impl SequenceSpace {
    pub fn new(radii: Radii) -> Self {
        SequenceSpace { radii }
    }

    pub fn distance(&self, n: u64, m: u64) -> Value {
        if n == m {
            Value::zero()
        } else {
            self.radii.at(n).join(&self.radii.at(m))
        }
    }

    /// Points `1..=k` as a finite space.
    pub fn window(&self, k: u64) -> Result<FiniteUltrametricSpace> {
        let labels: Vec<String> = (1..=k).map(|n| n.to_string()).collect();
        FiniteUltrametricSpace::from_fn(labels, &self.radii.default_range_set(), |i, j| {
            self.distance(i as u64 + 1, j as u64 + 1)
        })
    }

    /// Infimum of `d(k, m)` over `m ≠ k`.
    ///
    /// For `m > k` the distance is the constant `a(k)`, for `m < k` it is
    /// `a(m) > a(k)`; so the infimum is attained at `m = k + 1`. The
    /// computation still scans `m < k` and a window beyond `k`.
    pub fn infimum_at(&self, k: u64) -> Value {
        (1..=k + 8)
            .filter(|&m| m != k)
            .map(|m| self.distance(k, m))
            .min()
            .expect("window is non-empty")
    }

    pub fn cauchy_no_limit_witness(&self, tol: &Value) -> Result<CauchyReport> {
        let n = self.radii.first_below(tol)?;
        let tail_diameter = self.distance(n, n + 1);
        let infima: Vec<(u64, Value)> = (1..=n).map(|k| (k, self.infimum_at(k))).collect();
        for (k, inf) in &infima {
            if *inf != self.radii.at(*k) || !inf.is_positive() {
                return Err(Error::VerificationFailed(format!("infimum at {k} is {inf}")));
            }
        }
        if tail_diameter >= *tol {
            return Err(Error::VerificationFailed(format!("tail diameter {tail_diameter} is not below {tol}")));
        }
        Ok(CauchyReport {
            tol: tol.clone(),
            n,
            tail_diameter,
            infima,
        })
    }
}

/// How block `i` (from 1) is produced.
#[derive(Clone, Debug)]
pub enum BlockRule {
    /// `start_size + i - 1` points, pairwise at `r(N+i)`.
    EquidistantGrowing { start_size: usize },
    /// `size` points, pairwise at `r(N+i)`.
    Constant { size: usize },
    /// The given spaces in rotation. With `truncate`, block `i` is capped at
    /// `r(N+i)`; otherwise a block wider than its budget is an error.
    Cycle { spaces: Vec<FiniteUltrametricSpace>, truncate: bool },
}

/// A point of a telescope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TPoint {
    Limit,
    /// Block (from 1) and index within the block.
    In(u64, usize),
}

pub const LIMIT_LABEL: &str = "inf";

/// Distance queries shared by telescopes and their perturbations.
pub trait LazyUltrametric {
    fn range_set(&self) -> &RangeSet;
    fn dist(&self, p: TPoint, q: TPoint) -> Result<Value>;
    fn label(&self, p: TPoint) -> Result<String>;
    fn parse_label(&self, label: &str) -> Result<TPoint>;
    /// Blocks `1..=k` followed by the limit point.
    fn prefix_points(&self, k: u64) -> Result<Vec<TPoint>>;

    fn distance(&self, x: &str, y: &str) -> Result<Value> {
        self.dist(self.parse_label(x)?, self.parse_label(y)?)
    }

    /// Materializes the given points as a validated finite space.
    fn materialize(&self, pts: &[TPoint]) -> Result<FiniteUltrametricSpace> {
        let labels = pts.iter().map(|&p| self.label(p)).collect::<Result<Vec<_>>>()?;
        let mut err = None;
        let space = FiniteUltrametricSpace::from_fn_unchecked(labels, self.range_set(), |i, j| {
            self.dist(pts[i], pts[j]).unwrap_or_else(|e| {
                err.get_or_insert(e);
                Value::zero()
            })
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        space.revalidate()?;
        Ok(space)
    }

    fn finite_prefix(&self, k: u64) -> Result<FiniteUltrametricSpace> {
        self.materialize(&self.prefix_points(k)?)
    }
}

/// A telescope `{inf} ⊔ ∐ Rᵢ`:
/// inside `Rᵢ` the block metric, across blocks `r(N+i) ∨ r(N+j)`,
/// and `r(N+i)` from `Rᵢ` to `inf`.
#[derive(Debug)]
pub struct TelescopeSpace {
    radii: Radii,
    offset: u64,
    rule: BlockRule,
    range_set: RangeSet,
    blocks: Mutex<BlockCache>,
}

/// Generated blocks and, for each, the number of points before it.
#[derive(Clone, Debug, Default)]
struct BlockCache {
    blocks: Vec<Arc<FiniteUltrametricSpace>>,
    starts: Vec<u64>,
}

impl Clone for TelescopeSpace {
    fn clone(&self) -> Self {
        TelescopeSpace {
            radii: self.radii.clone(),
            offset: self.offset,
            rule: self.rule.clone(),
            range_set: self.range_set.clone(),
            blocks: Mutex::new(self.blocks.lock().unwrap().clone()),
        }
    }
}

/// Least `N` with `r(n) < ε` for every `n > N`.
pub fn offset_for(radii: &Radii, eps: &Value) -> Result<u64> {
    Ok(radii.first_below(eps)? - 1)
}

impl TelescopeSpace {
    pub fn build(rule: BlockRule, radii: Radii, offset: u64, range_set: Option<RangeSet>) -> Result<Self> {
        let range_set = range_set.unwrap_or_else(|| radii.default_range_set());
        match &rule {
            BlockRule::EquidistantGrowing { start_size: 0 } | BlockRule::Constant { size: 0 } => {
                return Err(Error::InvalidArgument("blocks need at least one point".into()))
            }
            BlockRule::Cycle { spaces, .. } if spaces.is_empty() => {
                return Err(Error::InvalidArgument("cycle needs at least one space".into()))
            }
            _ => {}
        }
        let t = TelescopeSpace {
            radii,
            offset,
            rule,
            range_set,
            blocks: Mutex::new(BlockCache::default()),
        };
        if let BlockRule::Cycle { spaces, truncate: false } = &t.rule {
            let widest = spaces.iter().map(|s| s.diameter()).max().unwrap();
            if widest.is_positive() {
                // Radii fall to 0, so some block eventually exceeds its budget.
                let mut i = 1;
                loop {
                    let sp = &spaces[((i - 1) % spaces.len() as u64) as usize];
                    if sp.diameter() > t.radius(i) {
                        return Err(Error::DiameterViolation {
                            block: i as usize,
                            diameter: sp.diameter().into(),
                            budget: t.radius(i).into(),
                        });
                    }
                    i += 1;
                }
            }
        }
        Ok(t)
    }

    /// Radii `2^-n`, no offset, blocks of two points.
    pub fn standard() -> Self {
        TelescopeSpace::build(
            BlockRule::Constant { size: 2 },
            Radii::powers_of_half(),
            0,
            Some(RangeSet::powers_of_two(None)),
        )
        .expect("standard telescope")
    }

    pub fn radii(&self) -> &Radii {
        &self.radii
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn rule(&self) -> &BlockRule {
        &self.rule
    }

    /// `r(N + i)`.
    pub fn radius(&self, i: u64) -> Value {
        self.radii.at(self.offset + i)
    }

    fn make_block(&self, i: u64) -> Result<FiniteUltrametricSpace> {
        let r = self.radius(i);
        let s = &self.range_set;
        let labels = |n: usize| (0..n).map(move |j| format!("b{i}.{j}"));
        let block = match &self.rule {
            BlockRule::EquidistantGrowing { start_size } => {
                FiniteUltrametricSpace::equidistant(labels(start_size + i as usize - 1), &r, s)?
            }
            BlockRule::Constant { size } => FiniteUltrametricSpace::equidistant(labels(*size), &r, s)?,
            BlockRule::Cycle { spaces, truncate: cap } => {
                let sp = &spaces[((i - 1) % spaces.len() as u64) as usize];
                let sp = if *cap && sp.len() > 1 { truncate(&sp.with_range_set(s)?, &r)? } else { sp.with_range_set(s)? };
                sp.relabel(|l| format!("b{i}.{l}"))?
            }
        };
        if block.diameter() > r {
            return Err(Error::DiameterViolation {
                block: i as usize,
                diameter: block.diameter().into(),
                budget: r.into(),
            });
        }
        Ok(block)
    }

    fn with_blocks<T>(&self, upto: u64, f: impl FnOnce(&BlockCache) -> T) -> Result<T> {
        let mut cache = self.blocks.lock().expect("block cache poisoned");
        while (cache.blocks.len() as u64) < upto {
            let next = cache.blocks.len() as u64 + 1;
            let start = match (cache.starts.last(), cache.blocks.last()) {
                (Some(s), Some(b)) => s + b.len() as u64,
                _ => 0,
            };
            let block = self.make_block(next)?;
            cache.blocks.push(Arc::new(block));
            cache.starts.push(start);
        }
        Ok(f(&cache))
    }

    /// Block `i` (from 1), generated on first use.
    pub fn block(&self, i: u64) -> Result<Arc<FiniteUltrametricSpace>> {
        assert!(i >= 1, "blocks are indexed from 1");
        self.with_blocks(i, |c| c.blocks[(i - 1) as usize].clone())
    }

    pub fn block_len(&self, i: u64) -> Result<usize> {
        Ok(self.block(i)?.len())
    }

    /// Number of points in blocks before block `i`.
    fn start_of(&self, i: u64) -> Result<u64> {
        self.with_blocks(i, |c| c.starts[(i - 1) as usize])
    }

    /// The point at position `pos` counted from the start of block `from`.
    pub(crate) fn locate(&self, from: u64, pos: u64) -> Result<TPoint> {
        let target = self.start_of(from)? + pos;
        let mut hi = from;
        // Grow until the target position lies inside the generated blocks.
        while self.start_of(hi)? + self.block_len(hi)? as u64 <= target {
            hi *= 2;
        }
        self.with_blocks(hi, |c| {
            let i = c.starts.partition_point(|&s| s <= target);
            TPoint::In(i as u64, (target - c.starts[i - 1]) as usize)
        })
    }

    /// Position of `p` counted from the start of block `from`.
    pub(crate) fn position(&self, from: u64, p: TPoint) -> Result<Option<u64>> {
        let TPoint::In(i, j) = p else { return Ok(None) };
        if i < from {
            return Ok(None);
        }
        Ok(Some(self.start_of(i)? - self.start_of(from)? + j as u64))
    }

    /// Points of the first block of size at least `min_size`, with the
    /// block index.
    pub fn first_block_of_size(&self, min_size: usize) -> Result<(u64, Vec<TPoint>)> {
        let cap = match &self.rule {
            BlockRule::EquidistantGrowing { start_size } => min_size.saturating_sub(*start_size) as u64 + 1,
            BlockRule::Constant { .. } => 1,
            BlockRule::Cycle { spaces, .. } => spaces.len() as u64,
        };
        for i in 1..=cap.max(1) {
            let len = self.block_len(i)?;
            if len >= min_size {
                return Ok((i, (0..len).map(|j| TPoint::In(i, j)).collect()));
            }
        }
        Err(Error::NoWitnessFound)
    }
}

impl LazyUltrametric for TelescopeSpace {
    fn range_set(&self) -> &RangeSet {
        &self.range_set
    }

    fn dist(&self, p: TPoint, q: TPoint) -> Result<Value> {
        Ok(match (p, q) {
            (TPoint::Limit, TPoint::Limit) => Value::zero(),
            (TPoint::Limit, TPoint::In(i, _)) | (TPoint::In(i, _), TPoint::Limit) => self.radius(i),
            (TPoint::In(i, a), TPoint::In(j, b)) if i == j => {
                let block = self.block(i)?;
                if a >= block.len() || b >= block.len() {
                    return Err(Error::UnknownPoint(format!("b{i}[{}]", a.max(b))));
                }
                block.d(a, b).clone()
            }
            (TPoint::In(i, _), TPoint::In(j, _)) => self.radius(i).join(&self.radius(j)),
        })
    }

    fn label(&self, p: TPoint) -> Result<String> {
        match p {
            TPoint::Limit => Ok(LIMIT_LABEL.to_string()),
            TPoint::In(i, j) => {
                let block = self.block(i)?;
                if j >= block.len() {
                    return Err(Error::UnknownPoint(format!("b{i}[{j}]")));
                }
                Ok(block.label(j).to_string())
            }
        }
    }

    fn parse_label(&self, label: &str) -> Result<TPoint> {
        if label == LIMIT_LABEL {
            return Ok(TPoint::Limit);
        }
        let unknown = || Error::UnknownPoint(label.to_string());
        let rest = label.strip_prefix('b').ok_or_else(unknown)?;
        let (i, _) = rest.split_once('.').ok_or_else(unknown)?;
        let i: u64 = i.parse().map_err(|_| unknown())?;
        if i == 0 {
            return Err(unknown());
        }
        let j = self.block(i)?.index_of(label).ok_or_else(unknown)?;
        Ok(TPoint::In(i, j))
    }

    fn prefix_points(&self, k: u64) -> Result<Vec<TPoint>> {
        if k == 0 {
            return Err(Error::InvalidArgument("prefix needs at least one block".into()));
        }
        let mut pts = Vec::new();
        for i in 1..=k {
            pts.extend((0..self.block_len(i)?).map(|j| TPoint::In(i, j)));
        }
        pts.push(TPoint::Limit);
        Ok(pts)
    }
}

/// JSON form of a telescope.
///
/// `{"radii": {"kind": "grid", "ratio": "1/2"}, "offset": 3,
///   "blocks": {"kind": "equidistant-growing", "start_size": 2}}`.
/// Instead of `offset`, `eps` picks the least offset with every radius
/// below `eps`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TelescopeJson {
    pub radii: Radii,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Value>,
    pub blocks: BlockRuleJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_set: Option<RangeSet>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BlockRuleJson {
    EquidistantGrowing {
        start_size: usize,
    },
    Constant {
        size: usize,
    },
    Cycle {
        spaces: Vec<RawSpace>,
        #[serde(default)]
        truncate: bool,
    },
}

impl TelescopeJson {
    pub fn build(self) -> Result<TelescopeSpace> {
        let offset = match (self.offset, &self.eps) {
            (Some(n), _) => n,
            (None, Some(eps)) => offset_for(&self.radii, eps)?,
            (None, None) => 0,
        };
        let range_set = self.range_set.unwrap_or_else(|| self.radii.default_range_set());
        let rule = match self.blocks {
            BlockRuleJson::EquidistantGrowing { start_size } => BlockRule::EquidistantGrowing { start_size },
            BlockRuleJson::Constant { size } => BlockRule::Constant { size },
            BlockRuleJson::Cycle { spaces, truncate } => BlockRule::Cycle {
                spaces: spaces
                    .into_iter()
                    .map(|s| s.into_space(Some(&range_set)))
                    .collect::<Result<_>>()?,
                truncate,
            },
        };
        TelescopeSpace::build(rule, self.radii, offset, Some(range_set))
    }
}

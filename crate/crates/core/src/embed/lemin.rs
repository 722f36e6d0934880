use std::collections::BTreeMap;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use super::vector::UltraVector;
use crate::amalgam::one_point_extend;
use crate::error::{Error, Result};
use crate::space::FiniteUltrametricSpace;
use crate::values::{RangeSet, Value};

/// Images of an isometric embedding into the Lemin–Lemin module over ℤ.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingCertificate {
    /// Label used for the base point `o`, which maps to `0`.
    pub origin: String,
    /// Distance used to attach `o`.
    pub separation: Value,
    /// `X ⊔ {o}` with the attaching metric; `o` is last.
    pub extended: FiniteUltrametricSpace,
    /// `L(x)` for every point of `X`, in input order.
    pub images: IndexMap<String, UltraVector>,
    pub critical_value: Value,
    pub independence_rank: usize,
}

/// Builds `L: X ⊔ {o} → L(S, F(ℤ, X, o), o)`.
///
/// Points are processed with `o` first and then in input order. For the
/// `γ`-th point, `D_γ` is its distance to the nearest earlier point and `β`
/// the first earlier point attaining it; `L(x_γ)` is the basis vector
/// `x_γ` on `(0, D_γ]` and agrees with `L(x_β)` beyond. On a finite space
/// the minimum is always attained.
pub fn embed_finite(x: &FiniteUltrametricSpace) -> Result<EmbeddingCertificate> {
    let s = x.range_set();
    if !s.has_positive() {
        return Err(Error::EmptyPositivePart);
    }
    let separation = if x.len() >= 2 {
        s.round_up(&x.diameter())?
    } else {
        s.canonical_positive()?
    };
    let mut origin = String::from("o");
    while x.contains_label(&origin) {
        origin.push('\'');
    }
    let extended = one_point_extend(x, &origin, &separation)?.space;
    let n = x.len();
    // Processing order: o (index n in `extended`), then 0..n.
    let order: Vec<usize> = std::iter::once(n).chain(0..n).collect();
    let mut built: Vec<UltraVector> = vec![UltraVector::zero()];
    for g in 1..order.len() {
        let xg = order[g];
        let (beta, dg) = (0..g)
            .map(|b| (b, extended.d(xg, order[b])))
            .min_by(|a, b| a.1.cmp(b.1))
            .expect("o precedes every point");
        let tail: Vec<_> = built[beta]
            .segments()
            .iter()
            .filter(|(upto, _)| upto > dg)
            .cloned()
            .collect();
        let head = UltraVector::basis_step(extended.label(xg), dg);
        let mut segs = head.segments().to_vec();
        segs.extend(tail);
        built.push(UltraVector::from_segments(segs)?);
    }
    let images: IndexMap<String, UltraVector> = (0..n)
        .map(|i| (x.label(i).to_string(), built[i + 1].clone()))
        .collect();
    let mut cert = EmbeddingCertificate {
        origin,
        separation,
        extended,
        images,
        critical_value: Value::zero(),
        independence_rank: 0,
    };
    let (c, rank) = independence_check(&cert)?;
    cert.critical_value = c;
    cert.independence_rank = rank;
    Ok(cert)
}

impl EmbeddingCertificate {
    pub fn range_set(&self) -> &RangeSet {
        self.extended.range_set()
    }

    /// Image of a point of `X ⊔ {o}`.
    pub fn image(&self, label: &str) -> Option<UltraVector> {
        if label == self.origin {
            Some(UltraVector::zero())
        } else {
            self.images.get(label).cloned()
        }
    }

    /// First pair (labels of `X ⊔ {o}`) whose `Δ` differs from `D`.
    pub fn isometry_defect(&self) -> Option<(String, String)> {
        let e = &self.extended;
        let s = self.range_set();
        let imgs: Vec<UltraVector> = e.labels().map(|l| self.image(l).unwrap()).collect();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                if imgs[i].delta(&imgs[j], s) != *e.d(i, j) {
                    return Some((e.label(i).to_string(), e.label(j).to_string()));
                }
            }
        }
        None
    }

    /// First pair whose images do not differ exactly on `(0, D(x,y)]`.
    ///
    /// This is checked on whole merged segments, which is stronger than the
    /// statement restricted to `S₊`.
    pub fn support_defect(&self) -> Option<(String, String)> {
        let e = &self.extended;
        let imgs: Vec<UltraVector> = e.labels().map(|l| self.image(l).unwrap()).collect();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let dis = imgs[i].disagreement(&imgs[j]);
                let mut reach = Value::zero();
                let ok = dis.iter().all(|(lo, hi)| {
                    let contiguous = *lo == reach;
                    reach = hi.clone();
                    contiguous
                }) && reach == *e.d(i, j);
                if !ok {
                    return Some((e.label(i).to_string(), e.label(j).to_string()));
                }
            }
        }
        None
    }
}

/// Rank over ℚ of an integer matrix, by exact elimination.
pub fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &pivot;
                for c in col..cols {
                    let sub = &f * &m[rank][c];
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Evaluates every image at `c = min Δ` over the images and `0`, and
/// returns `c` with the rank of the resulting coefficient matrix.
pub fn independence_check(cert: &EmbeddingCertificate) -> Result<(Value, usize)> {
    let s = cert.range_set();
    let imgs: Vec<&UltraVector> = cert.images.values().collect();
    let mut c: Option<Value> = None;
    let mut consider = |d: Value| {
        if c.as_ref().is_none_or(|m| d < *m) {
            c = Some(d);
        }
    };
    for (i, f) in imgs.iter().enumerate() {
        consider(f.norm(s));
        for g in &imgs[i + 1..] {
            consider(f.delta(g, s));
        }
    }
    let Some(c) = c else {
        return Ok((Value::zero(), 0));
    };
    let basis: Vec<&String> = cert.images.keys().collect();
    let rows: Vec<Vec<BigInt>> = imgs
        .iter()
        .map(|f| {
            let at = f.eval(&c);
            basis.iter().map(|l| at.get(*l).cloned().unwrap_or_default()).collect()
        })
        .collect();
    let unit_rows = rows
        .iter()
        .all(|r| r.iter().filter(|x| !x.is_zero()).count() == 1 && r.iter().any(|x| x.is_one()));
    let rank = rational_rank(&rows);
    if !unit_rows || rank < imgs.len() {
        return Err(Error::RankDeficient {
            rank,
            expected: imgs.len(),
        });
    }
    Ok((c, rank))
}

/// Norms observed while sampling the generated submodule.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SubmoduleReport {
    pub trials: usize,
    /// Norm value → number of combinations attaining it.
    pub norms: BTreeMap<Value, usize>,
    /// Coefficient vectors whose norm fell outside the range set.
    pub outside: Vec<Vec<i64>>,
}

impl SubmoduleReport {
    pub fn all_in_range_set(&self) -> bool {
        self.outside.is_empty()
    }

    fn record(&mut self, cert: &EmbeddingCertificate, imgs: &[&UltraVector], coeffs: &[i64]) {
        let terms: Vec<(BigInt, &UltraVector)> = coeffs.iter().zip(imgs).map(|(n, f)| (BigInt::from(*n), *f)).collect();
        let norm = UltraVector::combination(&terms).norm(cert.range_set());
        self.trials += 1;
        if !cert.range_set().contains(&norm) {
            self.outside.push(coeffs.to_vec());
        }
        *self.norms.entry(norm).or_default() += 1;
    }
}

/// Random non-zero combinations `Σ Nᵢ L(xᵢ)` with `|Nᵢ| ≤ bound`.
pub fn submodule_svalued_sample<R: Rng>(
    cert: &EmbeddingCertificate,
    trials: usize,
    bound: i64,
    rng: &mut R,
) -> SubmoduleReport {
    let imgs: Vec<&UltraVector> = cert.images.values().collect();
    let mut report = SubmoduleReport::default();
    if imgs.is_empty() || bound < 1 {
        return report;
    }
    for _ in 0..trials {
        let coeffs = loop {
            let c: Vec<i64> = imgs.iter().map(|_| rng.gen_range(-bound..=bound)).collect();
            if c.iter().any(|&n| n != 0) {
                break c;
            }
        };
        report.record(cert, &imgs, &coeffs);
    }
    report
}

/// Every non-zero coefficient vector in `[-bound, bound]^n`.
pub fn submodule_svalued_exhaustive(cert: &EmbeddingCertificate, bound: i64) -> SubmoduleReport {
    let imgs: Vec<&UltraVector> = cert.images.values().collect();
    let mut report = SubmoduleReport::default();
    let mut coeffs = vec![-bound; imgs.len()];
    loop {
        if coeffs.iter().any(|&n| n != 0) {
            report.record(cert, &imgs, &coeffs);
        }
        let Some(k) = coeffs.iter().position(|&n| n < bound) else {
            break;
        };
        coeffs[k] += 1;
        for c in &mut coeffs[..k] {
            *c = -bound;
        }
    }
    report
}

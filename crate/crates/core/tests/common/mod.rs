//! Brute-force oracles and instance generators shared by the integration
//! suites. Oracles here avoid the library's own shortcuts: they recompute
//! from definitions by enumeration.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use ultrametric::amalgam::Prescription;
use ultrametric::extend::InterpolationProblem;
use ultrametric::generic::DoublingCheck;
use ultrametric::random::{self, TestRng};
use ultrametric::values::{Germ, Piece, StepFunction};
use ultrametric::{FiniteUltrametricSpace, RangeSet, Value};

use num_rational::BigRational;
use num_traits::Zero;

pub fn vv(s: &str) -> Value {
    s.parse().unwrap()
}

/// Definition-level validity: zero diagonal, symmetric, positive off the
/// diagonal, values in `s`, and every triple isosceles-or-better.
pub fn brute_valid(d: &[Vec<Value>], s: &RangeSet) -> bool {
    let n = d.len();
    if d.iter().any(|r| r.len() != n) {
        return false;
    }
    for i in 0..n {
        if !d[i][i].is_zero() {
            return false;
        }
        for j in 0..n {
            if i != j && (d[i][j] != d[j][i] || d[i][j].is_zero() || !s.contains(&d[i][j])) {
                return false;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][j] > d[i][k].join(&d[k][j]) {
                    return false;
                }
            }
        }
    }
    true
}

/// `d` aligned to `e`'s labels.
fn aligned(d: &FiniteUltrametricSpace, e: &FiniteUltrametricSpace) -> Vec<Vec<Value>> {
    let labels: Vec<&str> = d.labels().collect();
    labels
        .iter()
        .map(|x| labels.iter().map(|y| e.distance(x, y).unwrap().clone()).collect())
        .collect()
}

/// Least `ε` in `{0} ∪ values(d) ∪ values(e)` with `d ≤ e ∨ ε` and
/// `e ≤ d ∨ ε` everywhere. The least such `ε` in `S` is always one of these
/// candidates, since both matrices are `S`-valued.
pub fn brute_ud(d: &FiniteUltrametricSpace, e: &FiniteUltrametricSpace) -> Value {
    let dm = d.rows();
    let em = aligned(d, e);
    let mut cands: Vec<Value> = dm.iter().chain(em.iter()).flatten().cloned().collect();
    cands.push(Value::zero());
    cands.sort();
    cands.dedup();
    let n = dm.len();
    cands
        .into_iter()
        .find(|eps| {
            (0..n).all(|i| {
                (0..n).all(|j| dm[i][j] <= em[i][j].join(eps) && em[i][j] <= dm[i][j].join(eps))
            })
        })
        .expect("the largest candidate always works")
}

pub fn brute_dmax(d: &FiniteUltrametricSpace, e: &FiniteUltrametricSpace) -> Value {
    let dm = d.rows();
    let em = aligned(d, e);
    let mut best = Value::zero();
    for (a, b) in dm.iter().flatten().zip(em.iter().flatten()) {
        best = best.join(&a.abs_diff(b));
    }
    best
}

/// `card ≤ C (δ/α)^a` decided via `(card/C)^q ≤ (δ/α)^p`, `a = p/q`.
pub fn doubling_holds(q: &DoublingCheck, card: usize, sep: &Value, delta: &Value) -> bool {
    let p: i64 = q.alpha.numer().try_into().unwrap();
    let qq: i64 = q.alpha.denom().try_into().unwrap();
    let lhs = Value::from_int(card as u64).div(&q.c).pow(qq);
    let rhs = delta.div(sep).pow(p);
    lhs <= rhs
}

/// All violating subsets by bitmask enumeration; returns the
/// lexicographically least (as sorted index vectors).
pub fn brute_doubling_witness(x: &FiniteUltrametricSpace, q: &DoublingCheck) -> Option<Vec<usize>> {
    let n = x.len();
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..(1 << n) {
        let a: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if a.len() < 2 {
            continue;
        }
        let mut sep: Option<Value> = None;
        let mut delta = Value::zero();
        for (k, &i) in a.iter().enumerate() {
            for &j in &a[k + 1..] {
                let d = x.d(i, j).clone();
                sep = Some(sep.map_or(d.clone(), |s| s.meet(&d)));
                delta = delta.join(&d);
            }
        }
        if !doubling_holds(q, a.len(), &sep.unwrap(), &delta) && best.as_ref().is_none_or(|b| a < *b) {
            best = Some(a);
        }
    }
    best
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A range set with at least one positive element.
pub fn range_set(rng: &mut TestRng) -> RangeSet {
    random::range_set(rng)
}

/// A random interpolation problem: up to `max_subsets` disjoint subsets of
/// a space of at most `max_n` points, each carrying a random metric.
pub fn problem(rng: &mut TestRng, s: &RangeSet, max_n: usize, max_subsets: usize) -> InterpolationProblem {
    let n = rng.gen_range(2..=max_n);
    let x = random::space(rng, n, s);
    let mut pts: Vec<String> = x.labels().map(str::to_string).collect();
    pts.shuffle(rng);
    let k = rng.gen_range(1..=max_subsets);
    let mut family = Vec::new();
    let mut rest = &pts[..];
    for _ in 0..k {
        if rest.is_empty() {
            break;
        }
        let size = rng.gen_range(1..=rest.len().min(4));
        let (a, tail) = rest.split_at(size);
        rest = tail;
        let e = if rng.gen_bool(0.15) {
            ultrametric::space::restrict(&x, a).unwrap()
        } else {
            random::space_with_labels(rng, a.to_vec(), s)
        };
        family.push(Prescription::new(e));
    }
    InterpolationProblem::new(x, family).unwrap()
}

fn rat(v: &Value) -> BigRational {
    v.as_rational().clone()
}

/// Increasing, amenable, continuous at `0`: a positive slope from the
/// origin, then pieces that never step down.
pub fn valid_psi(rng: &mut TestRng) -> StepFunction {
    let k = rng.gen_range(1..=4);
    let mut breaks: Vec<Value> = (0..k).map(|_| random::small_positive(rng)).collect();
    breaks.sort();
    breaks.dedup();
    let mut pieces = Vec::new();
    let slope = rat(&random::small_positive(rng));
    let mut level = &slope * rat(&breaks[0]);
    pieces.push(Piece::linear(Some(breaks[0].clone()), slope, BigRational::zero()));
    for w in 0..breaks.len() {
        let lo = rat(&breaks[w]);
        let start = &level + rat(&Value::ratio(rng.gen_range(0..=3), rng.gen_range(1..=3)));
        let slope = if rng.gen_bool(0.5) {
            BigRational::zero()
        } else {
            rat(&Value::ratio(rng.gen_range(1..=4), rng.gen_range(1..=4)))
        };
        let intercept = &start - &slope * &lo;
        let upto = breaks.get(w + 1).cloned();
        if let Some(u) = &upto {
            level = &slope * rat(u) + &intercept;
        }
        pieces.push(Piece::linear(upto, slope, intercept));
    }
    StepFunction::new(Germ::Affine, pieces).unwrap()
}

/// A positive step function with at least one strict descent.
pub fn descending_psi(rng: &mut TestRng) -> StepFunction {
    let k = rng.gen_range(1..=4);
    let mut breaks: Vec<Value> = (0..k).map(|_| random::small_positive(rng)).collect();
    breaks.sort();
    breaks.dedup();
    let mut values: Vec<Value> = (0..=breaks.len()).map(|_| random::small_positive(rng)).collect();
    let at = rng.gen_range(0..breaks.len());
    if values[at] <= values[at + 1] {
        values[at] = values[at + 1].add(&Value::one());
    }
    StepFunction::piecewise_constant(&breaks, &values).unwrap()
}

/// Every `s`-valued ultrametric on `n` labelled points, by enumeration of
/// all matrices over the positive part of a finite `s`.
pub fn all_ultrametrics(n: usize, s: &RangeSet) -> Vec<Vec<Vec<Value>>> {
    let RangeSet::Finite(vals) = s else {
        panic!("finite range sets only")
    };
    let pos: Vec<Value> = vals.iter().filter(|x| x.is_positive()).cloned().collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; pairs.len()];
    loop {
        let mut d = vec![vec![Value::zero(); n]; n];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            d[i][j] = pos[idx[p]].clone();
            d[j][i] = pos[idx[p]].clone();
        }
        if brute_valid(&d, s) {
            out.push(d);
        }
        let Some(k) = idx.iter().position(|&c| c + 1 < pos.len()) else {
            break;
        };
        idx[k] += 1;
        for c in &mut idx[..k] {
            *c = 0;
        }
    }
    out
}

pub mod checks {
    //! Postcondition checkers returning a description of the first failure.

    use super::*;
    use ultrametric::amalgam::{
        amalgam_disjoint, copy_amalgam, family_amalgam, glue_over_intersection, key_amalgam, AmalgamResult,
    };
    use ultrametric::embed::{embed_finite, UltraVector};
    use ultrametric::extend::{family_discrepancy, interpolate};
    use ultrametric::space::{restrict, truncate};

    pub type Check = std::result::Result<(), String>;

    fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
        if cond {
            Ok(())
        } else {
            Err(msg())
        }
    }

    fn ud(a: &FiniteUltrametricSpace, b: &FiniteUltrametricSpace) -> Value {
        ultrametric::space::ud_distance(a, b).unwrap().finite().cloned().unwrap()
    }

    /// Restriction along embedding `k` equals `input`, recomputed by label.
    fn restriction_exact(h: &AmalgamResult, k: usize, input: &FiniteUltrametricSpace) -> Check {
        for x in input.labels() {
            for y in input.labels() {
                let (hx, hy) = (h.image(k, x).ok_or("missing image")?, h.image(k, y).ok_or("missing image")?);
                let got = h.space.distance(hx, hy).map_err(|e| e.to_string())?;
                ensure(got == input.distance(x, y).unwrap(), || format!("restriction {k} differs at ({x},{y})"))?;
            }
        }
        ensure(h.restricts_to(k, input), || format!("restricts_to({k}) disagrees with the oracle"))
    }

    fn valid(h: &AmalgamResult) -> Check {
        ensure(brute_valid(&h.space.rows(), h.space.range_set()), || "amalgam is not a valid S-ultrametric".into())
    }

    fn prefixed(r: &mut TestRng, prefix: &str, n: usize, s: &RangeSet) -> FiniteUltrametricSpace {
        random::space_with_labels(r, labels(prefix, n), s)
    }

    /// One random run of one of the five amalgam constructions.
    pub fn amalgam_case(r: &mut TestRng) -> std::result::Result<&'static str, String> {
        let s = range_set(r);
        let which = r.gen_range(0..5);
        match which {
            0 => {
                let (n, m) = (r.gen_range(1..=8), r.gen_range(1..=8));
                let x = prefixed(r, "x", n, &s);
                let y = prefixed(r, "y", m, &s);
                let rr = random::element(r, &s);
                let h = amalgam_disjoint(&x, &y, &rr).map_err(|e| e.to_string())?;
                valid(&h)?;
                restriction_exact(&h, 0, &x)?;
                restriction_exact(&h, 1, &y)?;
                for a in x.labels() {
                    for b in y.labels() {
                        ensure(*h.space.distance(a, b).unwrap() >= rr, || format!("cross ({a},{b}) below r"))?;
                    }
                }
                Ok("amalgam_disjoint")
            }
            1 => {
                // X = Z ⊔ W at floor s with diam W ≤ s, so every new point of X
                // is at distance exactly s from Z.
                let (nz, nw, nv) = (r.gen_range(1..=4), r.gen_range(1..=4), r.gen_range(1..=4));
                let z = prefixed(r, "z", nz, &s);
                let glue_s = random::element(r, &s);
                let w = truncate(&prefixed(r, "w", nw, &s), &glue_s).unwrap();
                let x = amalgam_disjoint(&z, &w, &glue_s).unwrap().space;
                let v = prefixed(r, "v", nv, &s);
                let floor = random::element(r, &s);
                let y = amalgam_disjoint(&z, &v, &floor).unwrap().space;
                let h = glue_over_intersection(&x, &y, &glue_s).map_err(|e| e.to_string())?;
                valid(&h)?;
                restriction_exact(&h, 0, &x)?;
                restriction_exact(&h, 1, &y)?;
                for a in w.labels() {
                    for b in v.labels() {
                        let want = z
                            .labels()
                            .map(|c| x.distance(a, c).unwrap().join(y.distance(c, b).unwrap()))
                            .min()
                            .unwrap();
                        ensure(*h.space.distance(a, b).unwrap() == want, || format!("glue cross ({a},{b})"))?;
                    }
                }
                Ok("glue_over_intersection")
            }
            2 => {
                let n = r.gen_range(1..=8);
                let d = prefixed(r, "x", n, &s);
                let mut shuffled: Vec<String> = d.labels().map(str::to_string).collect();
                shuffled.shuffle(r);
                let e = random::space_with_labels(r, shuffled, &s);
                let gap = ud(&d, &e);
                let extra = random::element(r, &s);
                let rr = if gap.is_zero() { extra } else { gap.join(&extra) };
                let h = copy_amalgam(&d, &e, &rr).map_err(|e| e.to_string())?;
                valid(&h)?;
                restriction_exact(&h, 0, &d)?;
                restriction_exact(&h, 1, &e)?;
                for a in d.labels() {
                    let ta = h.image(1, a).unwrap();
                    ensure(*h.space.distance(a, ta).unwrap() == rr, || format!("h({a},τ{a}) ≠ r"))?;
                }
                Ok("copy_amalgam")
            }
            3 => {
                let k = r.gen_range(1..=4);
                let spaces: Vec<FiniteUltrametricSpace> = (0..k)
                    .map(|i| {
                        let n = r.gen_range(1..=5);
                        prefixed(r, &format!("f{i}_"), n, &s)
                    })
                    .collect();
                let floor = random::element(r, &s);
                let h = family_amalgam(&spaces, &floor).map_err(|e| e.to_string())?;
                valid(&h)?;
                for (i, x) in spaces.iter().enumerate() {
                    restriction_exact(&h, i, x)?;
                    for y in &spaces[i + 1..] {
                        for a in x.labels() {
                            for b in y.labels() {
                                ensure(*h.space.distance(a, b).unwrap() >= floor, || format!("family cross ({a},{b})"))?;
                            }
                        }
                    }
                }
                Ok("family_amalgam")
            }
            _ => {
                let p = problem(r, &s, 8, 3);
                let sup = family_discrepancy(&p.ambient, &p.family).unwrap();
                let extra = random::element(r, &s);
                let eta = if sup.is_zero() { extra } else { sup.join(&extra) };
                let h = key_amalgam(&p.ambient, &p.family, &eta).map_err(|e| e.to_string())?;
                valid(&h)?;
                restriction_exact(&h, 0, &p.ambient)?;
                let z: Vec<&String> = p.family.iter().flat_map(|q| q.subset.iter()).collect();
                for (i, q) in p.family.iter().enumerate() {
                    restriction_exact(&h, i + 1, &q.metric)?;
                    for a in &q.subset {
                        let ta = h.image(i + 1, a).unwrap();
                        ensure(*h.space.distance(a, ta).unwrap() == eta, || format!("h({a},τ{a}) ≠ η"))?;
                        let gap = z.iter().map(|c| h.space.distance(ta, c).unwrap()).min().unwrap();
                        ensure(*gap == eta, || format!("copy {ta} sits {gap} from the subsets, not η"))?;
                    }
                }
                Ok("key_amalgam")
            }
        }
    }

    /// Breakpoints of both vectors; step functions are constant on the
    /// segments between consecutive ones.
    fn breakpoints(f: &UltraVector, g: &UltraVector) -> Vec<Value> {
        let mut qs: Vec<Value> = f.segments().iter().chain(g.segments()).map(|s| s.0.clone()).collect();
        qs.sort();
        qs.dedup();
        qs
    }

    /// Isometry and the support condition by pointwise evaluation, plus
    /// full rank at the critical value.
    pub fn embedding(x: &FiniteUltrametricSpace) -> Check {
        let cert = embed_finite(x).map_err(|e| e.to_string())?;
        let s = x.range_set();
        for a in x.labels() {
            let fa = cert.image(a).ok_or("missing image")?;
            ensure(fa.norm(s) == cert.separation, || format!("‖L{a}‖ ≠ d({a}, o)"))?;
            for b in x.labels() {
                let fb = cert.image(b).unwrap();
                let d = x.distance(a, b).unwrap();
                ensure(fa.delta(&fb, s) == *d, || format!("Δ(L{a}, L{b}) ≠ d"))?;
                // Differs on every segment at or below d, agrees above.
                for q in breakpoints(&fa, &fb) {
                    let differ = fa.eval(&q) != fb.eval(&q);
                    ensure(differ == (q <= *d && a != b), || format!("support condition fails at {q} for ({a},{b})"))?;
                }
                if a != b {
                    ensure(breakpoints(&fa, &fb).contains(d), || format!("d({a},{b}) is not a breakpoint"))?;
                }
            }
        }
        ensure(cert.isometry_defect().is_none() && cert.support_defect().is_none(), || "certificate self-check".into())?;
        ensure(cert.independence_rank == x.len(), || format!("rank {} < {}", cert.independence_rank, x.len()))?;
        let (c, rank) = ultrametric::embed::independence_check(&cert).map_err(|e| e.to_string())?;
        ensure(rank == x.len() && c == cert.critical_value, || "independence check disagrees".into())
    }

    /// Norm of `Σ nᵢ fᵢ` by pointwise sums at the breakpoints: the largest
    /// breakpoint where the sum is non-zero.
    pub fn pointwise_norm(terms: &[(i64, &UltraVector)]) -> Value {
        let mut qs: Vec<Value> = terms.iter().flat_map(|(_, f)| f.segments().iter().map(|s| s.0.clone())).collect();
        qs.sort();
        qs.dedup();
        qs.into_iter()
            .rev()
            .find(|q| {
                let mut sum: std::collections::BTreeMap<String, num_bigint::BigInt> = Default::default();
                for (n, f) in terms {
                    for (l, c) in f.eval(q) {
                        *sum.entry(l).or_default() += c * num_bigint::BigInt::from(*n);
                    }
                }
                sum.values().any(|c| !num_traits::Zero::is_zero(c))
            })
            .unwrap_or_else(Value::zero)
    }

    /// Prescriptions hold exactly, `m` is valid, and
    /// `sup ≤ UD(m, d) ≤ η ≤ C·sup` with `sup` recomputed by brute force.
    pub fn interpolation(p: &InterpolationProblem) -> Check {
        let res = interpolate(p).map_err(|e| e.to_string())?;
        let s = p.ambient.range_set();
        ensure(brute_valid(&res.m.rows(), s), || "m is not a valid S-ultrametric".into())?;
        let mut sup = Value::zero();
        for q in &p.family {
            let here = restrict(&res.m, &q.subset).unwrap();
            for a in &q.subset {
                for b in &q.subset {
                    ensure(here.distance(a, b).unwrap() == q.metric.distance(a, b).unwrap(), || {
                        format!("m differs from the prescription at ({a},{b})")
                    })?;
                }
            }
            sup = sup.join(&brute_ud(&restrict(&p.ambient, &q.subset).unwrap(), &q.metric));
        }
        let got = brute_ud(&res.m, &p.ambient);
        ensure(got == ud(&res.m, &p.ambient) && got == res.ud, || "UD(m, d) disagrees with the oracle".into())?;
        ensure(res.lower == sup, || format!("lower {} ≠ brute sup {sup}", res.lower))?;
        let c = s.quasi_completeness_constant();
        ensure(sup <= got && got <= c.mul(&sup), || format!("sandwich fails: {sup} ≤ {got} ≤ {c}·{sup}"))?;
        if let Some(eta) = &res.eta {
            ensure(got <= *eta && *eta <= c.mul(&sup) && s.contains(eta), || format!("η = {eta} out of bounds"))?;
        } else {
            ensure(sup.is_zero() && res.m.same_matrix(&p.ambient), || "degenerate case must return d".into())?;
        }
        Ok(())
    }
}

/// A validated space from string literals over `s`.
pub fn literal(points: &[&str], rows: &[&[&str]], s: &RangeSet) -> FiniteUltrametricSpace {
    let d: Vec<Vec<Value>> = rows.iter().map(|r| r.iter().map(|x| vv(x)).collect()).collect();
    ultrametric::space::validate(points.iter().copied(), &d, s).unwrap()
}

/// Least `UD(m, d)` over every `S`-ultrametric `m` on the ambient points
/// that restricts to each prescription; finite `S` only. `candidates` is
/// `all_ultrametrics(n, S)`, passed in so it can be shared.
pub fn brute_min_ud(p: &InterpolationProblem, candidates: &[Vec<Vec<Value>>]) -> Option<Value> {
    let x = &p.ambient;
    let s = x.range_set();
    let idx = |l: &String| x.index_of(l).unwrap();
    candidates
        .iter()
        .filter(|m| {
            p.family.iter().all(|q| {
                q.subset.iter().all(|a| q.subset.iter().all(|b| m[idx(a)][idx(b)] == *q.metric.distance(a, b).unwrap()))
            })
        })
        .map(|m| brute_ud(&ultrametric::space::validate(x.labels(), m, s).unwrap(), x))
        .min()
}

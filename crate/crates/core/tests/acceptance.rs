//! One line per criterion: `PASS`/`FAIL`, the measured numbers, and the
//! wall time against its limit. Exits non-zero if any gating criterion
//! fails.

mod common;

use std::time::{Duration, Instant};

use common::checks::{amalgam_case, embedding, interpolation, pointwise_norm};
use common::*;
use rand::Rng;
use ultrametric::embed::{embed_finite, UltraVector};
use ultrametric::extend::{interpolate, InterpolationProblem};
use ultrametric::generic::{genericity_perturb, lazy_alpha_delta, t_approx, DoublingCheck};
use ultrametric::random::{self, rng};
use ultrametric::space::{psi_apply_into, validate};
use ultrametric::telescope::{LazyUltrametric, Radii, SequenceSpace, TelescopeSpace};
use ultrametric::amalgam::Prescription;
use ultrametric::{RangeSet, Value};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    gating: bool,
    run: fn() -> Outcome,
}

fn variant(s: &RangeSet) -> usize {
    match s {
        RangeSet::Finite(_) => 0,
        RangeSet::Grid { .. } => 1,
        RangeSet::Dyadic => 2,
        RangeSet::All => 3,
    }
}

fn validator_oracle() -> Outcome {
    let mut r = rng(1001);
    let mut per_variant = [0usize; 4];
    let mut accepted = 0;
    for i in 0..1000 {
        let s = range_set(&mut r);
        let n = r.gen_range(1..=12);
        let d = random::symmetric_matrix(&mut r, n, &s);
        let ours = validate(labels("p", n), &d, &s).is_ok();
        if ours != brute_valid(&d, &s) {
            return Err(format!("discrepancy on matrix {i} over {s:?}"));
        }
        per_variant[variant(&s)] += 1;
        accepted += ours as usize;
    }
    if per_variant.contains(&0) {
        return Err(format!("variant coverage {per_variant:?}"));
    }
    Ok(format!("1000 matrices, 0 discrepancies, {accepted} valid, per variant {per_variant:?}"))
}

fn psi_theorem() -> Outcome {
    let mut r = rng(1002);
    for i in 0..500 {
        let psi = valid_psi(&mut r);
        let n = r.gen_range(2..=8);
        let x = random::space(&mut r, n, &RangeSet::All);
        let y = psi_apply_into(&psi, &x, &RangeSet::All).map_err(|e| format!("pair {i}: {e}"))?;
        if !brute_valid(&y.rows(), &RangeSet::All) {
            return Err(format!("pair {i}: ψ∘d is not an ultrametric"));
        }
    }
    for i in 0..100 {
        let psi = descending_psi(&mut r);
        let (a, b) = psi.descent().ok_or(format!("ψ {i} has no descent"))?;
        let z = Value::zero();
        let d = vec![vec![z.clone(), a.clone(), b.clone()], vec![a.clone(), z.clone(), b.clone()], vec![b.clone(), b.clone(), z]];
        validate(["x", "y", "z"], &d, &RangeSet::All).map_err(|e| format!("counterexample {i} base: {e}"))?;
        let moved: Vec<Vec<Value>> = d.iter().map(|row| row.iter().map(|t| psi.eval(t)).collect()).collect();
        if validate(["x", "y", "z"], &moved, &RangeSet::All).is_ok() {
            return Err(format!("counterexample {i} still validates"));
        }
    }
    Ok("500 valid pairs pass, 100 counterexamples fail validate".into())
}

fn amalgams() -> Outcome {
    let mut r = rng(1003);
    let mut kinds = std::collections::BTreeMap::new();
    for i in 0..1000 {
        let kind = amalgam_case(&mut r).map_err(|e| format!("run {i}: {e}"))?;
        *kinds.entry(kind).or_insert(0) += 1;
    }
    Ok(format!("1000 runs, 0 failures {kinds:?}"))
}

fn lemin_isometry() -> Outcome {
    let mut r = rng(1004);
    for i in 0..1000 {
        let s = range_set(&mut r);
        let n = r.gen_range(1..=10);
        let x = random::space(&mut r, n, &s);
        embedding(&x).map_err(|e| format!("space {i}: {e}"))?;
    }
    Ok("1000 spaces, isometric, support exact, full rank".into())
}

fn submodule() -> Outcome {
    let mut r = rng(1005);
    let check = |cert: &ultrametric::embed::EmbeddingCertificate, coeffs: &[i64]| -> Result<(), String> {
        let imgs: Vec<&UltraVector> = cert.images.values().collect();
        let terms: Vec<(i64, &UltraVector)> = coeffs.iter().copied().zip(imgs).collect();
        let norm = pointwise_norm(&terms);
        let s = cert.range_set();
        let big: Vec<_> = terms.iter().map(|(c, f)| (num_bigint::BigInt::from(*c), *f)).collect();
        if !s.contains(&norm) || UltraVector::combination(&big).norm(s) != norm {
            return Err(format!("coefficients {coeffs:?} give norm {norm}"));
        }
        Ok(())
    };
    let mut exhaustive = 0;
    for _ in 0..40 {
        let s = range_set(&mut r);
        let n = r.gen_range(1..=3);
        let cert = embed_finite(&random::space(&mut r, n, &s)).map_err(|e| e.to_string())?;
        for code in 0..5usize.pow(n as u32) {
            let coeffs: Vec<i64> = (0..n).map(|k| (code / 5usize.pow(k as u32) % 5) as i64 - 2).collect();
            if coeffs.iter().any(|&c| c != 0) {
                check(&cert, &coeffs)?;
                exhaustive += 1;
            }
        }
    }
    let mut sampled = 0;
    for _ in 0..100 {
        let s = range_set(&mut r);
        let n = r.gen_range(1..=6);
        let cert = embed_finite(&random::space(&mut r, n, &s)).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let coeffs = loop {
                let c: Vec<i64> = (0..n).map(|_| r.gen_range(-3..=3)).collect();
                if c.iter().any(|&x| x != 0) {
                    break c;
                }
            };
            check(&cert, &coeffs)?;
            sampled += 1;
        }
    }
    Ok(format!("{exhaustive} exhaustive combinations (n ≤ 3, |N| ≤ 2), {sampled} samples (n ≤ 6), all S-valued"))
}

fn sandwich() -> Outcome {
    let mut r = rng(1006);
    for i in 0..1000 {
        let s = range_set(&mut r);
        let p = problem(&mut r, &s, 10, 3);
        interpolation(&p).map_err(|e| format!("problem {i}: {e}"))?;
    }
    Ok("1000 problems, prescriptions exact, sup ≤ UD(m,d) ≤ C·sup".into())
}

fn niemytzki() -> Outcome {
    let mut found = Vec::new();
    for (radii, tol, predicted) in [
        (Radii::Harmonic, "1/10", 11u64),
        (Radii::Harmonic, "1/100", 101),
        (Radii::powers_of_half(), "1/10", 4),
        (Radii::powers_of_half(), "1/100", 7),
    ] {
        let tol = vv(tol);
        let rep = SequenceSpace::new(radii.clone()).cauchy_no_limit_witness(&tol).map_err(|e| e.to_string())?;
        if rep.n != predicted || rep.tail_diameter >= tol {
            return Err(format!("{radii:?} tol {tol}: N = {}, tail {}", rep.n, rep.tail_diameter));
        }
        // A tail starting earlier must not fit under tol.
        if radii.at(predicted - 1) < tol {
            return Err(format!("N = {predicted} is not least"));
        }
        if rep.infima.len() as u64 != predicted || rep.infima.iter().any(|(_, v)| !v.is_positive()) {
            return Err("non-positive infimum".into());
        }
        found.push(format!("{}", rep.n));
    }
    Ok(format!("N = {} for 1/n at 1/10, 1/100 and 2^-n at 1/10, 1/100", found.join(", ")))
}

fn genericity() -> Outcome {
    let t = TelescopeSpace::standard();
    let grid = DoublingCheck::grid(&["1", "10", "100"].map(vv), &["1", "2", "3"].map(vv)).map_err(|e| e.to_string())?;
    let mut uds = Vec::new();
    for k in 1..=6 {
        let eps = vv("1/2").pow(k);
        let (m, cert) = genericity_perturb(&t, &eps, &grid).map_err(|e| format!("k = {k}: {e}"))?;
        let brute = brute_ud(&t.finite_prefix(cert.prefix_blocks).unwrap(), &m.finite_prefix(cert.prefix_blocks).unwrap());
        if brute != cert.prefix_ud || brute > eps {
            return Err(format!("k = {k}: prefix UD {brute} vs ε {eps}"));
        }
        if cert.witnesses.len() != grid.len() {
            return Err(format!("k = {k}: {} witnesses", cert.witnesses.len()));
        }
        for w in &cert.witnesses {
            let pts: Vec<_> = w.points.iter().map(|l| m.parse_label(l).unwrap()).collect();
            let (sep, delta) = lazy_alpha_delta(&m, &pts).map_err(|e| e.to_string())?;
            if !w.recheck() || doubling_holds(&w.parameter, pts.len(), &sep, &delta) {
                return Err(format!("k = {k}: witness for {:?} does not violate", w.parameter));
            }
        }
        uds.push(cert.prefix_ud.to_string());
    }
    Ok(format!("ε = 2^-1..2^-6, prefix UD [{}], 9 witnesses each", uds.join(", ")))
}

fn approximation() -> Outcome {
    let mut r = rng(1009);
    for i in 0..500 {
        let n = r.gen_range(2..=8);
        let x = random::space(&mut r, n, &RangeSet::All);
        let eps = if i % 2 == 0 { vv("1/10") } else { vv("1/100") };
        let e = t_approx(&x, &RangeSet::Dyadic, &eps).map_err(|e| format!("space {i}: {e}"))?;
        if !brute_valid(&e.rows(), &RangeSet::Dyadic) || e.rows().iter().flatten().any(|v| !v.is_dyadic()) {
            return Err(format!("space {i}: not a dyadic ultrametric"));
        }
        if brute_dmax(&x, &e) >= eps {
            return Err(format!("space {i}: sup-difference too large"));
        }
        let (dx, de) = (x.rows(), e.rows());
        for a in dx.iter().flatten().zip(de.iter().flatten()) {
            for b in dx.iter().flatten().zip(de.iter().flatten()) {
                if a.0.cmp(b.0) != a.1.cmp(b.1) {
                    return Err(format!("space {i}: order of {} and {} changed", a.0, b.0));
                }
            }
        }
    }
    Ok("500 spaces, dyadic, valid, within ε, order preserved".into())
}

/// Gap between the pipeline and the true minimum over all extensions, on
/// every problem with at most 4 points over finite S with ≤ 4 values.
/// Everything here depends on S only through its order type, so one S
/// per size covers all of them. Single-point prescriptions carry no
/// constraint and are left out.
fn minimality() -> Outcome {
    let mut problems = 0usize;
    let mut gaps = std::collections::BTreeMap::<String, usize>::new();
    for s in [
        RangeSet::finite([vv("1")]),
        RangeSet::finite(["1", "2"].map(vv)),
        RangeSet::finite(["1", "2", "3"].map(vv)),
    ] {
        for n in 2..=4 {
            let pts = labels("p", n);
            let all = all_ultrametrics(n, &s);
            let spaces: Vec<_> = all.iter().map(|d| validate(pts.clone(), d, &s).unwrap()).collect();
            for x in &spaces {
                for family in families(&pts) {
                    for metrics in metric_choices(&family, &s) {
                        let fam = metrics.into_iter().map(Prescription::new).collect();
                        let p = InterpolationProblem::new(x.clone(), fam).map_err(|e| e.to_string())?;
                        interpolation(&p)?;
                        let got = interpolate(&p).map_err(|e| e.to_string())?.ud;
                        let best = brute_min_ud(&p, &all).ok_or("no extension exists")?;
                        if got < best {
                            return Err(format!("pipeline beats the brute-force minimum on {p:?}"));
                        }
                        let gap = if best.is_zero() { got.to_string() } else { got.div(&best).to_string() };
                        *gaps.entry(gap).or_default() += 1;
                        problems += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{problems} problems, ratio UD/min UD histogram {gaps:?}"))
}

/// Families of disjoint subsets of size ≥ 2.
fn families(pts: &[String]) -> Vec<Vec<Vec<String>>> {
    fn go(rest: &[String], acc: &mut Vec<Vec<String>>, out: &mut Vec<Vec<Vec<String>>>) {
        let Some((first, tail)) = rest.split_first() else {
            if !acc.is_empty() {
                out.push(acc.clone());
            }
            return;
        };
        go(tail, acc, out);
        // `first` starts a block; choose its other members from `tail`.
        for mask in 1u32..(1 << tail.len()) {
            let block: Vec<String> = std::iter::once(first.clone())
                .chain((0..tail.len()).filter(|i| mask & (1 << i) != 0).map(|i| tail[i].clone()))
                .collect();
            let left: Vec<String> = (0..tail.len()).filter(|i| mask & (1 << i) == 0).map(|i| tail[i].clone()).collect();
            acc.push(block);
            go(&left, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(pts, &mut Vec::new(), &mut out);
    out
}

fn metric_choices(family: &[Vec<String>], s: &RangeSet) -> Vec<Vec<ultrametric::FiniteUltrametricSpace>> {
    let mut out = vec![Vec::new()];
    for block in family {
        let options: Vec<_> = all_ultrametrics(block.len(), s)
            .iter()
            .map(|d| validate(block.clone(), d, s).unwrap())
            .collect();
        out = out
            .into_iter()
            .flat_map(|acc: Vec<_>| {
                options.iter().map(move |o| {
                    let mut next = acc.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect();
    }
    out
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "validator matches triple enumeration", limit: Some(Duration::from_secs(10)), gating: true, run: validator_oracle },
        Criterion { id: 2, name: "ψ-transforms: increasing ψ keeps ultrametrics, descents break them", limit: None, gating: true, run: psi_theorem },
        Criterion { id: 3, name: "amalgam postconditions", limit: Some(Duration::from_secs(30)), gating: true, run: amalgams },
        Criterion { id: 4, name: "Lemin–Lemin embedding is isometric", limit: None, gating: true, run: lemin_isometry },
        Criterion { id: 5, name: "generated submodule is S-valued", limit: None, gating: true, run: submodule },
        Criterion { id: 6, name: "interpolation sandwich", limit: Some(Duration::from_secs(60)), gating: true, run: sandwich },
        Criterion { id: 7, name: "Cauchy sequence without a limit", limit: None, gating: true, run: niemytzki },
        Criterion { id: 8, name: "anti-doubling perturbation of the standard telescope", limit: Some(Duration::from_secs(10)), gating: true, run: genericity },
        Criterion { id: 9, name: "dyadic approximation", limit: None, gating: true, run: approximation },
        Criterion { id: 10, name: "tiny-instance minimality report (informational)", limit: None, gating: true, run: minimality },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let late = c.limit.is_some_and(|l| took > l);
        let limit = c.limit.map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        let (tag, detail) = match (&outcome, late) {
            (Ok(msg), false) => ("PASS", msg.clone()),
            (Ok(msg), true) => ("FAIL", format!("too slow; {msg}")),
            (Err(msg), _) => ("FAIL", msg.clone()),
        };
        if tag == "FAIL" && c.gating {
            failed += 1;
        }
        println!("{tag} criterion {}: {} [{:.2}s{limit}] {detail}", c.id, c.name, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

mod common;

use common::checks::{embedding, pointwise_norm};
use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;
use ultrametric::embed::{
    embed_finite, rational_rank, submodule_svalued_exhaustive, submodule_svalued_sample, UltraVector,
};
use ultrametric::random::{self, rng};
use ultrametric::{RangeSet, Value};

#[test]
fn random_embeddings_are_isometric_with_exact_support() {
    let mut r = rng(41);
    for _ in 0..1000 {
        let s = range_set(&mut r);
        let n = r.gen_range(1..=10);
        let x = random::space(&mut r, n, &s);
        embedding(&x).unwrap_or_else(|e| panic!("{e}\n{x:?}"));
    }
}

#[test]
fn combination_norms_match_pointwise_sums() {
    let mut r = rng(42);
    for _ in 0..200 {
        let s = range_set(&mut r);
        let n = r.gen_range(1..=6);
        let x = random::space(&mut r, n, &s);
        let cert = embed_finite(&x).unwrap();
        let imgs: Vec<&UltraVector> = cert.images.values().collect();
        for _ in 0..20 {
            let coeffs: Vec<i64> = imgs.iter().map(|_| r.gen_range(-3..=3)).collect();
            let terms: Vec<(i64, &UltraVector)> = coeffs.iter().copied().zip(imgs.iter().copied()).collect();
            let big: Vec<(BigInt, &UltraVector)> = terms.iter().map(|(c, f)| (BigInt::from(*c), *f)).collect();
            let norm = UltraVector::combination(&big).norm(&s);
            assert_eq!(norm, pointwise_norm(&terms), "{coeffs:?}");
            assert!(s.contains(&norm));
        }
    }
}

#[test]
fn submodule_norms_stay_in_s() {
    let mut r = rng(43);
    for _ in 0..50 {
        let s = range_set(&mut r);
        let n = r.gen_range(1..=5);
        let x = random::space(&mut r, n, &s);
        let cert = embed_finite(&x).unwrap();
        let report = submodule_svalued_sample(&cert, 200, 3, &mut r);
        assert_eq!(report.trials, 200);
        assert!(report.all_in_range_set(), "{:?}", report.outside);
    }
    let x = literal(&["a", "b", "c"], &[&["0", "1", "2"], &["1", "0", "2"], &["2", "2", "0"]], &RangeSet::All);
    let cert = embed_finite(&x).unwrap();
    let all = submodule_svalued_exhaustive(&cert, 2);
    assert_eq!(all.trials, 5usize.pow(3) - 1);
    assert!(all.all_in_range_set());
    // A non-zero combination never has norm below the critical value.
    assert!(all.norms.keys().all(|k| *k >= cert.critical_value));
}

#[test]
fn triangle_example_images() {
    let x = literal(&["a", "b", "c"], &[&["0", "1", "2"], &["1", "0", "2"], &["2", "2", "0"]], &RangeSet::All);
    let cert = embed_finite(&x).unwrap();
    assert_eq!(cert.separation, vv("2"));
    assert_eq!(cert.critical_value, vv("1"));
    assert_eq!(cert.images["a"].to_string(), cert.image("a").unwrap().to_string());
    assert_eq!(cert.image(&cert.origin), Some(UltraVector::zero()));
    let b = &cert.images["b"];
    assert_eq!(b.eval(&vv("1/2")).get("b"), Some(&BigInt::from(1)));
    assert_eq!(b.eval(&vv("3/2")).get("a"), Some(&BigInt::from(1)));
}

#[test]
fn rank_of_small_matrices() {
    let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> { rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect() };
    assert_eq!(rational_rank(&m(&[&[1, 2], &[2, 4]])), 1);
    assert_eq!(rational_rank(&m(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]])), 2);
    assert_eq!(rational_rank(&m(&[&[2, 1], &[1, 3]])), 2);
}

fn arb_vector(labels: &'static [&'static str]) -> impl Strategy<Value = UltraVector> {
    prop::collection::vec((1u64..12, prop::collection::vec(-3i64..=3, labels.len())), 0..4).prop_map(move |segs| {
        let mut segs: Vec<(Value, ultrametric::embed::Coeffs)> = segs
            .into_iter()
            .map(|(q, cs)| {
                let c = labels.iter().zip(cs).map(|(l, n)| (l.to_string(), BigInt::from(n))).collect();
                (Value::ratio(q, 2), c)
            })
            .collect();
        segs.sort_by(|a, b| a.0.cmp(&b.0));
        segs.dedup_by(|a, b| a.0 == b.0);
        UltraVector::from_segments(segs).unwrap()
    })
}

const LS: &[&str] = &["p", "q"];

proptest! {
    #[test]
    fn delta_is_a_translation_invariant_ultranorm(f in arb_vector(LS), g in arb_vector(LS), h in arb_vector(LS), n in 1i64..5) {
        let s = RangeSet::All;
        prop_assert_eq!(f.add(&h).delta(&g.add(&h), &s), f.delta(&g, &s));
        prop_assert!(f.delta(&g, &s) <= f.delta(&h, &s).join(&h.delta(&g, &s)));
        prop_assert_eq!(f.delta(&g, &s), g.delta(&f, &s));
        prop_assert_eq!(f.scale(&BigInt::from(n)).norm(&s), f.norm(&s));
        prop_assert_eq!(f.delta(&g, &s).is_zero(), f == g);
        prop_assert_eq!(f.sub(&f), UltraVector::zero());
        prop_assert_eq!(f.neg().norm(&s), f.norm(&s));
    }
}

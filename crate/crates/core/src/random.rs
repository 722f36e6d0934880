//! Seeded generators for range sets, values and ultrametric spaces.
//!
//! Used by the CLI's randomized certificates and by the test suites. All
//! generators take an explicit RNG so runs are reproducible from a seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::space::FiniteUltrametricSpace;
use crate::values::{RangeSet, Value};

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One of the four range-set shapes with small parameters.
pub fn range_set<R: Rng>(rng: &mut R) -> RangeSet {
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(1..=5);
            RangeSet::finite((0..k).map(|_| small_positive(rng)))
        }
        1 => {
            let ratio = [Value::from_int(2), Value::from_int(3), Value::ratio(3, 2)]
                .choose(rng)
                .cloned()
                .unwrap();
            let kmin = if rng.gen_bool(0.5) { None } else { Some(rng.gen_range(-6..=-1)) };
            let kmax = if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(2..=6)) };
            RangeSet::grid(ratio, kmin, kmax).expect("valid grid")
        }
        2 => RangeSet::Dyadic,
        _ => RangeSet::All,
    }
}

/// `p/q` with `1 ≤ p ≤ 12`, `1 ≤ q ≤ 6`.
pub fn small_positive<R: Rng>(rng: &mut R) -> Value {
    Value::ratio(rng.gen_range(1..=12), rng.gen_range(1..=6))
}

/// A positive element of `s`, drawn from a small window around `1`.
pub fn element<R: Rng>(rng: &mut R, s: &RangeSet) -> Value {
    match s {
        RangeSet::Finite(values) => values[1..].choose(rng).cloned().expect("positive element"),
        RangeSet::Grid { ratio, kmin, kmax } => {
            let lo = kmin.unwrap_or(-6).max(-6);
            let hi = kmax.unwrap_or(6).min(6).max(lo);
            ratio.pow(rng.gen_range(lo..=hi))
        }
        RangeSet::Dyadic => {
            let level = rng.gen_range(0..=4u32);
            Value::ratio(rng.gen_range(1..=3u64 << level), 1 << level)
        }
        RangeSet::All => small_positive(rng),
    }
}

/// A random `s`-valued ultrametric on `labels`, built by merging random
/// clusters at non-decreasing heights drawn from `s`.
pub fn space_with_labels<R: Rng>(rng: &mut R, labels: Vec<String>, s: &RangeSet) -> FiniteUltrametricSpace {
    let n = labels.len();
    let mut heights: Vec<Value> = (0..n.saturating_sub(1)).map(|_| element(rng, s)).collect();
    heights.sort();
    let mut cluster: Vec<usize> = (0..n).collect();
    let mut dist = vec![vec![Value::zero(); n]; n];
    for h in heights {
        let mut ids: Vec<usize> = cluster.clone();
        ids.sort_unstable();
        ids.dedup();
        let pick: Vec<usize> = ids.choose_multiple(rng, 2).cloned().collect();
        let (a, b) = (pick[0], pick[1]);
        for i in 0..n {
            for j in 0..n {
                if cluster[i] == a && cluster[j] == b || cluster[i] == b && cluster[j] == a {
                    dist[i][j] = h.clone();
                }
            }
        }
        for c in cluster.iter_mut() {
            if *c == b {
                *c = a;
            }
        }
    }
    FiniteUltrametricSpace::from_fn(labels, s, |i, j| dist[i][j].clone()).expect("generator produces ultrametrics")
}

/// Random space on points `p0, p1, …`.
pub fn space<R: Rng>(rng: &mut R, n: usize, s: &RangeSet) -> FiniteUltrametricSpace {
    space_with_labels(rng, (0..n).map(|i| format!("p{i}")).collect(), s)
}

/// A symmetric zero-diagonal matrix that may or may not be an ultrametric:
/// either a random ultrametric with a few entries resampled, or i.i.d.
/// entries. Values always come from `s`.
pub fn symmetric_matrix<R: Rng>(rng: &mut R, n: usize, s: &RangeSet) -> Vec<Vec<Value>> {
    let mut d = if rng.gen_bool(0.7) {
        space(rng, n, s).rows()
    } else {
        let mut d = vec![vec![Value::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                d[i][j] = element(rng, s);
                d[j][i] = d[i][j].clone();
            }
        }
        d
    };
    if n >= 2 {
        let flips = rng.gen_range(0..=2);
        for _ in 0..flips {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            d[i][j] = element(rng, s);
            d[j][i] = d[i][j].clone();
        }
    }
    d
}

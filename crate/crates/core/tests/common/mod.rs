//! Independent oracles and cohort helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Minimum K-Medoids cost (Euclidean) over every k-subset of points.
pub fn exhaustive_cost(points: &[Vec<f64>], k: usize) -> f64 {
    let n = points.len();
    let d = |i: usize, j: usize| {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut best = f64::INFINITY;
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let cost: f64 = (0..n)
            .map(|i| subset.iter().map(|&m| d(i, m)).fold(f64::INFINITY, f64::min))
            .sum();
        best = best.min(cost);
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < n - k + i {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Up to 12 points in 24 dimensions drawn around a few random centers.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, usize) {
    let k = rng.random_range(1..=3);
    let n = rng.random_range(k.max(4)..=12);
    let blobs = rng.random_range(1..=4);
    let spread = rng.random_range(0.02..0.3);
    let centers: Vec<Vec<f64>> = (0..blobs)
        .map(|_| (0..24).map(|_| rng.random::<f64>()).collect())
        .collect();
    let noise = Normal::new(0.0, spread).unwrap();
    let points = (0..n)
        .map(|_| {
            let c = &centers[rng.random_range(0..blobs)];
            c.iter().map(|v| v + noise.sample(rng)).collect()
        })
        .collect();
    (points, k)
}

/// Σ q·log_K(q/p) term by term with base-2 logs.
pub fn re_oracle(p: &[f64], q: &[f64]) -> f64 {
    let k = p.len() as f64;
    let mut s = 0.0;
    for i in 0..p.len() {
        if q[i] > 0.0 {
            s += q[i] * (q[i] / p[i]).log2();
        }
    }
    s / k.log2()
}

/// Random probability vector with every entry positive.
pub fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.001..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Best root split by exhaustive search with exact integer arithmetic.
///
/// Maximizing the Gini decrease is maximizing `(aL²+bL²)/nL + (aR²+bR²)/nR`,
/// compared here by cross-multiplication. Ties go to the lowest feature,
/// then the lowest threshold. Returns `(feature, threshold)`.
pub fn brute_force_root(x: &[Vec<f64>], y: &[usize], min_leaf: usize) -> Option<(usize, f64)> {
    let n = x.len();
    let total = [y.iter().filter(|&&c| c == 0).count(), y.iter().filter(|&&c| c == 1).count()];
    if n < 2 * min_leaf || total[0] == 0 || total[1] == 0 {
        return None;
    }
    let sq = |c: [usize; 2]| (c[0] * c[0] + c[1] * c[1]) as u128;
    // (numerator, denominator) of the purity score of the whole node
    let parent = (sq(total), n as u128);
    let mut best: Option<((u128, u128), usize, f64)> = None;
    for f in 0..x[0].len() {
        let mut values: Vec<f64> = x.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let mut left = [0usize; 2];
            let mut right = [0usize; 2];
            for (row, &c) in x.iter().zip(y) {
                if row[f] <= t {
                    left[c] += 1;
                } else {
                    right[c] += 1;
                }
            }
            let (nl, nr) = ((left[0] + left[1]) as u128, (right[0] + right[1]) as u128);
            if nl < min_leaf as u128 || nr < min_leaf as u128 {
                continue;
            }
            let score = (sq(left) * nr + sq(right) * nl, nl * nr);
            // only splits that strictly reduce impurity
            if score.0 * parent.1 <= parent.0 * score.1 {
                continue;
            }
            let better = match &best {
                None => true,
                Some((b, _, _)) => score.0 * b.1 > b.0 * score.1,
            };
            if better {
                best = Some((score, f, t));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

/// Every file in `dir` (non-recursive) with its bytes.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        if e.file_type().unwrap().is_file() {
            out.insert(
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            );
        }
    }
    out
}

/// Names of files whose contents differ or exist on one side only.
pub fn diff_names(a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>) -> Vec<String> {
    let mut names: Vec<String> = a.keys().chain(b.keys()).cloned().collect();
    names.sort();
    names.dedup();
    names.retain(|n| a.get(n) != b.get(n));
    names
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

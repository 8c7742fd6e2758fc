//! K-Medoids by alternation with Park & Jun initialization, followed by a
//! swap refinement.
//!
//! Initialization picks the k points with the smallest normalized
//! distance sum `v_j = Σ_i d(i,j) / Σ_l d(i,l)`. Each iteration then assigns
//! every point to its nearest medoid and moves each medoid to the member
//! with the smallest total distance to the rest of its cluster. When the
//! assignment is stable, single medoid/non-medoid swaps are tried (best
//! improvement first, evaluated in O(n²) per pass) until none lowers the
//! cost. Alternation alone stalls in poor local optima when the initial
//! medoids all sit in one dense group.
//!
//! Every accepted step lowers the total cost by more than rounding noise and
//! the cost itself is an exactly rounded sum, so the recorded cost trace
//! never increases.

use super::distance::{DistanceMatrix, DistanceMetric};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoids {
    /// Medoid point indices, ascending. Cluster `c` has medoid `medoids[c]`.
    pub medoids: Vec<usize>,
    /// Cluster of each point, `0..k`.
    pub assignment: Vec<usize>,
    /// Σ distance(point, its medoid).
    pub cost: f64,
    /// Cost after every assignment step, starting with the initial one.
    pub cost_trace: Vec<f64>,
    /// Medoid-update plus swap steps performed; at most `max_iter`.
    pub iterations: usize,
}

/// Clusters `points` into `k` groups. See the module docs for the algorithm.
pub fn kmedoids<P: AsRef<[f64]> + Sync>(
    points: &[P],
    k: usize,
    metric: DistanceMetric,
    max_iter: usize,
) -> Result<KMedoids> {
    if points.is_empty() {
        return Err(Error::InvalidInput("k-medoids on an empty point set".into()));
    }
    check_k(points.len(), k, max_iter)?;
    kmedoids_on_matrix(&DistanceMatrix::new(points, metric), k, max_iter)
}

fn check_k(n: usize, k: usize, max_iter: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds point count {n}")));
    }
    if max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be at least 1".into()));
    }
    Ok(())
}

pub fn kmedoids_on_matrix(dist: &DistanceMatrix, k: usize, max_iter: usize) -> Result<KMedoids> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::InvalidInput("k-medoids on an empty point set".into()));
    }
    check_k(n, k, max_iter)?;

    let mut medoids = park_jun_init(dist, k);
    let (mut assignment, mut cost) = assign(dist, &medoids);
    let mut cost_trace = vec![cost];
    let mut iterations = 0;
    while iterations < max_iter {
        let updated = update_medoids(dist, &assignment, &medoids);
        if updated == medoids {
            break;
        }
        iterations += 1;
        medoids = updated;
        let (next, next_cost) = assign(dist, &medoids);
        cost_trace.push(next_cost);
        cost = next_cost;
        let stable = next == assignment;
        assignment = next;
        if stable {
            break;
        }
    }
    while iterations < max_iter {
        let Some((slot, candidate)) = best_swap(dist, &medoids, cost) else {
            break;
        };
        iterations += 1;
        medoids[slot] = candidate;
        let (next, next_cost) = assign(dist, &medoids);
        cost_trace.push(next_cost);
        cost = next_cost;
        assignment = next;
    }

    // Canonical labels: clusters ordered by medoid index.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| medoids[c]);
    let mut relabel = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let medoids = order.iter().map(|&c| medoids[c]).collect();
    let assignment = assignment.into_iter().map(|c| relabel[c]).collect();

    Ok(KMedoids {
        medoids,
        assignment,
        cost,
        cost_trace,
        iterations,
    })
}

/// The k most central points by normalized distance sum; ties go to the
/// lower index. Exact duplicates of an already chosen medoid are passed over
/// while enough distinct points remain.
fn park_jun_init(dist: &DistanceMatrix, k: usize) -> Vec<usize> {
    let n = dist.len();
    let row_sums: Vec<f64> = (0..n).map(|i| dist.row(i).iter().sum()).collect();
    let mut score = vec![0.0; n];
    for (i, &s) in row_sums.iter().enumerate() {
        if s > 0.0 {
            for (j, v) in dist.row(i).iter().enumerate() {
                score[j] += v / s;
            }
        }
    }
    let mut ranked: Vec<usize> = (0..n).collect();
    ranked.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));

    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for &j in &ranked {
        if chosen.len() == k {
            break;
        }
        if chosen.iter().all(|&m| dist.get(m, j) > 0.0) {
            chosen.push(j);
        }
    }
    // Fewer than k distinct points: fill with the best remaining duplicates.
    for &j in &ranked {
        if chosen.len() == k {
            break;
        }
        if !chosen.contains(&j) {
            chosen.push(j);
        }
    }
    chosen
}

/// Nearest-medoid assignment. A medoid always belongs to its own cluster;
/// other ties go to the lowest cluster index.
fn assign(dist: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let n = dist.len();
    let mut assignment = vec![0; n];
    let mut cost = ExactSum::default();
    for (i, slot) in assignment.iter_mut().enumerate() {
        if let Some(c) = medoids.iter().position(|&m| m == i) {
            *slot = c;
            continue;
        }
        let row = dist.row(i);
        let mut best = 0;
        let mut best_d = row[medoids[0]];
        for (c, &m) in medoids.iter().enumerate().skip(1) {
            if row[m] < best_d {
                best = c;
                best_d = row[m];
            }
        }
        *slot = best;
        cost.add(best_d);
    }
    (assignment, cost.value())
}

/// Relative margin a step must clear to count as an improvement.
const IMPROVEMENT_MARGIN: f64 = 1e-10;

/// Per cluster, the member minimizing the summed distance to all members.
/// The current medoid is kept unless a member beats it by more than
/// rounding noise; among equally good members the lowest index wins.
fn update_medoids(dist: &DistanceMatrix, assignment: &[usize], medoids: &[usize]) -> Vec<usize> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); medoids.len()];
    for (i, &c) in assignment.iter().enumerate() {
        members[c].push(i);
    }
    members
        .iter()
        .zip(medoids)
        .map(|(m, &current)| {
            let sum_for = |x: usize| {
                let row = dist.row(x);
                m.iter().map(|&y| row[y]).sum::<f64>()
            };
            let current_sum = sum_for(current);
            let mut best = current;
            let mut best_sum = current_sum * (1.0 - IMPROVEMENT_MARGIN);
            for &x in m {
                if x == current {
                    continue;
                }
                let s = sum_for(x);
                if s < best_sum {
                    best = x;
                    best_sum = s;
                }
            }
            best
        })
        .collect()
}

/// Best single swap of a medoid slot for a non-medoid point, if it lowers
/// the cost by more than the improvement margin.
///
/// For candidate x, removing the nearest medoid of point o costs
/// `min(d(o,x), second(o)) - nearest(o)`; removing any other medoid costs
/// `min(d(o,x) - nearest(o), 0)`. Summing both over o gives the change for
/// every slot in one pass over the points.
fn best_swap(dist: &DistanceMatrix, medoids: &[usize], cost: f64) -> Option<(usize, usize)> {
    let n = dist.len();
    let k = medoids.len();
    let mut is_medoid = vec![false; n];
    for &m in medoids {
        is_medoid[m] = true;
    }
    // nearest slot, nearest distance, second-nearest distance
    let near: Vec<(usize, f64, f64)> = (0..n)
        .map(|o| {
            let row = dist.row(o);
            let mut best = (0, f64::INFINITY, f64::INFINITY);
            for (c, &m) in medoids.iter().enumerate() {
                let d = if m == o { 0.0 } else { row[m] };
                if d < best.1 || (m == o && d <= best.1) {
                    best = (c, d, best.1);
                } else if d < best.2 {
                    best.2 = d;
                }
            }
            best
        })
        .collect();

    let threshold = -IMPROVEMENT_MARGIN * cost;
    let mut best: Option<(f64, usize, usize)> = None;
    let mut delta = vec![0.0; k];
    for x in (0..n).filter(|&x| !is_medoid[x]) {
        let row = dist.row(x);
        let mut shared = 0.0;
        delta.iter_mut().for_each(|d| *d = 0.0);
        for (o, &(slot, dn, ds)) in near.iter().enumerate() {
            let dox = row[o];
            let gain = (dox - dn).min(0.0);
            shared += gain;
            delta[slot] += dox.min(ds) - dn - gain;
        }
        for (slot, d) in delta.iter().enumerate() {
            let total = d + shared;
            if total < threshold && best.is_none_or(|(b, _, _)| total < b) {
                best = Some((total, slot, x));
            }
        }
    }
    best.map(|(_, slot, x)| (slot, x))
}

/// Exactly rounded floating-point sum (Shewchuk's partials), so the cost
/// does not depend on summation order.
#[derive(Default)]
struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            n -= 1;
            let x = hi;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Half-way correction, as in Python's math.fsum.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

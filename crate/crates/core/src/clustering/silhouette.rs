use super::distance::{DistanceMatrix, DistanceMetric};
use crate::error::{Error, Result};

/// Mean silhouette coefficient of a partition.
///
/// For point i, `a` is the mean distance to the other members of its
/// cluster and `b` the smallest mean distance to another cluster;
/// `s = (b - a) / max(a, b)`. Points in singleton clusters score 0.
/// Cluster labels may be any integers but at least two distinct labels are
/// required.
pub fn silhouette<P: AsRef<[f64]> + Sync>(
    points: &[P],
    assignment: &[usize],
    metric: DistanceMetric,
) -> Result<f64> {
    if points.len() != assignment.len() {
        return Err(Error::InvalidInput(format!(
            "{} points but {} labels",
            points.len(),
            assignment.len()
        )));
    }
    silhouette_on_matrix(&DistanceMatrix::new(points, metric), assignment)
}

pub fn silhouette_on_matrix(dist: &DistanceMatrix, assignment: &[usize]) -> Result<f64> {
    let n = dist.len();
    if n != assignment.len() {
        return Err(Error::InvalidInput(format!("{n} points but {} labels", assignment.len())));
    }
    // Dense relabeling 0..clusters in order of first appearance.
    let mut labels: Vec<usize> = Vec::new();
    let dense: Vec<usize> = assignment
        .iter()
        .map(|l| match labels.iter().position(|x| x == l) {
            Some(i) => i,
            None => {
                labels.push(*l);
                labels.len() - 1
            }
        })
        .collect();
    let clusters = labels.len();
    if clusters < 2 {
        return Err(Error::InvalidInput(
            "silhouette is undefined for fewer than two clusters".into(),
        ));
    }
    let mut sizes = vec![0usize; clusters];
    for &c in &dense {
        sizes[c] += 1;
    }

    let mut total = 0.0;
    let mut sums = vec![0.0; clusters];
    for i in 0..n {
        let own = dense[i];
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (j, d) in dist.row(i).iter().enumerate() {
            sums[dense[j]] += d;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..clusters)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distance::{DistanceMatrix, DistanceMetric};
use super::kmedoids::{kmedoids_on_matrix, DEFAULT_MAX_ITER};
use super::silhouette::silhouette_on_matrix;
use crate::error::{Error, Result};
use crate::ingestion::ConsumerId;
use crate::preprocessing::DailyProfile;
use crate::HOURS;

/// Upper bound on typical load profiles per consumer, one per season.
pub const MAX_TLPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterParams {
    pub metric: DistanceMetric,
    /// Recorded in the model for provenance. The initialization is
    /// deterministic, so the seed does not change results.
    pub seed: u64,
    pub k_min: usize,
    pub k_max: usize,
    pub max_iter: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            metric: DistanceMetric::Euclidean,
            seed: 0,
            k_min: 2,
            k_max: 10,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// A stage-1 medoid: an actual day of this consumer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalLoadProfile {
    pub consumer: ConsumerId,
    /// 1-based, at most [`MAX_TLPS`].
    pub index: u8,
    pub values: [f64; HOURS],
    pub member_days: Vec<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage1Result {
    pub consumer: ConsumerId,
    pub tlps: Vec<TypicalLoadProfile>,
    /// Every retained day and the index of the TLP it was grouped into.
    pub day_tlp: Vec<(NaiveDate, u8)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TlpRef {
    pub consumer: ConsumerId,
    pub index: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TlpAssignment {
    pub consumer: ConsumerId,
    pub index: u8,
    /// 1-based final cluster.
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayAssignment {
    pub consumer: ConsumerId,
    pub date: NaiveDate,
    /// 1-based final cluster.
    pub cluster: usize,
}

/// Stage-2 representative patterns and the final assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub metric: DistanceMetric,
    pub seed: u64,
    /// Medoid of cluster `c` is `medoids[c - 1]`.
    pub medoids: Vec<[f64; HOURS]>,
    pub medoid_tlps: Vec<TlpRef>,
    pub silhouette_by_k: BTreeMap<usize, f64>,
    pub tlp_assignment: Vec<TlpAssignment>,
    /// Persisted separately as CSV.
    #[serde(skip)]
    pub day_assignment: Vec<DayAssignment>,
}

fn bit_key(v: &[f64; HOURS]) -> [u64; HOURS] {
    v.map(f64::to_bits)
}

fn distinct_count<'a>(vectors: impl Iterator<Item = &'a [f64; HOURS]>) -> usize {
    vectors.map(bit_key).collect::<HashSet<_>>().len()
}

/// Stage 1 for one consumer: K-Medoids with k = min(4, distinct days).
///
/// `days` must all belong to the same consumer and be non-empty.
pub fn stage1_tlps(days: &[DailyProfile], metric: DistanceMetric, max_iter: usize) -> Result<Stage1Result> {
    let first = days
        .first()
        .ok_or_else(|| Error::InvalidInput("stage 1 needs at least one day".into()))?;
    if let Some(other) = days.iter().find(|d| d.consumer != first.consumer) {
        return Err(Error::InvalidInput(format!(
            "stage 1 mixes consumers {} and {}",
            first.consumer, other.consumer
        )));
    }
    let k = distinct_count(days.iter().map(|d| &d.values)).min(MAX_TLPS);
    let points: Vec<&[f64]> = days.iter().map(|d| &d.values[..]).collect();
    let dist = DistanceMatrix::new(&points, metric);
    let result = kmedoids_on_matrix(&dist, k, max_iter)?;

    let mut tlps: Vec<TypicalLoadProfile> = result
        .medoids
        .iter()
        .enumerate()
        .map(|(c, &m)| TypicalLoadProfile {
            consumer: first.consumer.clone(),
            index: (c + 1) as u8,
            values: days[m].values,
            member_days: Vec::new(),
        })
        .collect();
    let mut day_tlp = Vec::with_capacity(days.len());
    for (day, &c) in days.iter().zip(&result.assignment) {
        tlps[c].member_days.push(day.date);
        day_tlp.push((day.date, (c + 1) as u8));
    }
    Ok(Stage1Result {
        consumer: first.consumer.clone(),
        tlps,
        day_tlp,
    })
}

/// Stage 2: clusters all TLPs for every K in `k_min..=k_max` and keeps the
/// K with the highest mean silhouette (ties → smaller K).
///
/// Candidates with K above the number of distinct TLPs are skipped. Fewer
/// than two distinct TLPs is a degenerate input.
pub fn stage2_cluster(tlps: &[TypicalLoadProfile], params: &ClusterParams) -> Result<ClusterModel> {
    if params.k_min < 2 || params.k_min > params.k_max {
        return Err(Error::Config(format!(
            "invalid K range {}..={} (need 2 <= min <= max)",
            params.k_min, params.k_max
        )));
    }
    let distinct = distinct_count(tlps.iter().map(|t| &t.values));
    if distinct < 2 {
        return Err(Error::Degenerate(format!(
            "{} typical load profiles but only {distinct} distinct shape(s); representative patterns are undefined",
            tlps.len()
        )));
    }
    let candidates: Vec<usize> = (params.k_min..=params.k_max).filter(|&k| k <= distinct).collect();
    if candidates.is_empty() {
        return Err(Error::Degenerate(format!(
            "only {distinct} distinct typical load profiles, below the smallest candidate K = {}",
            params.k_min
        )));
    }

    let points: Vec<&[f64]> = tlps.iter().map(|t| &t.values[..]).collect();
    let dist = DistanceMatrix::new(&points, params.metric);
    let runs = candidates
        .par_iter()
        .map(|&k| {
            let r = kmedoids_on_matrix(&dist, k, params.max_iter)?;
            let s = silhouette_on_matrix(&dist, &r.assignment)?;
            Ok((k, r, s))
        })
        .collect::<Result<Vec<_>>>()?;

    let silhouette_by_k: BTreeMap<usize, f64> = runs.iter().map(|(k, _, s)| (*k, *s)).collect();
    let mut best = 0;
    for (i, (_, _, s)) in runs.iter().enumerate() {
        if *s > runs[best].2 {
            best = i;
        }
    }
    let (k, result, _) = runs.into_iter().nth(best).expect("at least one candidate");
    log::info!("stage 2 selected K = {k}");

    Ok(ClusterModel {
        k,
        metric: params.metric,
        seed: params.seed,
        medoids: result.medoids.iter().map(|&m| tlps[m].values).collect(),
        medoid_tlps: result
            .medoids
            .iter()
            .map(|&m| TlpRef {
                consumer: tlps[m].consumer.clone(),
                index: tlps[m].index,
            })
            .collect(),
        silhouette_by_k,
        tlp_assignment: tlps
            .iter()
            .zip(&result.assignment)
            .map(|(t, &c)| TlpAssignment {
                consumer: t.consumer.clone(),
                index: t.index,
                cluster: c + 1,
            })
            .collect(),
        day_assignment: Vec::new(),
    })
}

/// Gives every day the stage-2 cluster of its stage-1 TLP.
pub fn assign_days(stage1: &[Stage1Result], mut model: ClusterModel) -> Result<ClusterModel> {
    let lookup: HashMap<(&ConsumerId, u8), usize> = model
        .tlp_assignment
        .iter()
        .map(|a| ((&a.consumer, a.index), a.cluster))
        .collect();
    let mut days = Vec::new();
    for s in stage1 {
        for &(date, index) in &s.day_tlp {
            let cluster = *lookup.get(&(&s.consumer, index)).ok_or_else(|| {
                Error::Internal(format!(
                    "day {date} of consumer {} maps to TLP {index}, which has no stage-2 cluster",
                    s.consumer
                ))
            })?;
            days.push(DayAssignment {
                consumer: s.consumer.clone(),
                date,
                cluster,
            });
        }
    }
    model.day_assignment = days;
    Ok(model)
}

/// Runs both stages over all consumers and assigns every day.
pub fn cluster_days(profiles: &[DailyProfile], params: &ClusterParams) -> Result<(Vec<Stage1Result>, ClusterModel)> {
    let mut sorted = profiles.to_vec();
    sorted.sort_by(|a, b| (&a.consumer, a.date).cmp(&(&b.consumer, b.date)));
    let groups: Vec<&[DailyProfile]> = sorted.chunk_by(|a, b| a.consumer == b.consumer).collect();
    let stage1 = groups
        .par_iter()
        .map(|days| stage1_tlps(days, params.metric, params.max_iter))
        .collect::<Result<Vec<_>>>()?;
    let tlps: Vec<TypicalLoadProfile> = stage1.iter().flat_map(|s| s.tlps.iter().cloned()).collect();
    let model = stage2_cluster(&tlps, params)?;
    let model = assign_days(&stage1, model)?;
    Ok((stage1, model))
}

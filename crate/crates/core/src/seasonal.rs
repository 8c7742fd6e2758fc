//! Per-season cluster occupancy and the relative entropy between adjacent
//! seasons.
//!
//! For consumer n and season s, `p(k)` is the share of that season's days
//! (pooled over all years) assigned to final cluster k. The variation from
//! season s to s' is
//!
//! ```text
//! RE(s, s') = Σ_k p_s'(k) · log_K( p_s'(k) / p_s(k) )
//! ```
//!
//! weighted by the destination season and measured in base K, so a point
//! mass against a uniform distribution scores exactly 1 for any K.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::DayAssignment;
use crate::error::{Error, Result};
use crate::ingestion::{ConsumerId, Season, SeasonCalendar, SeasonChange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeasonalParams {
    /// Additive smoothing ε per cluster. Zero reproduces plain day shares,
    /// in which case RE may be infinite.
    pub smoothing: f64,
    /// Minimum days in a consumer-season for its distribution to be used.
    pub min_days: usize,
}

impl Default for SeasonalParams {
    fn default() -> Self {
        SeasonalParams {
            smoothing: 0.5,
            min_days: 14,
        }
    }
}

impl SeasonalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return Err(Error::Config(format!(
                "smoothing must be a finite value >= 0, got {}",
                self.smoothing
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonDistribution {
    pub consumer: ConsumerId,
    pub season: Season,
    /// Days per cluster (index k-1 for cluster k).
    pub counts: Vec<usize>,
    pub day_count: usize,
    pub probs: Vec<f64>,
}

impl SeasonDistribution {
    /// `probs[k] = (counts[k] + ε) / (day_count + ε·K)`.
    ///
    /// Fails when the season has fewer than `min_days` days or no mass at all.
    pub fn from_counts(
        consumer: ConsumerId,
        season: Season,
        counts: Vec<usize>,
        params: &SeasonalParams,
    ) -> Result<Self> {
        params.validate()?;
        let day_count: usize = counts.iter().sum();
        if day_count < params.min_days || day_count == 0 {
            return Err(Error::InvalidInput(format!(
                "consumer {consumer} has {day_count} {season} days, below the minimum of {}",
                params.min_days.max(1)
            )));
        }
        let k = counts.len() as f64;
        let denom = day_count as f64 + params.smoothing * k;
        let probs = counts
            .iter()
            .map(|&c| (c as f64 + params.smoothing) / denom)
            .collect();
        Ok(SeasonDistribution {
            consumer,
            season,
            counts,
            day_count,
            probs,
        })
    }
}

/// Occupancy distribution of one consumer in one season, from final day
/// assignments (clusters 1..=k).
pub fn season_distribution(
    assignments: &[DayAssignment],
    consumer: &ConsumerId,
    season: Season,
    k: usize,
    calendar: &SeasonCalendar,
    params: &SeasonalParams,
) -> Result<SeasonDistribution> {
    let mut counts = vec![0usize; k];
    for a in assignments.iter().filter(|a| &a.consumer == consumer) {
        if calendar.season_of(a.date) == season {
            *counts
                .get_mut(a.cluster.wrapping_sub(1))
                .ok_or_else(|| Error::Internal(format!("cluster {} outside 1..={k}", a.cluster)))? += 1;
        }
    }
    SeasonDistribution::from_counts(consumer.clone(), season, counts, params)
}

/// Relative entropy of two probability vectors in base `k`, weighted by `p_to`.
///
/// Terms with `p_to = 0` contribute nothing; a positive `p_to` against a zero
/// `p_from` yields +∞.
pub fn relative_entropy_probs(p_from: &[f64], p_to: &[f64], k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("log base K must be >= 2, got {k}")));
    }
    if p_from.len() != k || p_to.len() != k {
        return Err(Error::InvalidInput(format!(
            "distributions of length {} and {} do not match K = {k}",
            p_from.len(),
            p_to.len()
        )));
    }
    let ln_k = (k as f64).ln();
    let mut total = 0.0;
    for (&p, &q) in p_from.iter().zip(p_to) {
        if q > 0.0 {
            if p <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += q * (q / p).ln();
        }
    }
    // Clamp rounding residue; the divergence is non-negative.
    Ok((total / ln_k).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub consumer: ConsumerId,
    pub change: SeasonChange,
    /// Non-negative; +∞ only when smoothing is disabled.
    pub re: f64,
}

/// Variation from `p_from`'s season to `p_to`'s season for one consumer.
pub fn relative_entropy(p_from: &SeasonDistribution, p_to: &SeasonDistribution, k: usize) -> Result<EntropyRecord> {
    if p_from.consumer != p_to.consumer {
        return Err(Error::InvalidInput(format!(
            "distributions belong to different consumers ({} vs {})",
            p_from.consumer, p_to.consumer
        )));
    }
    if p_to.season != p_from.season.next() {
        return Err(Error::InvalidInput(format!(
            "{} → {} is not an adjacent season change",
            p_from.season, p_to.season
        )));
    }
    Ok(EntropyRecord {
        consumer: p_from.consumer.clone(),
        change: SeasonChange::starting_at(p_from.season),
        re: relative_entropy_probs(&p_from.probs, &p_to.probs, k)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsufficientSeason {
    pub consumer: ConsumerId,
    pub season: Season,
    pub day_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyTable {
    pub distributions: Vec<SeasonDistribution>,
    /// Consumer-major, then in season-change order.
    pub records: Vec<EntropyRecord>,
    pub insufficient: Vec<InsufficientSeason>,
    /// Consumer-changes with no record because a season was insufficient.
    pub skipped_records: usize,
}

/// Distributions and relative entropies for every consumer and adjacent
/// season change.
pub fn entropy_table(
    day_assignment: &[DayAssignment],
    k: usize,
    calendar: &SeasonCalendar,
    params: &SeasonalParams,
) -> Result<EntropyTable> {
    params.validate()?;
    let mut counts: BTreeMap<&ConsumerId, [Vec<usize>; 4]> = BTreeMap::new();
    for a in day_assignment {
        if a.cluster == 0 || a.cluster > k {
            return Err(Error::Internal(format!(
                "day {} of consumer {} has cluster {} outside 1..={k}",
                a.date, a.consumer, a.cluster
            )));
        }
        let entry = counts
            .entry(&a.consumer)
            .or_insert_with(|| std::array::from_fn(|_| vec![0; k]));
        let s = calendar.season_of(a.date).value() as usize - 1;
        entry[s][a.cluster - 1] += 1;
    }

    type PerConsumer = (Vec<SeasonDistribution>, Vec<EntropyRecord>, Vec<InsufficientSeason>, usize);
    let per_consumer: Vec<PerConsumer> = counts
        .into_par_iter()
        .map(|(consumer, by_season)| {
            let mut dists: [Option<SeasonDistribution>; 4] = Default::default();
            let mut insufficient = Vec::new();
            for (s, c) in by_season.into_iter().enumerate() {
                let season = Season::ALL[s];
                let day_count = c.iter().sum();
                match SeasonDistribution::from_counts(consumer.clone(), season, c, params) {
                    Ok(d) => dists[s] = Some(d),
                    Err(_) => insufficient.push(InsufficientSeason {
                        consumer: consumer.clone(),
                        season,
                        day_count,
                    }),
                }
            }
            let mut records = Vec::new();
            let mut skipped = 0;
            for change in SeasonChange::ALL {
                let from = &dists[change.from_season().value() as usize - 1];
                let to = &dists[change.to_season().value() as usize - 1];
                match (from, to) {
                    (Some(f), Some(t)) => records.push(relative_entropy(f, t, k)?),
                    _ => skipped += 1,
                }
            }
            Ok((dists.into_iter().flatten().collect(), records, insufficient, skipped))
        })
        .collect::<Result<_>>()?;

    let mut table = EntropyTable::default();
    for (d, r, i, s) in per_consumer {
        table.distributions.extend(d);
        table.records.extend(r);
        table.insufficient.extend(i);
        table.skipped_records += s;
    }
    if table.skipped_records > 0 {
        log::warn!(
            "{} consumer-season pairs below min_days; {} entropy records skipped",
            table.insufficient.len(),
            table.skipped_records
        );
    }
    Ok(table)
}

/// Linear-interpolation quantile of sorted data (the common "type 7"
/// definition): position `(n - 1)·q`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        return Some(sorted[lo]);
    }
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Tukey box-plot summary of one season change's relative entropies.
///
/// `min`/`max` are the whisker ends: the most extreme values within
/// 1.5·IQR of the quartiles. Values beyond them are listed in `outliers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub change: SeasonChange,
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub outliers: Vec<f64>,
    /// Infinite values (unsmoothed mode), left out of the statistics.
    pub non_finite: usize,
}

/// Box-plot statistics per season change, in season-change order. Changes
/// without finite records are omitted.
pub fn boxplot_stats(records: &[EntropyRecord]) -> Vec<BoxStats> {
    let mut out = Vec::new();
    for change in SeasonChange::ALL {
        let all: Vec<f64> = records.iter().filter(|r| r.change == change).map(|r| r.re).collect();
        let mut values: Vec<f64> = all.iter().copied().filter(|v| v.is_finite()).collect();
        if values.is_empty() {
            log::warn!("no finite relative entropy records for {change}; box plot omitted");
            continue;
        }
        values.sort_by(f64::total_cmp);
        let q = |p| quantile_sorted(&values, p).expect("non-empty");
        let (q1, median, q3) = (q(0.25), q(0.5), q(0.75));
        let iqr = q3 - q1;
        let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let inside: Vec<f64> = values
            .iter()
            .copied()
            .filter(|v| *v >= lo_fence && *v <= hi_fence)
            .collect();
        out.push(BoxStats {
            change,
            n: values.len(),
            min: inside.first().copied().unwrap_or(q1),
            q1,
            median,
            q3,
            max: inside.last().copied().unwrap_or(q3),
            outliers: values.iter().copied().filter(|v| *v < lo_fence || *v > hi_fence).collect(),
            non_finite: all.len() - values.len(),
        });
    }
    out
}

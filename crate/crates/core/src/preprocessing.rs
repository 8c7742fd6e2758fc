//! Turns hourly readings into per-consumer-day profiles normalized to [0, 1].

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingestion::{ConsumerId, Dataset};
use crate::HOURS;

/// A complete day of raw hourly kWh for one consumer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDay {
    pub consumer: ConsumerId,
    pub date: NaiveDate,
    pub values: [f64; HOURS],
}

/// A normalized consumer-day: the unit every later stage clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyProfile {
    pub consumer: ConsumerId,
    pub date: NaiveDate,
    pub values: [f64; HOURS],
}

/// Day-level outlier rule. A day is dropped when any hour is negative,
/// non-finite, or above `cap_multiplier` times the consumer's median
/// positive hourly load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutlierRule {
    pub cap_multiplier: f64,
}

impl Default for OutlierRule {
    fn default() -> Self {
        OutlierRule {
            cap_multiplier: 10.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessReport {
    /// Every consumer-day with at least one reading.
    pub days_total: usize,
    pub days_dropped_incomplete: usize,
    pub days_dropped_outlier: usize,
    pub days_retained: usize,
    /// Retained days with max == min (normalized to all 0.5); a subset of `days_retained`.
    pub days_constant: usize,
    pub retained_by_consumer: BTreeMap<ConsumerId, usize>,
    /// Consumers that appear in the input but keep no day; excluded downstream.
    pub consumers_without_days: Vec<ConsumerId>,
}

impl PreprocessReport {
    pub fn is_balanced(&self) -> bool {
        self.days_total
            == self.days_retained + self.days_dropped_incomplete + self.days_dropped_outlier
    }
}

/// Output of [`build_days`].
#[derive(Debug, Clone, Default)]
pub struct DayAssembly {
    /// Complete days in (consumer, date) order.
    pub days: Vec<RawDay>,
    /// Consumer-days with some but not all 24 hours.
    pub incomplete: usize,
    /// Consumers with at least one reading, in order.
    pub consumers: Vec<ConsumerId>,
}

/// Groups sorted readings into complete 24-hour days.
pub fn build_days(dataset: &Dataset) -> DayAssembly {
    let mut out = DayAssembly::default();
    let readings = &dataset.readings;
    let mut i = 0;
    while i < readings.len() {
        let (consumer, date) = (&readings[i].consumer, readings[i].date);
        if out.consumers.last() != Some(consumer) {
            out.consumers.push(consumer.clone());
        }
        let mut values = [f64::NAN; HOURS];
        let mut seen = 0;
        let mut j = i;
        while j < readings.len() && readings[j].consumer == *consumer && readings[j].date == date {
            let h = readings[j].hour as usize;
            if h < HOURS && values[h].is_nan() {
                values[h] = readings[j].load_kwh;
                seen += 1;
            }
            j += 1;
        }
        if seen == HOURS {
            out.days.push(RawDay {
                consumer: consumer.clone(),
                date,
                values,
            });
        } else {
            out.incomplete += 1;
        }
        i = j;
    }
    out
}

/// Applies `rule` and reports what was dropped. The report's incomplete
/// count is zero here; [`preprocess`] fills it in.
pub fn remove_outlier_days(days: Vec<RawDay>, rule: &OutlierRule) -> (Vec<RawDay>, PreprocessReport) {
    let mut report = PreprocessReport {
        days_total: days.len(),
        ..Default::default()
    };
    let medians = median_positive_load(&days);
    let mut kept = Vec::with_capacity(days.len());
    for day in days {
        let cap = medians
            .get(&day.consumer)
            .map(|m| m * rule.cap_multiplier)
            .unwrap_or(f64::INFINITY);
        let valid = day.values.iter().all(|v| v.is_finite() && *v >= 0.0 && *v <= cap);
        let entry = report
            .retained_by_consumer
            .entry(day.consumer.clone())
            .or_insert(0);
        if valid {
            *entry += 1;
            kept.push(day);
        } else {
            report.days_dropped_outlier += 1;
        }
    }
    report.days_retained = kept.len();
    report.consumers_without_days = report
        .retained_by_consumer
        .iter()
        .filter(|(_, n)| **n == 0)
        .map(|(c, _)| c.clone())
        .collect();
    report.retained_by_consumer.retain(|_, n| *n > 0);
    (kept, report)
}

/// Median of each consumer's finite, strictly positive hourly values.
fn median_positive_load(days: &[RawDay]) -> BTreeMap<ConsumerId, f64> {
    let mut by_consumer: BTreeMap<ConsumerId, Vec<f64>> = BTreeMap::new();
    for day in days {
        by_consumer
            .entry(day.consumer.clone())
            .or_default()
            .extend(day.values.iter().copied().filter(|v| v.is_finite() && *v > 0.0));
    }
    by_consumer
        .into_iter()
        .filter_map(|(c, mut v)| {
            if v.is_empty() {
                return None;
            }
            v.sort_by(f64::total_cmp);
            let n = v.len();
            let m = if n % 2 == 1 {
                v[n / 2]
            } else {
                0.5 * (v[n / 2 - 1] + v[n / 2])
            };
            Some((c, m))
        })
        .collect()
}

/// Grid the normalized values are snapped to (2^-20). Snapping makes the
/// output bit-identical under rescaling of the raw day, where plain
/// floating-point arithmetic would differ in the last few bits.
pub const NORMALIZED_RESOLUTION: f64 = 1.0 / (1u64 << 20) as f64;

/// Normalized values and whether the day was constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedDay {
    pub values: [f64; HOURS],
    pub constant: bool,
}

/// Min-max normalizes one day to [0, 1]; a constant day becomes all 0.5.
pub fn normalize_day(raw: &[f64; HOURS]) -> NormalizedDay {
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if !(range > 0.0) {
        return NormalizedDay {
            values: [0.5; HOURS],
            constant: true,
        };
    }
    let grid = 1.0 / NORMALIZED_RESOLUTION;
    let mut values = [0.0; HOURS];
    for (out, v) in values.iter_mut().zip(raw) {
        let x = ((v - min) / range).clamp(0.0, 1.0);
        *out = (x * grid).round() / grid;
    }
    NormalizedDay {
        values,
        constant: false,
    }
}

/// Full preprocessing: assemble days, drop outliers, normalize.
pub fn preprocess(dataset: &Dataset, rule: &OutlierRule) -> (Vec<DailyProfile>, PreprocessReport) {
    let assembly = build_days(dataset);
    let (kept, mut report) = remove_outlier_days(assembly.days, rule);
    report.days_total += assembly.incomplete;
    report.days_dropped_incomplete = assembly.incomplete;
    report.consumers_without_days = assembly
        .consumers
        .iter()
        .filter(|c| !report.retained_by_consumer.contains_key(*c))
        .cloned()
        .collect();
    for c in &report.consumers_without_days {
        log::warn!("consumer {c} has no retained days and is excluded");
    }

    let normalized: Vec<(DailyProfile, bool)> = kept
        .into_par_iter()
        .map(|day| {
            let n = normalize_day(&day.values);
            (
                DailyProfile {
                    consumer: day.consumer,
                    date: day.date,
                    values: n.values,
                },
                n.constant,
            )
        })
        .collect();
    report.days_constant = normalized.iter().filter(|(_, c)| *c).count();
    let profiles = normalized.into_iter().map(|(p, _)| p).collect();
    (profiles, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingestion::HourlyReading;
    use proptest::prelude::*;

    fn day0() -> NaiveDate {
        NaiveDate::from_ymd_opt(2015, 1, 1).unwrap()
    }

    fn readings(id: &str, date: NaiveDate, hours: impl Iterator<Item = u8>, kwh: f64) -> Vec<HourlyReading> {
        hours
            .map(|h| HourlyReading {
                consumer: ConsumerId::new(id).unwrap(),
                date,
                hour: h,
                load_kwh: kwh + h as f64 * 0.01,
            })
            .collect()
    }

    fn raw(id: &str, values: [f64; HOURS]) -> RawDay {
        RawDay {
            consumer: ConsumerId::new(id).unwrap(),
            date: day0(),
            values,
        }
    }

    #[test]
    fn full_day_yields_one_vector() {
        let ds = Dataset::new(readings("A", day0(), 0..24, 1.0), vec![]).unwrap();
        let a = build_days(&ds);
        assert_eq!(a.days.len(), 1);
        assert_eq!(a.incomplete, 0);
        assert_eq!(a.days[0].values[5], 1.05);
    }

    #[test]
    fn missing_hour_drops_day() {
        let ds = Dataset::new(readings("A", day0(), 0..23, 1.0), vec![]).unwrap();
        let a = build_days(&ds);
        assert!(a.days.is_empty());
        assert_eq!(a.incomplete, 1);
    }

    #[test]
    fn two_days_in_date_order() {
        let d2 = day0().succ_opt().unwrap();
        let mut r = readings("A", d2, 0..24, 2.0);
        r.extend(readings("A", day0(), 0..24, 1.0));
        let a = build_days(&Dataset::new(r, vec![]).unwrap());
        assert_eq!(a.days.iter().map(|d| d.date).collect::<Vec<_>>(), vec![day0(), d2]);
    }

    #[test]
    fn negative_reading_drops_day() {
        let mut v = [1.0; HOURS];
        v[3] = -0.1;
        let (kept, report) = remove_outlier_days(vec![raw("A", v), raw("A", [1.0; HOURS])], &OutlierRule::default());
        assert_eq!(kept.len(), 1);
        assert_eq!(report.days_dropped_outlier, 1);
    }

    #[test]
    fn value_within_cap_is_kept() {
        let mut v = [1.0; HOURS];
        v[0] = 9.5;
        let (kept, _) = remove_outlier_days(vec![raw("A", v)], &OutlierRule::default());
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn value_over_cap_is_dropped() {
        // median positive load is 1.0, so the cap is 10 kWh
        let mut spike = [1.0; HOURS];
        spike[12] = 25.0;
        let days = vec![raw("A", [1.0; HOURS]), raw("A", [1.0; HOURS]), raw("A", spike)];
        let (kept, report) = remove_outlier_days(days, &OutlierRule::default());
        assert_eq!(kept.len(), 2);
        assert_eq!(report.days_dropped_outlier, 1);
        assert_eq!(report.retained_by_consumer[&ConsumerId::new("A").unwrap()], 2);
    }

    #[test]
    fn consumer_without_days_is_flagged() {
        let mut bad = [1.0; HOURS];
        bad[0] = f64::NAN;
        let (_, report) = remove_outlier_days(vec![raw("A", bad), raw("B", [1.0; HOURS])], &OutlierRule::default());
        assert_eq!(report.consumers_without_days, vec![ConsumerId::new("A").unwrap()]);
        assert!(!report.retained_by_consumer.contains_key(&ConsumerId::new("A").unwrap()));
    }

    #[test]
    fn ramp_normalizes_to_t_over_23() {
        let mut r = [0.0; HOURS];
        for (t, v) in r.iter_mut().enumerate() {
            *v = t as f64;
        }
        let n = normalize_day(&r);
        assert!(!n.constant);
        for t in 0..HOURS {
            assert!((n.values[t] - t as f64 / 23.0).abs() <= NORMALIZED_RESOLUTION);
        }
        assert_eq!(n.values[0], 0.0);
        assert_eq!(n.values[23], 1.0);
    }

    #[test]
    fn constant_day_maps_to_half() {
        let n = normalize_day(&[3.0; HOURS]);
        assert!(n.constant);
        assert_eq!(n.values, [0.5; HOURS]);
    }

    #[test]
    fn midpoint_maps_to_half() {
        let mut r = [4.0; HOURS];
        r[0] = 2.0;
        r[1] = 6.0;
        assert_eq!(normalize_day(&r).values[5], 0.5);
    }

    #[test]
    fn preprocess_accounting_balances() {
        let d2 = day0().succ_opt().unwrap();
        let d3 = d2.succ_opt().unwrap();
        let mut r = readings("A", day0(), 0..24, 1.0);
        r.extend(readings("A", d2, 0..20, 1.0));
        r.extend(
            (0..24u8).map(|h| HourlyReading {
                consumer: ConsumerId::new("A").unwrap(),
                date: d3,
                hour: h,
                load_kwh: 2.0,
            }),
        );
        r.extend(readings("B", day0(), 0..5, 1.0));
        let ds = Dataset::new(r, vec![]).unwrap();
        let (profiles, report) = preprocess(&ds, &OutlierRule::default());
        assert_eq!(profiles.len(), 2);
        assert_eq!(report.days_total, 4);
        assert_eq!(report.days_dropped_incomplete, 2);
        assert_eq!(report.days_constant, 1);
        assert!(report.is_balanced());
        assert_eq!(report.consumers_without_days, vec![ConsumerId::new("B").unwrap()]);
    }

    fn arb_day() -> impl Strategy<Value = [f64; HOURS]> {
        prop::array::uniform24(0.0f64..100.0)
    }

    proptest! {
        #[test]
        fn scale_invariant(raw in arb_day(), c in 0.01f64..1000.0) {
            let scaled = raw.map(|v| v * c);
            let (a, b) = (normalize_day(&raw), normalize_day(&scaled));
            for t in 0..HOURS {
                prop_assert!((a.values[t] - b.values[t]).abs() <= NORMALIZED_RESOLUTION);
            }
        }

        #[test]
        fn shift_invariant(raw in arb_day(), c in 0.0f64..100.0) {
            let shifted = raw.map(|v| v + c);
            let (a, b) = (normalize_day(&raw), normalize_day(&shifted));
            for t in 0..HOURS {
                prop_assert!((a.values[t] - b.values[t]).abs() <= NORMALIZED_RESOLUTION);
            }
        }

        #[test]
        fn output_bounds(raw in arb_day()) {
            let n = normalize_day(&raw);
            prop_assert!(n.values.iter().all(|v| (0.0..=1.0).contains(v)));
            if !n.constant {
                prop_assert!(n.values.contains(&0.0));
                prop_assert!(n.values.contains(&1.0));
            }
        }
    }
}

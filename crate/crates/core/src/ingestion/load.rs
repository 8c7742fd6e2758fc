use std::path::Path;

use chrono::format::{parse, Item, Parsed, StrftimeItems};
use chrono::{NaiveDate, Timelike};
use serde::{Deserialize, Serialize};

use super::{reading_key, ConsumerId, Dataset, HourlyReading};
use crate::error::{Error, Result};
use crate::io;

/// Column binding for an hourly load CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadFormatConfig {
    pub consumer_col: String,
    pub timestamp_col: String,
    pub kwh_col: String,
    /// `strftime`-style layout. Minutes and seconds may be omitted; a UTC
    /// offset, if present, is parsed and ignored (local time as written).
    pub timestamp_format: String,
}

impl Default for LoadFormatConfig {
    fn default() -> Self {
        LoadFormatConfig {
            consumer_col: "dataid".into(),
            timestamp_col: "localhour".into(),
            kwh_col: "kwh".into(),
            timestamp_format: "%Y-%m-%d %H:%M:%S".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadIngestStats {
    pub rows_total: usize,
    pub rows_skipped: usize,
    pub duplicates: usize,
    /// First few skipped rows, for diagnostics.
    pub skipped_examples: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LoadIngest {
    pub dataset: Dataset,
    pub stats: LoadIngestStats,
}

const MAX_EXAMPLES: usize = 10;

/// Parses an hourly load CSV into a readings-only [`Dataset`].
///
/// Malformed rows are skipped and counted. Repeated (consumer, date, hour)
/// keys keep the last occurrence. More than half the rows skipped is fatal.
pub fn parse_load_csv(path: &Path, format: &LoadFormatConfig) -> Result<LoadIngest> {
    let items = timestamp_items(&format.timestamp_format)?;
    let mut rdr = io::csv_reader(path)?;
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            })
    };
    let (c_id, c_ts, c_kwh) = (
        col(&format.consumer_col)?,
        col(&format.timestamp_col)?,
        col(&format.kwh_col)?,
    );

    let mut stats = LoadIngestStats::default();
    let mut readings = Vec::new();
    let mut last_id: Option<ConsumerId> = None;
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                // Invalid UTF-8 or similar: the row is lost but the file may continue.
                stats.rows_total += 1;
                skip(&mut stats, format!("unreadable row: {e}"));
                continue;
            }
        }
        stats.rows_total += 1;
        let row = (record.get(c_id), record.get(c_ts), record.get(c_kwh));
        let (Some(id), Some(ts), Some(kwh)) = row else {
            skip(&mut stats, format!("short row {:?}", record.iter().collect::<Vec<_>>()));
            continue;
        };
        let consumer = match &last_id {
            Some(prev) if prev.as_str() == id.trim() => prev.clone(),
            _ => match ConsumerId::new(id) {
                Ok(c) => {
                    last_id = Some(c.clone());
                    c
                }
                Err(_) => {
                    skip(&mut stats, format!("empty consumer id in row with timestamp {ts:?}"));
                    continue;
                }
            },
        };
        let Some((date, hour)) = parse_timestamp(ts, &items) else {
            skip(&mut stats, format!("bad timestamp {ts:?} for consumer {consumer}"));
            continue;
        };
        let load_kwh = match kwh.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                skip(&mut stats, format!("bad load {kwh:?} for consumer {consumer} at {ts}"));
                continue;
            }
        };
        readings.push(HourlyReading {
            consumer,
            date,
            hour,
            load_kwh,
        });
    }

    if stats.rows_total > 0 && stats.rows_skipped * 2 > stats.rows_total {
        return Err(Error::TooManySkipped {
            path: path.to_path_buf(),
            skipped: stats.rows_skipped,
            total: stats.rows_total,
        });
    }

    // Stable sort keeps file order within a key, so the last of each run wins.
    readings.sort_by(|a, b| reading_key(a).cmp(&reading_key(b)));
    let mut deduped: Vec<HourlyReading> = Vec::with_capacity(readings.len());
    for r in readings {
        match deduped.last_mut() {
            Some(prev) if reading_key(prev) == reading_key(&r) => {
                stats.duplicates += 1;
                *prev = r;
            }
            _ => deduped.push(r),
        }
    }
    if stats.duplicates > 0 {
        log::warn!(
            "{}: {} duplicate (consumer, date, hour) rows, kept last occurrence",
            path.display(),
            stats.duplicates
        );
    }
    if stats.rows_skipped > 0 {
        log::warn!("{}: skipped {} malformed rows", path.display(), stats.rows_skipped);
    }

    Ok(LoadIngest {
        dataset: Dataset::new(deduped, Vec::new())?,
        stats,
    })
}

fn skip(stats: &mut LoadIngestStats, why: String) {
    stats.rows_skipped += 1;
    if stats.skipped_examples.len() < MAX_EXAMPLES {
        stats.skipped_examples.push(why);
    }
}

fn timestamp_items(fmt: &str) -> Result<Vec<Item<'_>>> {
    let items: Vec<Item<'_>> = StrftimeItems::new(fmt).collect();
    if items.iter().any(|i| matches!(i, Item::Error)) {
        return Err(Error::Config(format!("invalid timestamp format '{fmt}'")));
    }
    Ok(items)
}

/// Date and hour of a timestamp. Sub-hourly timestamps are rejected: the
/// pipeline expects one reading per hour.
fn parse_timestamp(s: &str, items: &[Item<'_>]) -> Option<(NaiveDate, u8)> {
    let mut parsed = Parsed::new();
    parse(&mut parsed, s, items.iter()).ok()?;
    if parsed.minute().is_none() {
        parsed.set_minute(0).ok()?;
    }
    let date = parsed.to_naive_date().ok()?;
    let time = parsed.to_naive_time().ok()?;
    if time.minute() != 0 || time.second() != 0 {
        return None;
    }
    Some((date, time.hour() as u8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn hourly_format() -> LoadFormatConfig {
        LoadFormatConfig {
            consumer_col: "id".into(),
            timestamp_col: "ts".into(),
            kwh_col: "kwh".into(),
            timestamp_format: "%Y-%m-%dT%H".into(),
        }
    }

    #[test]
    fn two_rows_two_readings() {
        let f = write_csv("id,ts,kwh\nA,2015-01-01T00,1.2\nA,2015-01-01T01,0.8\n");
        let out = parse_load_csv(f.path(), &hourly_format()).unwrap();
        assert_eq!(out.dataset.readings.len(), 2);
        assert_eq!(out.dataset.readings[1].hour, 1);
        assert_eq!(out.dataset.readings[0].load_kwh, 1.2);
        assert_eq!(out.stats.duplicates, 0);
    }

    #[test]
    fn repeated_row_counts_one_duplicate_and_keeps_last() {
        let f = write_csv(
            "id,ts,kwh\nA,2015-01-01T00,1.2\nA,2015-01-01T01,0.8\nA,2015-01-01T00,1.5\n",
        );
        let out = parse_load_csv(f.path(), &hourly_format()).unwrap();
        assert_eq!(out.dataset.readings.len(), 2);
        assert_eq!(out.stats.duplicates, 1);
        assert_eq!(out.dataset.readings[0].load_kwh, 1.5);
    }

    #[test]
    fn malformed_load_is_skipped() {
        let f = write_csv("id,ts,kwh\nA,2015-01-01T00,1.2\nA,2015-01-01T01,abc\nA,2015-01-01T02,0.3\n");
        let out = parse_load_csv(f.path(), &hourly_format()).unwrap();
        assert_eq!(out.dataset.readings.len(), 2);
        assert_eq!(out.stats.rows_skipped, 1);
        assert_eq!(out.stats.rows_total, 3);
    }

    #[test]
    fn missing_column_is_fatal() {
        let f = write_csv("id,time,kwh\nA,2015-01-01T00,1.2\n");
        let err = parse_load_csv(f.path(), &hourly_format()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn { ref column, .. } if column == "ts"));
    }

    #[test]
    fn mostly_unparseable_is_fatal() {
        let f = write_csv("id,ts,kwh\nA,01/01/2015 00:00,1.2\nA,01/01/2015 01:00,1.2\nA,2015-01-01T02,1\n");
        let err = parse_load_csv(f.path(), &hourly_format()).unwrap_err();
        assert!(matches!(err, Error::TooManySkipped { skipped: 2, total: 3, .. }));
    }

    #[test]
    fn unreadable_file_is_fatal() {
        let err = parse_load_csv(Path::new("/nonexistent/load.csv"), &hourly_format()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn offsets_are_ignored_and_subhourly_rejected() {
        let fmt = LoadFormatConfig {
            timestamp_format: "%Y-%m-%d %H:%M:%S%#z".into(),
            ..hourly_format()
        };
        let f = write_csv(
            "id,ts,kwh\nA,2015-03-08 02:00:00-06,1\nA,2015-03-08 03:00:00-05,2\nA,2015-03-08 03:15:00-05,2\n",
        );
        let out = parse_load_csv(f.path(), &fmt).unwrap();
        let hours: Vec<u8> = out.dataset.readings.iter().map(|r| r.hour).collect();
        assert_eq!(hours, vec![2, 3]);
        assert_eq!(out.stats.rows_skipped, 1);
    }

    #[test]
    fn parsing_is_idempotent() {
        let f = write_csv("id,ts,kwh\nB,2015-01-02T05,0.1\nA,2015-01-01T00,1.2\nA,2015-01-01T00,1.3\n");
        let a = parse_load_csv(f.path(), &hourly_format()).unwrap();
        let b = parse_load_csv(f.path(), &hourly_format()).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.stats, b.stats);
    }
}

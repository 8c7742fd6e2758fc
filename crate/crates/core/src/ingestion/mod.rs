//! Canonical data model for hourly household load and socioeconomic
//! attributes, plus the parsers that produce it.

mod canonical;
mod load;
mod season;
mod socio;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canonical::{read_dataset, write_dataset, READINGS_FILE, SOCIO_FILE};
pub use load::{parse_load_csv, LoadFormatConfig, LoadIngest, LoadIngestStats};
pub use season::{season_of, Season, SeasonCalendar, SeasonChange};
pub use socio::{parse_socio_csv, OrdinalEncoding, SocioFormatConfig, SocioIngest, SocioRowError};

/// Opaque household identifier (the `dataid` column in typical exports).
///
/// Cheap to clone; the string is shared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConsumerId(Arc<str>);

impl ConsumerId {
    pub fn new(id: impl AsRef<str>) -> Result<Self> {
        let id = id.as_ref().trim();
        if id.is_empty() {
            return Err(Error::InvalidInput("empty consumer id".into()));
        }
        Ok(ConsumerId(Arc::from(id)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ConsumerId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        ConsumerId::new(s)
    }
}

impl From<ConsumerId> for String {
    fn from(id: ConsumerId) -> String {
        id.0.to_string()
    }
}

impl fmt::Display for ConsumerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ConsumerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// One metered hour. `hour` is the hour of the local civil day, 0..=23.
///
/// Ingestion keeps any finite value, including negative ones (net metering
/// exports); physically invalid days are removed during preprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyReading {
    pub consumer: ConsumerId,
    pub date: NaiveDate,
    pub hour: u8,
    pub load_kwh: f64,
}

/// Household attributes used as classifier predictors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocioProfile {
    pub consumer: ConsumerId,
    /// Resident counts keyed by age-band label (e.g. `under5`, `over65`).
    pub residents_by_age: BTreeMap<String, u32>,
    /// Ordinal annual-income bracket.
    pub income_level: u32,
    /// Ordinal education bracket.
    pub education_level: u32,
}

/// Readings sorted by (consumer, date, hour), unique per key, plus any
/// socioeconomic profiles (sorted by consumer).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub readings: Vec<HourlyReading>,
    pub socio: Vec<SocioProfile>,
    /// First and last reading date; `None` when there are no readings.
    pub span: Option<(NaiveDate, NaiveDate)>,
}

impl Dataset {
    /// Builds a dataset, sorting both collections into canonical order.
    ///
    /// Fails if a (consumer, date, hour) key or a socio consumer repeats, or
    /// if an hour is out of range.
    pub fn new(mut readings: Vec<HourlyReading>, mut socio: Vec<SocioProfile>) -> Result<Self> {
        readings.sort_by(|a, b| reading_key(a).cmp(&reading_key(b)));
        for pair in readings.windows(2) {
            if reading_key(&pair[0]) == reading_key(&pair[1]) {
                return Err(Error::InvalidInput(format!(
                    "duplicate reading for consumer {} on {} hour {}",
                    pair[0].consumer, pair[0].date, pair[0].hour
                )));
            }
        }
        if let Some(r) = readings.iter().find(|r| r.hour > 23 || !r.load_kwh.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid reading for consumer {} on {} hour {}",
                r.consumer, r.date, r.hour
            )));
        }
        socio.sort_by(|a, b| a.consumer.cmp(&b.consumer));
        for pair in socio.windows(2) {
            if pair[0].consumer == pair[1].consumer {
                return Err(Error::DuplicateConsumer(pair[0].consumer.to_string()));
            }
        }
        let span = span_of(&readings);
        Ok(Dataset {
            readings,
            socio,
            span,
        })
    }

    /// Distinct consumers present in the readings, in canonical order.
    pub fn consumers(&self) -> Vec<ConsumerId> {
        let mut out: Vec<ConsumerId> = Vec::new();
        for r in &self.readings {
            if out.last() != Some(&r.consumer) {
                out.push(r.consumer.clone());
            }
        }
        out
    }

    pub fn socio_for(&self, consumer: &ConsumerId) -> Option<&SocioProfile> {
        self.socio
            .binary_search_by(|p| p.consumer.cmp(consumer))
            .ok()
            .map(|i| &self.socio[i])
    }
}

pub(crate) fn reading_key(r: &HourlyReading) -> (&ConsumerId, NaiveDate, u8) {
    (&r.consumer, r.date, r.hour)
}

fn span_of(readings: &[HourlyReading]) -> Option<(NaiveDate, NaiveDate)> {
    let first = readings.iter().map(|r| r.date).min()?;
    let last = readings.iter().map(|r| r.date).max()?;
    Some((first, last))
}

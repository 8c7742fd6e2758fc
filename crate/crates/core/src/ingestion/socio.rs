use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConsumerId, SocioProfile};
use crate::error::{Error, Result};
use crate::io;

/// String → ordinal code for a bracketed attribute.
///
/// Either an ordered list (code = position, starting at 0) or an explicit map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrdinalEncoding {
    Order(Vec<String>),
    Codes(BTreeMap<String, u32>),
}

impl OrdinalEncoding {
    pub fn encode(&self, raw: &str) -> Option<u32> {
        match self {
            OrdinalEncoding::Order(values) => values.iter().position(|v| v == raw).map(|i| i as u32),
            OrdinalEncoding::Codes(map) => map.get(raw).copied(),
        }
    }
}

/// Column binding for the household metadata CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocioFormatConfig {
    #[serde(default = "default_consumer_col")]
    pub consumer_col: String,
    /// Age-band label → source column holding the resident count.
    pub age_band_cols: BTreeMap<String, String>,
    pub income_col: String,
    pub education_col: String,
    /// Encoding for income brackets; `None` means the column is already an integer code.
    #[serde(default)]
    pub income_order: Option<OrdinalEncoding>,
    #[serde(default)]
    pub education_order: Option<OrdinalEncoding>,
    /// Treat blank age-band cells as zero residents instead of rejecting the row.
    #[serde(default)]
    pub blank_count_as_zero: bool,
}

fn default_consumer_col() -> String {
    "dataid".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocioRowError {
    /// 1-based data row number (header excluded).
    pub row: usize,
    pub consumer: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SocioIngest {
    /// Sorted by consumer.
    pub profiles: Vec<SocioProfile>,
    pub errors: Vec<SocioRowError>,
}

/// Parses one socioeconomic profile per row. Rows with unencodable values
/// are reported in `errors` and skipped; a repeated consumer id is fatal.
pub fn parse_socio_csv(path: &Path, format: &SocioFormatConfig) -> Result<SocioIngest> {
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
    let c_id = col(&format.consumer_col)?;
    let c_income = col(&format.income_col)?;
    let c_edu = col(&format.education_col)?;
    let bands = format
        .age_band_cols
        .iter()
        .map(|(label, column)| Ok((label.clone(), col(column)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut seen = HashSet::new();
    let mut profiles = Vec::new();
    let mut errors = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                errors.push(SocioRowError {
                    row,
                    consumer: None,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let field = |c: usize| record.get(c).unwrap_or("");
        let consumer = match ConsumerId::new(field(c_id)) {
            Ok(c) => c,
            Err(_) => {
                errors.push(SocioRowError {
                    row,
                    consumer: None,
                    message: "empty consumer id".into(),
                });
                continue;
            }
        };
        if !seen.insert(consumer.clone()) {
            return Err(Error::DuplicateConsumer(consumer.to_string()));
        }
        let parsed = (|| -> std::result::Result<SocioProfile, String> {
            let mut residents_by_age = BTreeMap::new();
            for (label, c) in &bands {
                let raw = field(*c);
                let count = if raw.is_empty() && format.blank_count_as_zero {
                    0
                } else {
                    parse_count(raw).ok_or_else(|| format!("age band '{label}': bad count {raw:?}"))?
                };
                residents_by_age.insert(label.clone(), count);
            }
            let income_level = encode(field(c_income), format.income_order.as_ref())
                .ok_or_else(|| format!("unmapped income value {:?}", field(c_income)))?;
            let education_level = encode(field(c_edu), format.education_order.as_ref())
                .ok_or_else(|| format!("unmapped education value {:?}", field(c_edu)))?;
            Ok(SocioProfile {
                consumer: consumer.clone(),
                residents_by_age,
                income_level,
                education_level,
            })
        })();
        match parsed {
            Ok(p) => profiles.push(p),
            Err(message) => errors.push(SocioRowError {
                row,
                consumer: Some(consumer.to_string()),
                message,
            }),
        }
    }
    if !errors.is_empty() {
        log::warn!("{}: {} socio rows skipped", path.display(), errors.len());
    }
    profiles.sort_by(|a, b| a.consumer.cmp(&b.consumer));
    Ok(SocioIngest { profiles, errors })
}

/// Non-negative integer count; accepts `2` and `2.0` (spreadsheet exports).
fn parse_count(raw: &str) -> Option<u32> {
    if let Ok(v) = raw.parse::<u32>() {
        return Some(v);
    }
    let v = raw.parse::<f64>().ok()?;
    (v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64).then_some(v as u32)
}

fn encode(raw: &str, encoding: Option<&OrdinalEncoding>) -> Option<u32> {
    match encoding {
        Some(enc) => enc.encode(raw),
        None => parse_count(raw),
    }
}

//! Variation labels from relative entropy, and per-season-change decision
//! trees over socioeconomic predictors.

mod cv;
mod threshold;
mod tree;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingestion::{ConsumerId, SeasonChange, SocioProfile};
use crate::seasonal::EntropyRecord;

pub use cv::{cross_validate, stratified_folds, CvReport};
pub use threshold::{compute_threshold, reference_pair, ThresholdMode, ThresholdSpec};
pub use tree::{predictor_importance, train_tree, DecisionTree, ImportanceReport, Node, TreeParams};

pub const INCOME_FEATURE: &str = "income_level";
pub const EDUCATION_FEATURE: &str = "education_level";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NoVariation = 0,
    Variation = 1,
}

impl Label {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Label {
        if i == 0 {
            Label::NoVariation
        } else {
            Label::Variation
        }
    }

    /// `Variation` iff `re` is strictly above the threshold.
    pub fn from_entropy(re: f64, threshold: f64) -> Label {
        if re > threshold {
            Label::Variation
        } else {
            Label::NoVariation
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::NoVariation => "no_variation",
            Label::Variation => "variation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationRow {
    pub consumer: ConsumerId,
    pub features: Vec<f64>,
    pub re: f64,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationDataset {
    pub change: SeasonChange,
    pub feature_names: Vec<String>,
    pub threshold: f64,
    pub rows: Vec<VariationRow>,
    /// Records dropped because the consumer has no usable socio profile.
    pub excluded_without_socio: usize,
}

impl VariationDataset {
    pub fn labels(&self) -> Vec<Label> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn variation_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.label == Label::Variation).count() as f64 / self.rows.len() as f64
    }
}

/// Predictor order shared by every classifier: age bands (sorted by
/// label), then income, then education.
pub fn feature_names(socio: &[SocioProfile]) -> Vec<String> {
    let bands: BTreeSet<&String> = socio.iter().flat_map(|p| p.residents_by_age.keys()).collect();
    bands
        .into_iter()
        .cloned()
        .chain([INCOME_FEATURE.to_string(), EDUCATION_FEATURE.to_string()])
        .collect()
}

fn features_of(profile: &SocioProfile, names: &[String]) -> Option<Vec<f64>> {
    names
        .iter()
        .map(|n| match n.as_str() {
            INCOME_FEATURE => Some(profile.income_level as f64),
            EDUCATION_FEATURE => Some(profile.education_level as f64),
            band => profile.residents_by_age.get(band).map(|&c| c as f64),
        })
        .collect()
}

/// Labelled rows for one season change. `socio` must be sorted by consumer.
pub fn build_variation_dataset(
    change: SeasonChange,
    records: &[EntropyRecord],
    socio: &[SocioProfile],
    threshold: f64,
) -> Result<VariationDataset> {
    let names = feature_names(socio);
    let mut rows = Vec::new();
    let mut excluded = 0;
    for r in records.iter().filter(|r| r.change == change) {
        let profile = socio
            .binary_search_by(|p| p.consumer.cmp(&r.consumer))
            .ok()
            .map(|i| &socio[i]);
        match profile.and_then(|p| features_of(p, &names)) {
            Some(features) => rows.push(VariationRow {
                consumer: r.consumer.clone(),
                features,
                re: r.re,
                label: Label::from_entropy(r.re, threshold),
            }),
            None => excluded += 1,
        }
    }
    if excluded > 0 {
        log::warn!("{change}: {excluded} consumers without socio profile excluded");
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no labelled rows for {change} ({excluded} excluded without socio data)"
        )));
    }
    Ok(VariationDataset {
        change,
        feature_names: names,
        threshold,
        rows,
        excluded_without_socio: excluded,
    })
}

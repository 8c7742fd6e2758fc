use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seasonal::{quantile_sorted, relative_entropy_probs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// RE between a uniform distribution and one with a fraction of mass
    /// shifted onto a single cluster; the parameter is that fraction.
    ReferenceDistribution,
    /// Empirical quantile of the observed REs; the parameter is the level.
    Quantile,
    /// The parameter itself.
    Absolute,
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::ReferenceDistribution => "reference_distribution",
            ThresholdMode::Quantile => "quantile",
            ThresholdMode::Absolute => "absolute",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference_distribution" | "reference" => Ok(ThresholdMode::ReferenceDistribution),
            "quantile" => Ok(ThresholdMode::Quantile),
            "absolute" => Ok(ThresholdMode::Absolute),
            other => Err(Error::Config(format!("unknown threshold mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub mode: ThresholdMode,
    pub parameter: f64,
}

impl Default for ThresholdSpec {
    /// Two thirds of the observed REs at or below the threshold.
    fn default() -> Self {
        ThresholdSpec {
            mode: ThresholdMode::Quantile,
            parameter: 2.0 / 3.0,
        }
    }
}

impl ThresholdSpec {
    pub fn validate(&self) -> Result<()> {
        let p = self.parameter;
        let ok = match self.mode {
            ThresholdMode::Quantile => p > 0.0 && p < 1.0,
            ThresholdMode::Absolute => p >= 0.0 && p.is_finite(),
            ThresholdMode::ReferenceDistribution => p > 0.0 && p <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("threshold parameter {p} is invalid for mode {}", self.mode)))
        }
    }
}

/// The canonical pair for the reference mode: `p` uniform over K clusters
/// and `q` with `shift` of the mass of clusters 2..K moved pro-rata onto
/// cluster 1, i.e. `q1 = 1/K + shift·(K-1)/K`, `qk = (1 - shift)/K`.
pub fn reference_pair(k: usize, shift: f64) -> (Vec<f64>, Vec<f64>) {
    let kf = k as f64;
    let p = vec![1.0 / kf; k];
    let mut q = vec![(1.0 - shift) / kf; k];
    q[0] = 1.0 / kf + shift * (kf - 1.0) / kf;
    (p, q)
}

/// Threshold separating `variation` from `no_variation`.
///
/// `values` are the relative entropies the quantile mode is calibrated on;
/// non-finite values sort above every finite one.
pub fn compute_threshold(spec: &ThresholdSpec, values: &[f64], k: usize) -> Result<f64> {
    spec.validate()?;
    match spec.mode {
        ThresholdMode::Absolute => Ok(spec.parameter),
        ThresholdMode::ReferenceDistribution => {
            let (p, q) = reference_pair(k, spec.parameter);
            relative_entropy_probs(&p, &q, k)
        }
        ThresholdMode::Quantile => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            quantile_sorted(&sorted, spec.parameter)
                .ok_or_else(|| Error::InvalidInput("no relative entropy values to calibrate on".into()))
        }
    }
}

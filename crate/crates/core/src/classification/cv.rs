use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow, TreeParams};
use super::{Label, VariationDataset};
use crate::error::{Error, Result};

/// Fold index of every row. Rows of each class are shuffled with the seed
/// and dealt round-robin; the dealer continues from one class to the next
/// so fold sizes differ by at most one.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() < folds {
        return Err(Error::InvalidInput(format!(
            "{} rows cannot fill {folds} folds",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for class in [Label::NoVariation, Label::Variation] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng);
        for r in rows {
            fold_of[r] = next;
            next = (next + 1) % folds;
        }
    }
    Ok(fold_of)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: usize,
    pub seed: u64,
    pub fold_sizes: Vec<usize>,
    pub fold_accuracy: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over folds.
    pub std: f64,
    pub warnings: Vec<String>,
}

pub fn cross_validate(dataset: &VariationDataset, folds: usize, seed: u64, params: &TreeParams) -> Result<CvReport> {
    let labels = dataset.labels();
    let fold_of = stratified_folds(&labels, folds, seed)?;
    let x: Vec<Vec<f64>> = dataset.rows.iter().map(|r| r.features.clone()).collect();
    let mut warnings = Vec::new();
    let mut fold_sizes = Vec::with_capacity(folds);
    let mut fold_accuracy = Vec::with_capacity(folds);
    for f in 0..folds {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..x.len()).partition(|&i| fold_of[i] == f);
        for (part, rows) in [("held-out", &test), ("training", &train)] {
            for class in [Label::NoVariation, Label::Variation] {
                if !rows.iter().any(|&i| labels[i] == class) {
                    warnings.push(format!("fold {f}: {part} rows contain no {class}"));
                }
            }
        }
        let tree = grow(&x, &labels, &train, params);
        let correct = test.iter().filter(|&&i| tree.predict(&x[i]) == labels[i]).count();
        fold_sizes.push(test.len());
        fold_accuracy.push(correct as f64 / test.len() as f64);
    }
    for w in &warnings {
        log::warn!("{}: {w}", dataset.change);
    }
    let mean = fold_accuracy.iter().sum::<f64>() / folds as f64;
    let var = fold_accuracy.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (folds - 1) as f64;
    Ok(CvReport {
        folds,
        seed,
        fold_sizes,
        fold_accuracy,
        mean,
        std: var.sqrt(),
        warnings,
    })
}

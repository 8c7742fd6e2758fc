//! Binary CART classifier grown best-first under a split budget.
//!
//! Each step scans every frontier leaf for its best Gini split and applies
//! the single split with the largest weighted impurity decrease
//! `(n_t·G_t − n_L·G_L − n_R·G_R) / N`. Growth stops at `max_splits`, when
//! no leaf can be split with both children holding `min_leaf` rows, or when
//! no split lowers impurity.

use serde::{Deserialize, Serialize};

use super::{Label, VariationDataset};
use crate::ingestion::SeasonChange;

/// Gains at or below this are treated as zero.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub max_splits: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_splits: 20,
            min_leaf: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        class: Label,
        /// Training rows per class, indexed by [`Label::index`].
        counts: [usize; 2],
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
        counts: [usize; 2],
        impurity_decrease: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub feature_names: Vec<String>,
    /// Node 0 is the root.
    pub nodes: Vec<Node>,
    pub split_count: usize,
    pub n_train: usize,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> Label {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Index of the leaf a row lands in.
    pub fn leaf_of(&self, x: &[f64]) -> usize {
        let mut i = 0;
        while let Node::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } = &self.nodes[i]
        {
            i = if x[*feature] <= *threshold { *left } else { *right };
        }
        i
    }

    pub fn splits(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split {
                feature,
                threshold,
                impurity_decrease,
                ..
            } => Some((*feature, *threshold, *impurity_decrease)),
            Node::Leaf { .. } => None,
        })
    }

    pub fn root_split(&self) -> Option<(usize, f64, f64)> {
        match &self.nodes[0] {
            Node::Split {
                feature,
                threshold,
                impurity_decrease,
                ..
            } => Some((*feature, *threshold, *impurity_decrease)),
            Node::Leaf { .. } => None,
        }
    }
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = counts[0] as f64 / n;
    let q = counts[1] as f64 / n;
    1.0 - p * p - q * q
}

/// Majority class; a tie goes to `NoVariation`.
fn majority(counts: [usize; 2]) -> Label {
    if counts[1] > counts[0] {
        Label::Variation
    } else {
        Label::NoVariation
    }
}

fn class_counts(rows: &[usize], labels: &[Label]) -> [usize; 2] {
    let mut c = [0; 2];
    for &r in rows {
        c[labels[r].index()] += 1;
    }
    c
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Best split of one node: largest gain, ties to the lowest feature index
/// and then the lowest threshold.
fn best_split(rows: &[usize], x: &[Vec<f64>], labels: &[Label], n_total: usize, min_leaf: usize) -> Option<Candidate> {
    let n = rows.len();
    let min_leaf = min_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let parent = class_counts(rows, labels);
    if parent[0] == 0 || parent[1] == 0 {
        return None;
    }
    let weight = |c: [usize; 2]| (c[0] + c[1]) as f64 * gini(c);
    let parent_term = weight(parent);
    let n_features = x.first().map_or(0, |r| r.len());

    let mut best: Option<Candidate> = None;
    let mut order = rows.to_vec();
    for f in 0..n_features {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = [0usize; 2];
        for i in 0..n - 1 {
            left[labels[order[i]].index()] += 1;
            let (lo, hi) = (x[order[i]][f], x[order[i + 1]][f]);
            if lo == hi || i + 1 < min_leaf || n - i - 1 < min_leaf {
                continue;
            }
            let right = [parent[0] - left[0], parent[1] - left[1]];
            let gain = (parent_term - weight(left) - weight(right)) / n_total as f64;
            if gain > MIN_GAIN && best.is_none_or(|b| gain > b.gain) {
                best = Some(Candidate {
                    feature: f,
                    threshold: lo + (hi - lo) / 2.0,
                    gain,
                });
            }
        }
    }
    best
}

/// Grows a tree on the dataset's rows. A dataset with fewer than
/// `2·min_leaf` rows or a single class yields a one-leaf stump.
pub fn train_tree(dataset: &VariationDataset, params: &TreeParams) -> DecisionTree {
    let x: Vec<Vec<f64>> = dataset.rows.iter().map(|r| r.features.clone()).collect();
    let labels = dataset.labels();
    let all: Vec<usize> = (0..x.len()).collect();
    let tree = grow(&x, &labels, &all, params);
    if tree.split_count == 0 {
        log::warn!(
            "{}: tree has no splits ({} rows, class counts {:?})",
            dataset.change,
            x.len(),
            class_counts(&all, &labels)
        );
    }
    DecisionTree {
        feature_names: dataset.feature_names.clone(),
        ..tree
    }
}

/// Tree over a subset of rows (used directly by cross-validation).
pub(crate) fn grow(x: &[Vec<f64>], labels: &[Label], rows: &[usize], params: &TreeParams) -> DecisionTree {
    let n_total = rows.len();
    let root_counts = class_counts(rows, labels);
    let mut nodes = vec![Node::Leaf {
        class: majority(root_counts),
        counts: root_counts,
    }];
    // Frontier: (node index, rows, best candidate).
    let mut frontier: Vec<(usize, Vec<usize>, Option<Candidate>)> = vec![(
        0,
        rows.to_vec(),
        best_split(rows, x, labels, n_total, params.min_leaf),
    )];
    let mut split_count = 0;
    while split_count < params.max_splits {
        // Largest gain; equal gains go to the earliest-created leaf.
        let mut pick: Option<usize> = None;
        for (i, (node, _, cand)) in frontier.iter().enumerate() {
            let Some(c) = cand else { continue };
            let better = match pick {
                None => true,
                Some(p) => {
                    let (pn, _, pc) = &frontier[p];
                    let pc = pc.expect("picked leaf has a candidate");
                    c.gain > pc.gain || (c.gain == pc.gain && node < pn)
                }
            };
            if better {
                pick = Some(i);
            }
        }
        let Some(p) = pick else { break };
        let (node, node_rows, cand) = frontier.swap_remove(p);
        let cand = cand.expect("picked leaf has a candidate");
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = node_rows
            .iter()
            .partition(|&&r| x[r][cand.feature] <= cand.threshold);
        let (lc, rc) = (class_counts(&left_rows, labels), class_counts(&right_rows, labels));
        let (li, ri) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::Leaf {
            class: majority(lc),
            counts: lc,
        });
        nodes.push(Node::Leaf {
            class: majority(rc),
            counts: rc,
        });
        nodes[node] = Node::Split {
            feature: cand.feature,
            threshold: cand.threshold,
            left: li,
            right: ri,
            counts: class_counts(&node_rows, labels),
            impurity_decrease: cand.gain,
        };
        split_count += 1;
        for (idx, r) in [(li, left_rows), (ri, right_rows)] {
            let c = best_split(&r, x, labels, n_total, params.min_leaf);
            frontier.push((idx, r, c));
        }
    }
    DecisionTree {
        feature_names: Vec::new(),
        nodes,
        split_count,
        n_train: n_total,
    }
}

/// Per-feature share of the tree's total impurity decrease.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub change: SeasonChange,
    pub feature_names: Vec<String>,
    /// Sums to 1, or all zeros for a stump.
    pub importance: Vec<f64>,
    /// Unnormalized impurity decrease per feature.
    pub raw: Vec<f64>,
}

impl ImportanceReport {
    /// Features ordered by importance (descending; ties by feature order).
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(usize, f64)> = self.importance.iter().copied().enumerate().collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.into_iter().map(|(i, s)| (self.feature_names[i].as_str(), s)).collect()
    }

    pub fn top(&self) -> Option<&str> {
        self.ranked().first().filter(|(_, s)| *s > 0.0).map(|(n, _)| *n)
    }
}

pub fn predictor_importance(tree: &DecisionTree, change: SeasonChange) -> ImportanceReport {
    let mut raw = vec![0.0; tree.feature_names.len()];
    for (f, _, gain) in tree.splits() {
        raw[f] += gain;
    }
    let total: f64 = raw.iter().sum();
    let importance = if total > 0.0 {
        raw.iter().map(|v| v / total).collect()
    } else {
        vec![0.0; raw.len()]
    };
    ImportanceReport {
        change,
        feature_names: tree.feature_names.clone(),
        importance,
        raw,
    }
}

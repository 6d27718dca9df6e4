//! Native learners: C4.5-style trees with reduced-error pruning, PART-style
//! rules, and information-gain attribute ranking.
//!
//! Learners see a [`Table`]: the feature columns of a dataset as plain
//! numeric values with missing slots. Anything non-numeric in a feature
//! column counts as missing. All weights are f64 because missing-value
//! routing splits instances fractionally.

pub mod part;
pub mod split;
pub mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, PopularityClass, Value};

pub use part::{classify_rules, part_learn, CmpOp, Condition, Rule, RuleList};
pub use split::{best_split, numeric_split_gain, rank_attributes, RankedAttribute, Split};
pub use tree::{
    classify_tree, grow_tree, reduced_error_prune, train_tree, Branch, DecisionTree,
};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("entropy of an empty distribution is undefined")]
    EmptyDistribution,
    #[error("model line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerParams {
    /// Minimum instance weight per leaf; growth stops below twice this.
    pub min_leaf: usize,
    /// Fraction of the training data held out for reduced-error pruning.
    pub prune_fraction: f64,
    pub seed: u64,
    /// Select splits by gain ratio (with the mean-gain admissibility
    /// filter); plain information gain when false.
    pub use_gain_ratio: bool,
}

impl Default for LearnerParams {
    fn default() -> LearnerParams {
        LearnerParams {
            min_leaf: 2,
            prune_fraction: 1.0 / 3.0,
            seed: 1,
            use_gain_ratio: true,
        }
    }
}

/// Class weights in the fixed label order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassDistribution {
    pub weights: [f64; 4],
}

impl ClassDistribution {
    pub fn from_classes<I: IntoIterator<Item = PopularityClass>>(classes: I) -> ClassDistribution {
        let mut dist = ClassDistribution::default();
        for class in classes {
            dist.add(class, 1.0);
        }
        dist
    }

    pub fn add(&mut self, class: PopularityClass, weight: f64) {
        self.weights[class.index()] += weight;
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Heaviest label; ties go to the earlier label in the fixed order.
    pub fn majority(&self) -> PopularityClass {
        let mut best = PopularityClass::ALL[0];
        let mut best_w = self.weights[0];
        for class in &PopularityClass::ALL[1..] {
            let w = self.weights[class.index()];
            if w > best_w {
                best = *class;
                best_w = w;
            }
        }
        best
    }
}

/// −Σ pᵢ log₂ pᵢ in bits over the nonzero proportions.
pub fn entropy(dist: &ClassDistribution) -> Result<f64, LearnError> {
    let total = dist.total();
    if total <= 0.0 {
        return Err(LearnError::EmptyDistribution);
    }
    Ok(entropy_of(&dist.weights, total))
}

/// Hot-path entropy; caller guarantees total > 0.
pub(crate) fn entropy_of(weights: &[f64; 4], total: f64) -> f64 {
    let mut h = 0.0;
    for &w in weights {
        if w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    h
}

/// The learners' view of a dataset: feature columns only, by value.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub feature_names: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub features: Vec<Option<f64>>,
    pub class: PopularityClass,
}

impl Table {
    pub fn from_dataset(dataset: &Dataset) -> Table {
        let indices = dataset.feature_indices();
        Table {
            feature_names: indices
                .iter()
                .map(|&i| dataset.columns[i].name.clone())
                .collect(),
            rows: dataset
                .instances
                .iter()
                .map(|inst| TableRow {
                    features: indices
                        .iter()
                        .map(|&i| match &inst.values[i] {
                            Value::Num(n) => Some(*n),
                            _ => None,
                        })
                        .collect(),
                    class: inst.class,
                })
                .collect(),
        }
    }

    pub fn class_distribution(&self) -> ClassDistribution {
        ClassDistribution::from_classes(self.rows.iter().map(|r| r.class))
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }
}

#[cfg(test)]
pub(crate) fn table_of(rows: &[(&[Option<f64>], PopularityClass)], names: &[&str]) -> Table {
    Table {
        feature_names: names.iter().map(|s| s.to_string()).collect(),
        rows: rows
            .iter()
            .map(|(features, class)| TableRow {
                features: features.to_vec(),
                class: *class,
            })
            .collect(),
    }
}

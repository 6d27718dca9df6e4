//! Dataset construction: class binning, schema, instances, balancing.
//!
//! A dataset is a flat table with named columns, each carrying a role that
//! says whether the learners may use it. The class label is not a column; it
//! is stored on each instance, and the CSV form appends it as a final
//! `class` column.

pub mod build;
pub mod csv;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::TitleKey;

pub use build::{
    build_dataset1, build_dataset2, derive_features, filter_candidates, person_ranks,
    BuildSettings, Features, PersonRank, RankScope,
};
pub use csv::{export_dataset, load_dataset, parse_dataset, save_dataset};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("rating {0} outside [1.0, 10.0]")]
    RatingOutOfRange(f64),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("dataset line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// The four popularity bins, ordered best to worst. Ties anywhere in the
/// pipeline resolve to the earlier label in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PopularityClass {
    Excellent,
    Average,
    Poor,
    Terrible,
}

impl PopularityClass {
    pub const ALL: [PopularityClass; 4] = [
        PopularityClass::Excellent,
        PopularityClass::Average,
        PopularityClass::Poor,
        PopularityClass::Terrible,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PopularityClass::Excellent => "Excellent",
            PopularityClass::Average => "Average",
            PopularityClass::Poor => "Poor",
            PopularityClass::Terrible => "Terrible",
        }
    }

    pub fn from_label(label: &str) -> Option<PopularityClass> {
        PopularityClass::ALL.into_iter().find(|c| c.label() == label)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Bin a rating per the one-decimal grid: Excellent 7.5..=10.0, Average
/// 5.0..=7.4, Poor 2.5..=4.9, Terrible 1.0..=2.4.
pub fn assign_class(rating: f64) -> Result<PopularityClass, DatasetError> {
    if !rating.is_finite() {
        return Err(DatasetError::RatingOutOfRange(rating));
    }
    let tenths = (rating * 10.0).round() as i64;
    Ok(match tenths {
        75..=100 => PopularityClass::Excellent,
        50..=74 => PopularityClass::Average,
        25..=49 => PopularityClass::Poor,
        10..=24 => PopularityClass::Terrible,
        _ => return Err(DatasetError::RatingOutOfRange(rating)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Num(f64),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

/// Whether a column is visible to the learners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Feature,
    Identifier,
    Excluded,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Feature => "feature",
            Role::Identifier => "identifier",
            Role::Excluded => "excluded",
        }
    }

    pub fn from_str_token(token: &str) -> Option<Role> {
        Some(match token {
            "feature" => Role::Feature,
            "identifier" => Role::Identifier,
            "excluded" => Role::Excluded,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub role: Role,
}

impl Column {
    pub fn new(name: &str, role: Role) -> Column {
        Column {
            name: name.to_string(),
            role,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub values: Vec<Value>,
    pub class: PopularityClass,
    pub provenance: TitleKey,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub columns: Vec<Column>,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn feature_indices(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == Role::Feature)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn class_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for inst in &self.instances {
            counts[inst.class.index()] += 1;
        }
        counts
    }
}

const BALANCE_CAP: usize = 10;

/// Thin the Average class: per one-decimal rating step in 5.0..=7.4, keep at
/// most the ten instances with the most votes (equal votes break toward the
/// lexicographically smaller title key). Other classes pass through.
pub fn balance_average(dataset: &Dataset) -> Dataset {
    let (rating_col, votes_col) = match (
        dataset.column_index("rating"),
        dataset.column_index("votes"),
    ) {
        (Some(r), Some(v)) => (r, v),
        _ => return dataset.clone(),
    };

    // Decide which Average instances survive, then filter in original order.
    let mut per_step: std::collections::BTreeMap<i64, Vec<usize>> = std::collections::BTreeMap::new();
    for (i, inst) in dataset.instances.iter().enumerate() {
        if inst.class != PopularityClass::Average {
            continue;
        }
        if let Some(r) = inst.values[rating_col].as_num() {
            per_step.entry((r * 10.0).round() as i64).or_default().push(i);
        }
    }

    let mut dropped = vec![false; dataset.instances.len()];
    for indices in per_step.values_mut() {
        if indices.len() <= BALANCE_CAP {
            continue;
        }
        indices.sort_by(|&a, &b| {
            let votes = |i: usize| {
                dataset.instances[i].values[votes_col]
                    .as_num()
                    .unwrap_or(0.0)
            };
            votes(b)
                .total_cmp(&votes(a))
                .then_with(|| dataset.instances[a].provenance.cmp(&dataset.instances[b].provenance))
        });
        for &i in &indices[BALANCE_CAP..] {
            dropped[i] = true;
        }
    }

    Dataset {
        columns: dataset.columns.clone(),
        instances: dataset
            .instances
            .iter()
            .enumerate()
            .filter(|(i, _)| !dropped[*i])
            .map(|(_, inst)| inst.clone())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_bins_at_the_edges() {
        let cases = [
            (7.5, PopularityClass::Excellent),
            (10.0, PopularityClass::Excellent),
            (7.4, PopularityClass::Average),
            (5.0, PopularityClass::Average),
            (4.9, PopularityClass::Poor),
            (2.5, PopularityClass::Poor),
            (2.4, PopularityClass::Terrible),
            (1.0, PopularityClass::Terrible),
        ];
        for (rating, class) in cases {
            assert_eq!(assign_class(rating).unwrap(), class, "rating {rating}");
        }
    }

    #[test]
    fn class_bins_partition_the_grid() {
        // Every one-decimal rating in [1.0, 10.0] lands in exactly one bin.
        for tenths in 10..=100 {
            let rating = tenths as f64 / 10.0;
            assert!(assign_class(rating).is_ok(), "rating {rating}");
        }
        assert!(assign_class(0.9).is_err());
        assert!(assign_class(10.1).is_err());
        assert!(assign_class(f64::NAN).is_err());
    }

    #[test]
    fn nearby_values_round_before_binning() {
        assert_eq!(assign_class(7.45).unwrap(), PopularityClass::Excellent);
        assert_eq!(assign_class(7.44).unwrap(), PopularityClass::Average);
    }

    #[test]
    fn labels_round_trip() {
        for class in PopularityClass::ALL {
            assert_eq!(PopularityClass::from_label(class.label()), Some(class));
        }
        assert_eq!(PopularityClass::from_label("excellent"), None);
    }

    fn toy_dataset(ratings_votes: &[(f64, u64)]) -> Dataset {
        let columns = vec![
            Column::new("title", Role::Identifier),
            Column::new("votes", Role::Excluded),
            Column::new("rating", Role::Excluded),
        ];
        let instances = ratings_votes
            .iter()
            .enumerate()
            .map(|(i, &(rating, votes))| Instance {
                values: vec![
                    Value::Text(format!("Movie {i:03} (2005)")),
                    Value::Num(votes as f64),
                    Value::Num(rating),
                ],
                class: assign_class(rating).unwrap(),
                provenance: TitleKey::parse(&format!("Movie {i:03} (2005)")).unwrap(),
            })
            .collect();
        Dataset { columns, instances }
    }

    #[test]
    fn balance_keeps_top_votes_per_step() {
        // 30 instances at rating 5.0 with votes 1000..1030.
        let rows: Vec<(f64, u64)> = (0..30).map(|i| (5.0, 1000 + i as u64)).collect();
        let out = balance_average(&toy_dataset(&rows));
        assert_eq!(out.instances.len(), 10);
        let votes_col = out.column_index("votes").unwrap();
        let mut kept: Vec<u64> = out
            .instances
            .iter()
            .map(|i| i.values[votes_col].as_num().unwrap() as u64)
            .collect();
        kept.sort();
        assert_eq!(kept, (1020..1030).collect::<Vec<u64>>());
    }

    #[test]
    fn balance_ties_break_by_title() {
        // 12 instances, all rating 6.0 and equal votes; the two largest
        // titles are dropped.
        let rows: Vec<(f64, u64)> = (0..12).map(|_| (6.0, 500)).collect();
        let out = balance_average(&toy_dataset(&rows));
        assert_eq!(out.instances.len(), 10);
        let titles: Vec<String> = out.instances.iter().map(|i| i.provenance.to_string()).collect();
        assert!(titles.contains(&"Movie 009 (2005)".to_string()));
        assert!(!titles.contains(&"Movie 010 (2005)".to_string()));
        assert!(!titles.contains(&"Movie 011 (2005)".to_string()));
    }

    #[test]
    fn balance_leaves_small_steps_alone() {
        let rows = [(6.3, 10), (6.3, 20), (6.3, 30), (6.3, 40)];
        let out = balance_average(&toy_dataset(&rows));
        assert_eq!(out.instances.len(), 4);
    }

    #[test]
    fn balance_never_touches_other_classes() {
        let mut rows: Vec<(f64, u64)> = (0..40).map(|i| (5.5, i as u64)).collect();
        rows.extend([(8.0, 1), (2.0, 2), (3.0, 3)]);
        let input = toy_dataset(&rows);
        let out = balance_average(&input);
        let counts = out.class_counts();
        assert_eq!(counts[PopularityClass::Average.index()], 10);
        assert_eq!(counts[PopularityClass::Excellent.index()], 1);
        assert_eq!(counts[PopularityClass::Poor.index()], 1);
        assert_eq!(counts[PopularityClass::Terrible.index()], 1);
        // Input order preserved for survivors.
        let positions: Vec<usize> = out
            .instances
            .iter()
            .map(|inst| {
                input
                    .instances
                    .iter()
                    .position(|orig| orig == inst)
                    .unwrap()
            })
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn balance_full_grid_caps_at_250() {
        // 12 instances at every step 5.0..=7.4 plus some Excellent padding.
        let mut rows = Vec::new();
        for tenths in 50..=74 {
            for v in 0..12u64 {
                rows.push((tenths as f64 / 10.0, 100 + v));
            }
        }
        rows.push((9.0, 50));
        let out = balance_average(&toy_dataset(&rows));
        assert_eq!(out.class_counts()[PopularityClass::Average.index()], 250);
    }
}

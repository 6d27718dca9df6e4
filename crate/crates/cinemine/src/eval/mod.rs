//! Stratified cross-validation and the reporting around it.
//!
//! Evaluation accumulates every fold's test predictions into one confusion
//! matrix, so each instance is predicted exactly once and the reported
//! counts are integers over the whole dataset. All randomness comes from
//! one seed: stream 0 assigns folds, stream i+1 trains fold i's model.

pub mod folds;
pub mod metrics;
pub mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataset::{Dataset, PopularityClass};
use crate::learn::part::part_learn_with_rng;
use crate::learn::tree::{subtable, train_tree_with_rng};
use crate::learn::{classify_rules, classify_tree, LearnerParams, Table};

pub use folds::stratified_folds;
pub use metrics::{metrics_from_matrix, ClassMetrics, ConfusionMatrix};
pub use report::{render_report, EvalReport, ReportFormat};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("at least 2 folds are required, got {0}")]
    TooFewFolds(usize),
    #[error("cannot make {k} folds from {n} instances")]
    TooManyFolds { k: usize, n: usize },
    #[error("confusion matrix is empty")]
    EmptyMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Learner {
    C45,
    Part,
}

impl Learner {
    pub fn id(self) -> &'static str {
        match self {
            Learner::C45 => "c45",
            Learner::Part => "part",
        }
    }

    pub fn from_id(id: &str) -> Option<Learner> {
        match id {
            "c45" => Some(Learner::C45),
            "part" => Some(Learner::Part),
            _ => None,
        }
    }
}

pub fn cross_validate(
    learner: Learner,
    dataset: &Dataset,
    k: usize,
    seed: u64,
    params: &LearnerParams,
) -> Result<EvalReport, EvalError> {
    let table = Table::from_dataset(dataset);
    let classes: Vec<PopularityClass> = table.rows.iter().map(|r| r.class).collect();
    let folds = stratified_folds(&classes, k, seed)?;

    let mut warnings = Vec::new();
    for label in PopularityClass::ALL {
        if !classes.contains(&label) {
            warnings.push(format!(
                "class {} has no instances, so no training fold sees it",
                label.label()
            ));
        }
    }

    let mut matrix = ConfusionMatrix::default();
    for (i, fold) in folds.iter().enumerate() {
        let mut in_test = vec![false; table.rows.len()];
        for &t in fold {
            in_test[t] = true;
        }
        let train: Vec<usize> = (0..table.rows.len()).filter(|&j| !in_test[j]).collect();
        let sub = subtable(&table, &train);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        match learner {
            Learner::C45 => {
                let tree = train_tree_with_rng(&sub, params, &mut rng);
                for &t in fold {
                    let (predicted, _) = classify_tree(&tree, &table.rows[t].features);
                    matrix.record(table.rows[t].class, predicted);
                }
            }
            Learner::Part => {
                let rules = part_learn_with_rng(&sub, params, &mut rng);
                for &t in fold {
                    let predicted = classify_rules(&rules, &table.rows[t].features);
                    matrix.record(table.rows[t].class, predicted);
                }
            }
        }
    }

    let (per_class, accuracy) = metrics_from_matrix(&matrix)?;
    Ok(EvalReport {
        learner: learner.id().to_string(),
        k,
        seed,
        params: params.clone(),
        labels: PopularityClass::ALL.map(|c| c.label().to_string()),
        matrix: matrix.cells,
        per_class: PopularityClass::ALL
            .iter()
            .map(|c| (c.label().to_string(), per_class[c.index()]))
            .collect(),
        accuracy,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::PopularityClass::{Average, Excellent, Poor};
    use crate::dataset::{Column, Instance, Role, Value};
    use crate::ingest::TitleKey;

    fn dataset_of(rows: &[(f64, PopularityClass)]) -> Dataset {
        let columns = vec![
            Column::new("title", Role::Identifier),
            Column::new("x", Role::Feature),
        ];
        let instances = rows
            .iter()
            .enumerate()
            .map(|(i, &(x, class))| Instance {
                values: vec![Value::Text(format!("Movie {i:03} (2005)")), Value::Num(x)],
                class,
                provenance: TitleKey::parse(&format!("Movie {i:03} (2005)")).unwrap(),
            })
            .collect();
        Dataset { columns, instances }
    }

    fn mixed_dataset() -> Dataset {
        let mut rows = Vec::new();
        for i in 0..5 {
            rows.push((i as f64, Excellent));
        }
        for i in 0..4 {
            rows.push((100.0 + i as f64, Average));
        }
        for i in 0..3 {
            rows.push((200.0 + i as f64, Poor));
        }
        dataset_of(&rows)
    }

    #[test]
    fn matrix_total_equals_dataset_size() {
        let data = mixed_dataset();
        for learner in [Learner::C45, Learner::Part] {
            let report = cross_validate(learner, &data, 3, 1, &LearnerParams::default()).unwrap();
            let total: u64 = report.matrix.iter().flatten().sum();
            assert_eq!(total, data.instances.len() as u64);
        }
    }

    #[test]
    fn separable_fixture_is_classified_perfectly() {
        let mut rows = Vec::new();
        for i in 1..=6 {
            rows.push((i as f64, Excellent));
        }
        for i in 1..=6 {
            rows.push((100.0 + i as f64, Average));
        }
        let data = dataset_of(&rows);
        let report = cross_validate(Learner::C45, &data, 3, 1, &LearnerParams::default()).unwrap();
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn same_inputs_give_identical_reports() {
        let data = mixed_dataset();
        let a = cross_validate(Learner::Part, &data, 3, 9, &LearnerParams::default()).unwrap();
        let b = cross_validate(Learner::Part, &data, 3, 9, &LearnerParams::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.warnings, b.warnings);
    }

    #[test]
    fn absent_class_warns_but_evaluation_proceeds() {
        let rows = [
            (1.0, Excellent),
            (2.0, Excellent),
            (3.0, Excellent),
            (101.0, Average),
            (102.0, Average),
            (103.0, Average),
        ];
        let report = cross_validate(
            Learner::C45,
            &dataset_of(&rows),
            3,
            1,
            &LearnerParams::default(),
        )
        .unwrap();
        assert_eq!(report.warnings.len(), 2);
        assert!(report.warnings[0].contains("Poor"));
        assert!(report.warnings[1].contains("Terrible"));
        assert!(report.accuracy > 0.0);
    }

    #[test]
    fn learner_ids_round_trip() {
        assert_eq!(Learner::from_id("c45"), Some(Learner::C45));
        assert_eq!(Learner::from_id("part"), Some(Learner::Part));
        assert_eq!(Learner::from_id("j48"), None);
        assert_eq!(Learner::C45.id(), "c45");
        assert_eq!(Learner::Part.id(), "part");
    }
}

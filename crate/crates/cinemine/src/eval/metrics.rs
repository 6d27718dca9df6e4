//! Confusion matrices and the per-class metric suite.

use serde::{Deserialize, Serialize};

use crate::dataset::PopularityClass;

use super::EvalError;

/// 4×4 prediction counts: rows are actual classes, columns predicted, both
/// in the fixed label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub cells: [[u64; 4]; 4],
}

impl ConfusionMatrix {
    pub fn from_cells(cells: [[u64; 4]; 4]) -> ConfusionMatrix {
        ConfusionMatrix { cells }
    }

    pub fn record(&mut self, actual: PopularityClass, predicted: PopularityClass) {
        self.cells[actual.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..4).map(|i| self.cells[i][i]).sum()
    }

    pub fn row_total(&self, c: usize) -> u64 {
        self.cells[c].iter().sum()
    }

    pub fn col_total(&self, c: usize) -> u64 {
        self.cells.iter().map(|row| row[c]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub tp_rate: f64,
    pub fp_rate: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Per-class metrics (label order) and overall accuracy. Counts stay
/// integers until the final division; an empty denominator gives 0.
pub fn metrics_from_matrix(
    matrix: &ConfusionMatrix,
) -> Result<([ClassMetrics; 4], f64), EvalError> {
    let total = matrix.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let mut per_class = [ClassMetrics::default(); 4];
    for (c, slot) in per_class.iter_mut().enumerate() {
        let tp = matrix.cells[c][c];
        let missed = matrix.row_total(c) - tp;
        let fp = matrix.col_total(c) - tp;
        let tn = total - tp - missed - fp;
        let tp_rate = ratio(tp, tp + missed);
        *slot = ClassMetrics {
            tp_rate,
            fp_rate: ratio(fp, fp + tn),
            precision: ratio(tp, tp + fp),
            recall: tp_rate,
        };
    }
    Ok((per_class, matrix.trace() as f64 / total as f64))
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::PopularityClass::{Average, Excellent, Terrible};

    fn assert_close(got: f64, want: f64) {
        assert!((got - want).abs() <= 1e-3, "got {got}, want {want}");
    }

    #[test]
    fn reference_tree_matrix_metrics() {
        let m = ConfusionMatrix::from_cells([
            [223, 34, 2, 0],
            [42, 171, 35, 0],
            [6, 58, 223, 1],
            [0, 0, 7, 15],
        ]);
        let (per_class, accuracy) = metrics_from_matrix(&m).unwrap();
        let want = [
            (0.861, 0.086, 0.823),
            (0.690, 0.162, 0.650),
            (0.774, 0.083, 0.835),
            (0.682, 0.001, 0.938),
        ];
        for (got, (tp, fp, prec)) in per_class.iter().zip(want) {
            assert_close(got.tp_rate, tp);
            assert_close(got.fp_rate, fp);
            assert_close(got.precision, prec);
            assert_eq!(got.recall, got.tp_rate);
        }
        assert_eq!(format!("{:.4}", accuracy * 100.0), "77.3562");
    }

    #[test]
    fn reference_rule_matrix_metrics() {
        let m = ConfusionMatrix::from_cells([
            [214, 41, 4, 0],
            [32, 172, 44, 0],
            [3, 48, 236, 1],
            [0, 0, 9, 13],
        ]);
        let (per_class, accuracy) = metrics_from_matrix(&m).unwrap();
        let want = [
            (0.826, 0.063, 0.859),
            (0.694, 0.156, 0.659),
            (0.819, 0.108, 0.805),
            (0.591, 0.001, 0.929),
        ];
        for (got, (tp, fp, prec)) in per_class.iter().zip(want) {
            assert_close(got.tp_rate, tp);
            assert_close(got.fp_rate, fp);
            assert_close(got.precision, prec);
            assert_eq!(got.recall, got.tp_rate);
        }
        assert_eq!(format!("{:.4}", accuracy * 100.0), "77.7234");
    }

    #[test]
    fn perfect_classifier_metrics() {
        let m = ConfusionMatrix::from_cells([
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ]);
        let (per_class, accuracy) = metrics_from_matrix(&m).unwrap();
        for got in per_class {
            assert_eq!(got.tp_rate, 1.0);
            assert_eq!(got.fp_rate, 0.0);
            assert_eq!(got.precision, 1.0);
            assert_eq!(got.recall, 1.0);
        }
        assert_eq!(accuracy, 1.0);
    }

    #[test]
    fn empty_predicted_column_gives_zero_precision() {
        // Every Terrible instance predicted Average; nothing predicted
        // Terrible, so its precision denominator is empty.
        let mut m = ConfusionMatrix::default();
        m.record(Terrible, Average);
        m.record(Terrible, Average);
        m.record(Excellent, Excellent);
        let (per_class, _) = metrics_from_matrix(&m).unwrap();
        let terrible = per_class[Terrible.index()];
        assert_eq!(terrible.precision, 0.0);
        assert_eq!(terrible.tp_rate, 0.0);
    }

    #[test]
    fn empty_matrix_is_an_error() {
        assert!(matches!(
            metrics_from_matrix(&ConfusionMatrix::default()),
            Err(EvalError::EmptyMatrix)
        ));
    }

    #[test]
    fn recording_fills_the_right_cell() {
        let mut m = ConfusionMatrix::default();
        m.record(Average, Terrible);
        m.record(Average, Terrible);
        m.record(Excellent, Average);
        assert_eq!(m.cells[Average.index()][Terrible.index()], 2);
        assert_eq!(m.cells[Excellent.index()][Average.index()], 1);
        assert_eq!(m.total(), 3);
        assert_eq!(m.trace(), 0);
        assert_eq!(m.row_total(Average.index()), 2);
        assert_eq!(m.col_total(Terrible.index()), 2);
    }
}

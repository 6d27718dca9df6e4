//! Budget-to-earnings correlation: Pearson coefficients, least-squares
//! trend lines, and scatter plots.
//!
//! All sums are two-pass and mean-centered; the dollar values involved are
//! large enough that the one-pass expansion loses digits.

pub mod plot;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;

pub use plot::scatter_plot;

#[derive(Debug, Error)]
pub enum CorrError {
    #[error("need at least 2 complete pairs, got {0}")]
    TooFewPairs(usize),
    #[error("{0} is constant, so the correlation is undefined")]
    ConstantVariable(String),
    #[error("dataset has no {0} column")]
    MissingColumn(String),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Paired observations with both members present.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_label: String,
    pub y_label: String,
}

impl PairedSeries {
    /// Pairs with a missing member are dropped; fewer than 2 survivors is
    /// an error.
    pub fn new(
        pairs: impl IntoIterator<Item = (Option<f64>, Option<f64>)>,
        x_label: &str,
        y_label: &str,
    ) -> Result<PairedSeries, CorrError> {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for pair in pairs {
            if let (Some(a), Some(b)) = pair {
                x.push(a);
                y.push(b);
            }
        }
        if x.len() < 2 {
            return Err(CorrError::TooFewPairs(x.len()));
        }
        Ok(PairedSeries {
            x,
            y,
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn means(&self) -> (f64, f64) {
        let n = self.len() as f64;
        (
            self.x.iter().sum::<f64>() / n,
            self.y.iter().sum::<f64>() / n,
        )
    }

    /// (Σdx², Σdy², Σdx·dy) around the means.
    fn centered_sums(&self) -> (f64, f64, f64) {
        let (mx, my) = self.means();
        let mut sxx = 0.0;
        let mut syy = 0.0;
        let mut sxy = 0.0;
        for (&a, &b) in self.x.iter().zip(&self.y) {
            let dx = a - mx;
            let dy = b - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        (sxx, syy, sxy)
    }
}

pub fn pearson(series: &PairedSeries) -> Result<f64, CorrError> {
    let (sxx, syy, sxy) = series.centered_sums();
    if sxx == 0.0 {
        return Err(CorrError::ConstantVariable(series.x_label.clone()));
    }
    if syy == 0.0 {
        return Err(CorrError::ConstantVariable(series.y_label.clone()));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendLine {
    pub slope: f64,
    pub intercept: f64,
}

impl TrendLine {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Least-squares fit of y on x.
pub fn trend_line(series: &PairedSeries) -> Result<TrendLine, CorrError> {
    let (sxx, _, sxy) = series.centered_sums();
    if sxx == 0.0 {
        return Err(CorrError::ConstantVariable(series.x_label.clone()));
    }
    let slope = sxy / sxx;
    let (mx, my) = series.means();
    Ok(TrendLine {
        slope,
        intercept: my - slope * mx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Positive,
    Negative,
    None,
    Undefined,
}

impl Direction {
    fn of(r: f64) -> Direction {
        if r > 0.0 {
            Direction::Positive
        } else if r < 0.0 {
            Direction::Negative
        } else {
            Direction::None
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Positive => "positive",
            Direction::Negative => "negative",
            Direction::None => "none",
            Direction::Undefined => "undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrPair {
    pub names: [String; 2],
    /// Absent when fewer than 2 complete pairs exist or a variable is
    /// constant.
    pub r: Option<f64>,
    pub direction: Direction,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub pairs: Vec<CorrPair>,
}

impl CorrelationReport {
    pub fn render_plain(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<22}  {:>5}  {:>9}  {}\n",
            "pair", "n", "r", "direction"
        ));
        for pair in &self.pairs {
            let r = match pair.r {
                Some(r) => format!("{r:.4}"),
                None => "n/a".to_string(),
            };
            out.push_str(&format!(
                "{:<22}  {:>5}  {:>9}  {}\n",
                format!("{},{}", pair.names[0], pair.names[1]),
                pair.n,
                r,
                pair.direction.label()
            ));
        }
        out
    }
}

/// Correlate budget against each earnings attribute of the post-release
/// dataset. A pairing without enough data is reported, not an error.
pub fn correlate_dataset2(dataset: &Dataset) -> Result<CorrelationReport, CorrError> {
    let column = |name: &str| {
        dataset
            .column_index(name)
            .ok_or_else(|| CorrError::MissingColumn(name.to_string()))
    };
    let budget = column("budget")?;
    let earnings = [
        column("domestic")?,
        column("foreign")?,
        column("worldwide")?,
    ];

    let mut pairs = Vec::new();
    for (name, idx) in ["domestic", "foreign", "worldwide"].iter().zip(earnings) {
        let values = dataset.instances.iter().map(|inst| {
            (
                inst.values[budget].as_num(),
                inst.values[idx].as_num(),
            )
        });
        let pair = match PairedSeries::new(values, "budget", name) {
            Ok(series) => match pearson(&series) {
                Ok(r) => CorrPair {
                    names: ["budget".to_string(), name.to_string()],
                    r: Some(r),
                    direction: Direction::of(r),
                    n: series.len(),
                },
                Err(_) => undefined_pair(name, series.len()),
            },
            Err(CorrError::TooFewPairs(n)) => undefined_pair(name, n),
            Err(other) => return Err(other),
        };
        pairs.push(pair);
    }
    Ok(CorrelationReport { pairs })
}

fn undefined_pair(name: &str, n: usize) -> CorrPair {
    CorrPair {
        names: ["budget".to_string(), name.to_string()],
        r: None,
        direction: Direction::Undefined,
        n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, Instance, PopularityClass, Role, Value};
    use crate::ingest::TitleKey;

    fn series(x: &[f64], y: &[f64]) -> PairedSeries {
        PairedSeries::new(
            x.iter().zip(y).map(|(&a, &b)| (Some(a), Some(b))),
            "x",
            "y",
        )
        .unwrap()
    }

    #[test]
    fn identical_series_correlate_to_one() {
        let s = series(&[1.0, 2.0, 5.0, 9.0], &[1.0, 2.0, 5.0, 9.0]);
        assert!((pearson(&s).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn negated_series_correlate_to_minus_one() {
        let s = series(&[1.0, 2.0, 5.0], &[-1.0, -2.0, -5.0]);
        assert!((pearson(&s).unwrap() + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn three_point_half_correlation() {
        let s = series(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]);
        assert!((pearson(&s).unwrap() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn constant_variable_is_an_error() {
        let s = series(&[2.0, 2.0, 2.0], &[1.0, 3.0, 2.0]);
        match pearson(&s) {
            Err(CorrError::ConstantVariable(label)) => assert_eq!(label, "x"),
            other => panic!("{other:?}"),
        }
        let s = series(&[1.0, 3.0, 2.0], &[7.0, 7.0, 7.0]);
        match pearson(&s) {
            Err(CorrError::ConstantVariable(label)) => assert_eq!(label, "y"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn incomplete_pairs_are_dropped_at_construction() {
        let s = PairedSeries::new(
            [
                (Some(1.0), Some(2.0)),
                (None, Some(3.0)),
                (Some(2.0), None),
                (None, None),
                (Some(3.0), Some(5.0)),
            ],
            "x",
            "y",
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.x, vec![1.0, 3.0]);
        assert_eq!(s.y, vec![2.0, 5.0]);
    }

    #[test]
    fn one_complete_pair_is_too_few() {
        let result = PairedSeries::new([(Some(1.0), Some(2.0)), (None, Some(3.0))], "x", "y");
        assert!(matches!(result, Err(CorrError::TooFewPairs(1))));
    }

    #[test]
    fn two_point_trend_is_exact() {
        let t = trend_line(&series(&[0.0, 1.0], &[1.0, 3.0])).unwrap();
        assert_eq!(t.slope, 2.0);
        assert_eq!(t.intercept, 1.0);
    }

    #[test]
    fn collinear_trend() {
        let t = trend_line(&series(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0])).unwrap();
        assert_eq!(t.slope, 1.0);
        assert_eq!(t.intercept, 0.0);
    }

    #[test]
    fn three_point_trend_matches_the_normal_equations() {
        let t = trend_line(&series(&[0.0, 1.0, 2.0], &[0.0, 2.0, 2.0])).unwrap();
        assert!((t.slope - 1.0).abs() <= 1e-12);
        assert!((t.intercept - 1.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn residuals_sum_to_zero() {
        let s = series(&[1.0, 4.0, 6.0, 9.0, 15.0], &[3.0, 1.0, 7.0, 2.0, 11.0]);
        let t = trend_line(&s).unwrap();
        let residual_sum: f64 = s
            .x
            .iter()
            .zip(&s.y)
            .map(|(&a, &b)| b - t.at(a))
            .sum();
        assert!(residual_sum.abs() <= 1e-9);
    }

    #[test]
    fn slope_sign_matches_correlation_sign() {
        let cases = [
            (vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 4.0, 5.0, 9.0]),
            (vec![1.0, 2.0, 3.0, 4.0], vec![9.0, 5.0, 4.0, 2.0]),
            (vec![1.0, 2.0, 3.0, 4.0], vec![5.0, 1.0, 8.0, 4.0]),
        ];
        for (x, y) in cases {
            let s = series(&x, &y);
            let r = pearson(&s).unwrap();
            let t = trend_line(&s).unwrap();
            assert_eq!(r.signum(), t.slope.signum());
        }
    }

    type FinanceRow = (Option<f64>, Option<f64>, Option<f64>, Option<f64>);

    fn finance_dataset(rows: &[FinanceRow]) -> Dataset {
        let columns = vec![
            Column::new("title", Role::Identifier),
            Column::new("budget", Role::Feature),
            Column::new("domestic", Role::Feature),
            Column::new("foreign", Role::Feature),
            Column::new("worldwide", Role::Feature),
        ];
        let value = |v: Option<f64>| v.map_or(Value::Missing, Value::Num);
        let instances = rows
            .iter()
            .enumerate()
            .map(|(i, &(b, d, f, w))| Instance {
                values: vec![
                    Value::Text(format!("Movie {i:03} (2005)")),
                    value(b),
                    value(d),
                    value(f),
                    value(w),
                ],
                class: PopularityClass::Average,
                provenance: TitleKey::parse(&format!("Movie {i:03} (2005)")).unwrap(),
            })
            .collect();
        Dataset { columns, instances }
    }

    #[test]
    fn doubled_earnings_correlate_perfectly() {
        let rows: Vec<_> = (1..=5)
            .map(|i| {
                let b = i as f64 * 1_000_000.0;
                (Some(b), Some(2.0 * b), Some(2.0 * b), Some(2.0 * b))
            })
            .collect();
        let report = correlate_dataset2(&finance_dataset(&rows)).unwrap();
        assert_eq!(report.pairs.len(), 3);
        for pair in &report.pairs {
            assert!((pair.r.unwrap() - 1.0).abs() <= 1e-12);
            assert_eq!(pair.direction, Direction::Positive);
            assert_eq!(pair.n, 5);
        }
        assert_eq!(report.pairs[0].names, ["budget", "domestic"]);
        assert_eq!(report.pairs[1].names, ["budget", "foreign"]);
        assert_eq!(report.pairs[2].names, ["budget", "worldwide"]);
    }

    #[test]
    fn sparse_pairing_is_reported_undefined() {
        // foreign is present only once, so that pairing cannot be scored.
        let rows = vec![
            (Some(1e6), Some(2e6), Some(3e6), Some(5e6)),
            (Some(2e6), Some(3e6), None, Some(7e6)),
            (Some(3e6), Some(5e6), None, Some(9e6)),
        ];
        let report = correlate_dataset2(&finance_dataset(&rows)).unwrap();
        let foreign = &report.pairs[1];
        assert_eq!(foreign.r, None);
        assert_eq!(foreign.direction, Direction::Undefined);
        assert_eq!(foreign.n, 1);
        assert!(report.pairs[0].r.is_some());
        assert!(report.pairs[2].r.is_some());
    }

    #[test]
    fn missing_column_is_an_error() {
        let mut data = finance_dataset(&[(Some(1.0), Some(2.0), Some(3.0), Some(4.0))]);
        data.columns.remove(3);
        for inst in &mut data.instances {
            inst.values.remove(3);
        }
        assert!(matches!(
            correlate_dataset2(&data),
            Err(CorrError::MissingColumn(name)) if name == "foreign"
        ));
    }

    #[test]
    fn report_renders_a_row_per_pair() {
        let rows: Vec<_> = (1..=4)
            .map(|i| {
                let b = i as f64;
                (Some(b), Some(2.0 * b), Some(3.0 * b), Some(5.0 * b))
            })
            .collect();
        let report = correlate_dataset2(&finance_dataset(&rows)).unwrap();
        let text = report.render_plain();
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("budget,domestic"));
        assert!(text.contains("1.0000"));
        assert!(text.contains("positive"));
    }

    #[test]
    fn json_round_trips() {
        let rows: Vec<_> = (1..=4)
            .map(|i| (Some(i as f64), Some(10.0 - i as f64), None, Some(i as f64)))
            .collect();
        let report = correlate_dataset2(&finance_dataset(&rows)).unwrap();
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: CorrelationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert!(text.contains("\"negative\""));
    }
}

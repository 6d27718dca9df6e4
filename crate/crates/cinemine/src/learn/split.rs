//! Threshold search: information gain, gain ratio, attribute ranking.
//!
//! Candidate thresholds are the midpoints between consecutive distinct
//! values. Gain is computed over the instances where the attribute is
//! present; equal-gain candidates resolve to the lowest threshold, and
//! equal-score attributes to the lowest schema index, so search order never
//! changes the result.

use super::{entropy_of, ClassDistribution, LearnerParams, Table};

/// Treat gains at or below this as zero; guards log2 rounding residue.
const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub attribute: usize,
    pub threshold: f64,
    pub gain: f64,
    pub gain_ratio: f64,
}

/// Best split of `attribute` over the whole table, or none when the
/// attribute has under two distinct values or no positive gain.
pub fn numeric_split_gain(table: &Table, attribute: usize) -> Option<Split> {
    let rows: Vec<(usize, f64)> = (0..table.rows.len()).map(|i| (i, 1.0)).collect();
    split_weighted(table, &rows, attribute)
}

/// Weighted variant used during tree growth; weights come from fractional
/// missing-value routing.
pub(crate) fn split_weighted(
    table: &Table,
    rows: &[(usize, f64)],
    attribute: usize,
) -> Option<Split> {
    let mut present: Vec<(f64, PopClassWeight)> = rows
        .iter()
        .filter_map(|&(i, w)| {
            table.rows[i].features[attribute].map(|v| (v, (table.rows[i].class, w)))
        })
        .collect();
    if present.len() < 2 {
        return None;
    }
    present.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut parent = ClassDistribution::default();
    for &(_, (class, w)) in &present {
        parent.add(class, w);
    }
    let total = parent.total();
    let parent_entropy = entropy_of(&parent.weights, total);

    let mut low = ClassDistribution::default();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..present.len() - 1 {
        let (value, (class, w)) = present[i];
        low.add(class, w);
        let next_value = present[i + 1].0;
        if next_value <= value {
            continue;
        }
        let low_total = low.total();
        let high_total = total - low_total;
        let mut high = parent.weights;
        for (h, l) in high.iter_mut().zip(&low.weights) {
            *h -= l;
        }
        let weighted = (low_total / total) * entropy_of(&low.weights, low_total)
            + (high_total / total) * entropy_of(&high, high_total);
        let gain = (parent_entropy - weighted).max(0.0);
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some(((value + next_value) / 2.0, gain));
        }
    }

    let (threshold, gain) = best?;
    if gain <= GAIN_EPS {
        return None;
    }
    // Split information of the induced two-way partition.
    let low_total: f64 = present
        .iter()
        .filter(|&&(v, _)| v <= threshold)
        .map(|&(_, (_, w))| w)
        .sum();
    let split_info = entropy_of(&[low_total, total - low_total, 0.0, 0.0], total);
    Some(Split {
        attribute,
        threshold,
        gain,
        gain_ratio: gain / split_info,
    })
}

type PopClassWeight = (crate::dataset::PopularityClass, f64);

/// C4.5 selection: among attributes whose gain reaches the mean gain of all
/// positive-gain attributes, pick the best gain ratio (plain gain when
/// `use_gain_ratio` is off). Ties go to the lowest schema index.
pub fn best_split(table: &Table, params: &LearnerParams) -> Option<Split> {
    let rows: Vec<(usize, f64)> = (0..table.rows.len()).map(|i| (i, 1.0)).collect();
    best_split_weighted(table, &rows, params)
}

pub(crate) fn best_split_weighted(
    table: &Table,
    rows: &[(usize, f64)],
    params: &LearnerParams,
) -> Option<Split> {
    let candidates: Vec<Split> = (0..table.n_features())
        .filter_map(|a| split_weighted(table, rows, a))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let mean_gain = candidates.iter().map(|s| s.gain).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<Split> = None;
    for split in candidates {
        if split.gain + GAIN_EPS < mean_gain {
            continue;
        }
        let score = |s: &Split| if params.use_gain_ratio { s.gain_ratio } else { s.gain };
        if best.as_ref().is_none_or(|b| score(&split) > score(b)) {
            best = Some(split);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedAttribute {
    pub attribute: usize,
    pub name: String,
    pub gain: f64,
    /// Gain as a percentage of the class entropy; 0 when the class is pure.
    pub percent: f64,
}

/// Attributes by best-threshold information gain, descending. Attributes
/// with no admissible split rank with gain 0.
pub fn rank_attributes(table: &Table) -> Vec<RankedAttribute> {
    let dist = table.class_distribution();
    let total = dist.total();
    let class_entropy = if total > 0.0 {
        entropy_of(&dist.weights, total)
    } else {
        0.0
    };
    let mut ranked: Vec<RankedAttribute> = (0..table.n_features())
        .map(|a| {
            let gain = numeric_split_gain(table, a).map_or(0.0, |s| s.gain);
            RankedAttribute {
                attribute: a,
                name: table.feature_names[a].clone(),
                gain,
                percent: if class_entropy > 0.0 {
                    gain / class_entropy * 100.0
                } else {
                    0.0
                },
            }
        })
        .collect();
    ranked.sort_by(|a, b| b.gain.total_cmp(&a.gain).then(a.attribute.cmp(&b.attribute)));
    ranked
}

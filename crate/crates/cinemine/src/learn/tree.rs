//! Decision trees: growth, reduced-error pruning, classification, text form.
//!
//! Growth routes missing-valued instances into both children with weight
//! split in proportion to the children's observed weight; classification of
//! a missing value follows the node's fallback branch instead. A node's
//! distribution is always the one seen while growing, and those weights are
//! what pruning collapses to.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::PopularityClass;

use super::split::best_split_weighted;
use super::{entropy_of, ClassDistribution, LearnError, LearnerParams, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Low,
    High,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecisionTree {
    Leaf {
        dist: ClassDistribution,
    },
    Node {
        attribute: usize,
        threshold: f64,
        fallback: Branch,
        dist: ClassDistribution,
        low: Box<DecisionTree>,
        high: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn dist(&self) -> &ClassDistribution {
        match self {
            DecisionTree::Leaf { dist } => dist,
            DecisionTree::Node { dist, .. } => dist,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 1,
            DecisionTree::Node { low, high, .. } => 1 + low.node_count() + high.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 0,
            DecisionTree::Node { low, high, .. } => 1 + low.depth().max(high.depth()),
        }
    }

    /// Leaf distributions in pre-order (low before high).
    pub fn leaf_dists(&self) -> Vec<&ClassDistribution> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a DecisionTree, out: &mut Vec<&'a ClassDistribution>) {
            match t {
                DecisionTree::Leaf { dist } => out.push(dist),
                DecisionTree::Node { low, high, .. } => {
                    walk(low, out);
                    walk(high, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }
}

pub(crate) fn weighted_dist(table: &Table, rows: &[(usize, f64)]) -> ClassDistribution {
    let mut dist = ClassDistribution::default();
    for &(i, w) in rows {
        dist.add(table.rows[i].class, w);
    }
    dist
}

pub(crate) fn is_pure(dist: &ClassDistribution) -> bool {
    dist.weights.iter().filter(|&&w| w > 0.0).count() <= 1
}

/// Row indices with the fractional weight each carries at the current node.
pub(crate) type WeightedRows = Vec<(usize, f64)>;

/// Split `rows` on a threshold: present values route by comparison, missing
/// values go to both sides scaled by the observed weight proportions.
pub(crate) fn route_rows(
    table: &Table,
    rows: &[(usize, f64)],
    attribute: usize,
    threshold: f64,
) -> (WeightedRows, WeightedRows) {
    let mut low = Vec::new();
    let mut high = Vec::new();
    let (mut low_seen, mut high_seen) = (0.0f64, 0.0f64);
    let mut missing = Vec::new();
    for &(i, w) in rows {
        match table.rows[i].features[attribute] {
            Some(v) if v <= threshold => {
                low_seen += w;
                low.push((i, w));
            }
            Some(_) => {
                high_seen += w;
                high.push((i, w));
            }
            None => missing.push((i, w)),
        }
    }
    let seen = low_seen + high_seen;
    for (i, w) in missing {
        let wl = w * low_seen / seen;
        let wh = w * high_seen / seen;
        if wl > 0.0 {
            low.push((i, wl));
        }
        if wh > 0.0 {
            high.push((i, wh));
        }
    }
    (low, high)
}

pub fn grow_tree(table: &Table, params: &LearnerParams) -> DecisionTree {
    let rows: Vec<(usize, f64)> = (0..table.rows.len()).map(|i| (i, 1.0)).collect();
    grow(table, rows, params)
}

fn grow(table: &Table, rows: Vec<(usize, f64)>, params: &LearnerParams) -> DecisionTree {
    let dist = weighted_dist(table, &rows);
    if dist.total() < (2 * params.min_leaf) as f64 || is_pure(&dist) {
        return DecisionTree::Leaf { dist };
    }
    let Some(split) = best_split_weighted(table, &rows, params) else {
        return DecisionTree::Leaf { dist };
    };
    let (low_rows, high_rows) = route_rows(table, &rows, split.attribute, split.threshold);
    let low_w: f64 = low_rows.iter().map(|&(_, w)| w).sum();
    let high_w: f64 = high_rows.iter().map(|&(_, w)| w).sum();
    let fallback = if high_w > low_w { Branch::High } else { Branch::Low };
    DecisionTree::Node {
        attribute: split.attribute,
        threshold: split.threshold,
        fallback,
        dist,
        low: Box::new(grow(table, low_rows, params)),
        high: Box::new(grow(table, high_rows, params)),
    }
}

pub fn classify_tree(
    tree: &DecisionTree,
    features: &[Option<f64>],
) -> (PopularityClass, ClassDistribution) {
    let mut node = tree;
    loop {
        match node {
            DecisionTree::Leaf { dist } => return (dist.majority(), *dist),
            DecisionTree::Node {
                attribute,
                threshold,
                fallback,
                low,
                high,
                ..
            } => {
                let take_low = match features[*attribute] {
                    Some(v) => v <= *threshold,
                    None => *fallback == Branch::Low,
                };
                node = if take_low { low } else { high };
            }
        }
    }
}

/// One bottom-up pass: a subtree collapses to a leaf labelled with its
/// growing-set majority whenever that leaf misclassifies no more prune
/// instances than the subtree does. A node no prune instance reaches
/// collapses (0 ≤ 0).
pub fn reduced_error_prune(tree: &DecisionTree, prune: &Table) -> DecisionTree {
    if prune.rows.is_empty() {
        return tree.clone();
    }
    let rows: Vec<usize> = (0..prune.rows.len()).collect();
    prune_node(tree, prune, &rows)
}

fn prune_node(tree: &DecisionTree, prune: &Table, rows: &[usize]) -> DecisionTree {
    let DecisionTree::Node {
        attribute,
        threshold,
        fallback,
        dist,
        low,
        high,
    } = tree
    else {
        return tree.clone();
    };

    let (mut low_rows, mut high_rows) = (Vec::new(), Vec::new());
    for &i in rows {
        let take_low = match prune.rows[i].features[*attribute] {
            Some(v) => v <= *threshold,
            None => *fallback == Branch::Low,
        };
        if take_low {
            low_rows.push(i);
        } else {
            high_rows.push(i);
        }
    }
    let low = prune_node(low, prune, &low_rows);
    let high = prune_node(high, prune, &high_rows);

    let subtree = DecisionTree::Node {
        attribute: *attribute,
        threshold: *threshold,
        fallback: *fallback,
        dist: *dist,
        low: Box::new(low),
        high: Box::new(high),
    };
    let subtree_errors = error_count(&subtree, prune, rows);
    let majority = dist.majority();
    let leaf_errors = rows.iter().filter(|&&i| prune.rows[i].class != majority).count();
    if leaf_errors <= subtree_errors {
        DecisionTree::Leaf { dist: *dist }
    } else {
        subtree
    }
}

fn error_count(tree: &DecisionTree, table: &Table, rows: &[usize]) -> usize {
    rows.iter()
        .filter(|&&i| classify_tree(tree, &table.rows[i].features).0 != table.rows[i].class)
        .count()
}

/// Stratified grow/prune carve: per class, shuffle that class's rows and
/// hold out floor(fraction · n) of them for pruning. Both halves come back
/// sorted. The epsilon guards cases like (1/3)·3 landing just under 1.
pub(crate) fn carve_prune_set(
    classes: &[PopularityClass],
    fraction: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut grow = Vec::new();
    let mut prune = Vec::new();
    for class in PopularityClass::ALL {
        let mut indices: Vec<usize> = classes
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == class)
            .map(|(i, _)| i)
            .collect();
        indices.shuffle(rng);
        let take = ((fraction * indices.len() as f64) + 1e-9).floor() as usize;
        prune.extend(indices.drain(..take));
        grow.extend(indices);
    }
    grow.sort_unstable();
    prune.sort_unstable();
    (grow, prune)
}

pub(crate) fn subtable(table: &Table, rows: &[usize]) -> Table {
    Table {
        feature_names: table.feature_names.clone(),
        rows: rows.iter().map(|&i| table.rows[i].clone()).collect(),
    }
}

/// Grow on a stratified subset, prune on the held-out rest.
pub fn train_tree(table: &Table, params: &LearnerParams) -> DecisionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    train_tree_with_rng(table, params, &mut rng)
}

pub(crate) fn train_tree_with_rng(
    table: &Table,
    params: &LearnerParams,
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    let classes: Vec<PopularityClass> = table.rows.iter().map(|r| r.class).collect();
    let (grow_rows, prune_rows) = carve_prune_set(&classes, params.prune_fraction, rng);
    let tree = grow(
        table,
        grow_rows.iter().map(|&i| (i, 1.0)).collect(),
        params,
    );
    reduced_error_prune(&tree, &subtable(table, &prune_rows))
}

fn fmt_weights(dist: &ClassDistribution) -> String {
    let w = &dist.weights;
    format!("({}/{}/{}/{})", w[0], w[1], w[2], w[3])
}

/// Indented text rendering; exact round-trip with [`parse_tree`].
pub fn render_tree(tree: &DecisionTree, feature_names: &[String]) -> String {
    let mut out = String::new();
    fn walk(t: &DecisionTree, names: &[String], depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        match t {
            DecisionTree::Leaf { dist } => {
                out.push_str(&format!("-> {} {}\n", dist.majority().label(), fmt_weights(dist)));
            }
            DecisionTree::Node {
                attribute,
                threshold,
                fallback,
                dist,
                low,
                high,
            } => {
                let fb = match fallback {
                    Branch::Low => "low",
                    Branch::High => "high",
                };
                out.push_str(&format!(
                    "{} <= {} : fallback={} {}\n",
                    names[*attribute],
                    threshold,
                    fb,
                    fmt_weights(dist)
                ));
                walk(low, names, depth + 1, out);
                walk(high, names, depth + 1, out);
            }
        }
    }
    walk(tree, feature_names, 0, &mut out);
    out
}

struct TreeLines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

pub fn parse_tree(text: &str, feature_names: &[String]) -> Result<DecisionTree, LearnError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let indent = raw.len() - raw.trim_start_matches(' ').len();
        if indent % 2 != 0 {
            return Err(LearnError::ModelFormat {
                line: i + 1,
                reason: "odd indentation".to_string(),
            });
        }
        lines.push((indent / 2, raw.trim()));
    }
    let mut stream = TreeLines { lines, pos: 0 };
    let tree = parse_subtree(&mut stream, 0, feature_names)?;
    if stream.pos != stream.lines.len() {
        return Err(LearnError::ModelFormat {
            line: stream.pos + 1,
            reason: "trailing lines after the tree".to_string(),
        });
    }
    Ok(tree)
}

fn parse_subtree(
    stream: &mut TreeLines,
    depth: usize,
    names: &[String],
) -> Result<DecisionTree, LearnError> {
    let err = |pos: usize, reason: &str| LearnError::ModelFormat {
        line: pos + 1,
        reason: reason.to_string(),
    };
    let &(indent, line) = stream
        .lines
        .get(stream.pos)
        .ok_or_else(|| err(stream.pos, "unexpected end of tree"))?;
    if indent != depth {
        return Err(err(stream.pos, "wrong indentation depth"));
    }
    stream.pos += 1;

    if let Some(rest) = line.strip_prefix("-> ") {
        let (label, weights) = rest
            .split_once(' ')
            .ok_or_else(|| err(stream.pos - 1, "leaf missing weights"))?;
        let dist = parse_weights(weights).ok_or_else(|| err(stream.pos - 1, "bad weights"))?;
        if PopularityClass::from_label(label) != Some(dist.majority()) {
            return Err(err(stream.pos - 1, "leaf label disagrees with weights"));
        }
        return Ok(DecisionTree::Leaf { dist });
    }

    let (name, rest) = line
        .split_once(" <= ")
        .ok_or_else(|| err(stream.pos - 1, "expected a split line"))?;
    let attribute = names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| err(stream.pos - 1, "unknown attribute name"))?;
    let (threshold_text, rest) = rest
        .split_once(" : fallback=")
        .ok_or_else(|| err(stream.pos - 1, "missing fallback marker"))?;
    let threshold: f64 = threshold_text
        .parse()
        .map_err(|_| err(stream.pos - 1, "bad threshold"))?;
    let (fb, weights) = rest
        .split_once(' ')
        .ok_or_else(|| err(stream.pos - 1, "split missing weights"))?;
    let fallback = match fb {
        "low" => Branch::Low,
        "high" => Branch::High,
        _ => return Err(err(stream.pos - 1, "bad fallback branch")),
    };
    let dist = parse_weights(weights).ok_or_else(|| err(stream.pos - 1, "bad weights"))?;
    let low = parse_subtree(stream, depth + 1, names)?;
    let high = parse_subtree(stream, depth + 1, names)?;
    Ok(DecisionTree::Node {
        attribute,
        threshold,
        fallback,
        dist,
        low: Box::new(low),
        high: Box::new(high),
    })
}

fn parse_weights(text: &str) -> Option<ClassDistribution> {
    let inner = text.strip_prefix('(')?.strip_suffix(')')?;
    let parts: Vec<&str> = inner.split('/').collect();
    if parts.len() != 4 {
        return None;
    }
    let mut weights = [0.0f64; 4];
    for (slot, part) in weights.iter_mut().zip(&parts) {
        *slot = part.parse().ok()?;
    }
    Some(ClassDistribution { weights })
}

/// Entropy of a node's growing distribution; used by the partial-tree
/// expansion order.
pub(crate) fn dist_entropy(dist: &ClassDistribution) -> f64 {
    let total = dist.total();
    if total > 0.0 {
        entropy_of(&dist.weights, total)
    } else {
        0.0
    }
}

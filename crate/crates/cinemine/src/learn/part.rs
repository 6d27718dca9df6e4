//! Rule learning by repeated partial trees.
//!
//! Each round grows a partial tree on the instances not yet covered:
//! frontier nodes expand lowest-entropy-first, and expansion stops as soon
//! as any internal node has two finished leaves under it. After
//! reduced-error pruning, the heaviest leaf's path becomes one rule and the
//! instances it covers leave the pool. The default class is the majority of
//! the original training set, so classification is total.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::PopularityClass;

use super::split::best_split_weighted;
use super::tree::{
    carve_prune_set, dist_entropy, is_pure, reduced_error_prune, route_rows, subtable,
    weighted_dist, Branch, DecisionTree,
};
use super::{ClassDistribution, LearnError, LearnerParams, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Le,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub attribute: usize,
    pub op: CmpOp,
    pub threshold: f64,
}

impl Condition {
    /// A missing value never satisfies a condition.
    pub fn holds(&self, features: &[Option<f64>]) -> bool {
        match features[self.attribute] {
            Some(v) => match self.op {
                CmpOp::Le => v <= self.threshold,
                CmpOp::Gt => v > self.threshold,
            },
            None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub conclusion: PopularityClass,
    /// Instances of the round's pool the conditions covered.
    pub coverage: f64,
    /// Fraction of the covered instances the conclusion got right.
    pub accuracy: f64,
}

impl Rule {
    pub fn matches(&self, features: &[Option<f64>]) -> bool {
        self.conditions.iter().all(|c| c.holds(features))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleList {
    pub rules: Vec<Rule>,
    pub default: PopularityClass,
}

/// First matching rule wins; no match falls through to the default.
pub fn classify_rules(rules: &RuleList, features: &[Option<f64>]) -> PopularityClass {
    rules
        .rules
        .iter()
        .find(|r| r.matches(features))
        .map_or(rules.default, |r| r.conclusion)
}

pub fn part_learn(table: &Table, params: &LearnerParams) -> RuleList {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    part_learn_with_rng(table, params, &mut rng)
}

pub(crate) fn part_learn_with_rng(
    table: &Table,
    params: &LearnerParams,
    rng: &mut ChaCha8Rng,
) -> RuleList {
    let default = table.class_distribution().majority();
    let mut remaining: Vec<usize> = (0..table.rows.len()).collect();
    let mut rules = Vec::new();

    while !remaining.is_empty() {
        let classes: Vec<PopularityClass> =
            remaining.iter().map(|&i| table.rows[i].class).collect();
        let (grow_local, prune_local) = carve_prune_set(&classes, params.prune_fraction, rng);
        let grow_rows: Vec<(usize, f64)> =
            grow_local.iter().map(|&j| (remaining[j], 1.0)).collect();
        let prune_global: Vec<usize> = prune_local.iter().map(|&j| remaining[j]).collect();

        let tree = build_partial_tree(table, grow_rows, params);
        let tree = reduced_error_prune(&tree, &subtable(table, &prune_global));

        // A single-leaf tree yields no conditions; the default covers it.
        let Some((conditions, conclusion)) = best_leaf_rule(&tree) else {
            break;
        };
        let rule_matches = |i: usize| conditions.iter().all(|c| c.holds(&table.rows[i].features));
        let covered: Vec<usize> = remaining.iter().copied().filter(|&i| rule_matches(i)).collect();
        if covered.is_empty() {
            // Possible when only fractionally-routed (missing-valued)
            // instances reached the chosen leaf; without the guard the
            // pool would never shrink.
            break;
        }
        let correct = covered.iter().filter(|&&i| table.rows[i].class == conclusion).count();
        remaining.retain(|i| !rule_matches(*i));
        rules.push(Rule {
            conditions,
            conclusion,
            coverage: covered.len() as f64,
            accuracy: correct as f64 / covered.len() as f64,
        });
    }

    RuleList { rules, default }
}

enum NodeState {
    Frontier,
    Leaf,
    Internal {
        attribute: usize,
        threshold: f64,
        fallback: Branch,
        low: usize,
        high: usize,
    },
}

struct BuildNode {
    rows: Vec<(usize, f64)>,
    dist: ClassDistribution,
    state: NodeState,
}

/// Expand the lowest-entropy frontier node until some internal node has two
/// leaf children (or nothing is left to expand); unexpanded frontier nodes
/// become leaves.
fn build_partial_tree(
    table: &Table,
    root_rows: Vec<(usize, f64)>,
    params: &LearnerParams,
) -> DecisionTree {
    let root_dist = weighted_dist(table, &root_rows);
    let mut nodes = vec![BuildNode {
        rows: root_rows,
        dist: root_dist,
        state: NodeState::Frontier,
    }];

    loop {
        let next = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.state, NodeState::Frontier))
            .min_by(|(ai, a), (bi, b)| {
                dist_entropy(&a.dist)
                    .total_cmp(&dist_entropy(&b.dist))
                    .then(ai.cmp(bi))
            })
            .map(|(i, _)| i);
        let Some(i) = next else { break };

        let small = nodes[i].dist.total() < (2 * params.min_leaf) as f64;
        let split = if small || is_pure(&nodes[i].dist) {
            None
        } else {
            best_split_weighted(table, &nodes[i].rows, params)
        };
        match split {
            None => {
                nodes[i].state = NodeState::Leaf;
                if some_subtree_is_finished(&nodes) {
                    break;
                }
            }
            Some(split) => {
                let (low_rows, high_rows) =
                    route_rows(table, &nodes[i].rows, split.attribute, split.threshold);
                let low_w: f64 = low_rows.iter().map(|&(_, w)| w).sum();
                let high_w: f64 = high_rows.iter().map(|&(_, w)| w).sum();
                let fallback = if high_w > low_w { Branch::High } else { Branch::Low };
                let low = nodes.len();
                let low_dist = weighted_dist(table, &low_rows);
                nodes.push(BuildNode {
                    rows: low_rows,
                    dist: low_dist,
                    state: NodeState::Frontier,
                });
                let high = nodes.len();
                let high_dist = weighted_dist(table, &high_rows);
                nodes.push(BuildNode {
                    rows: high_rows,
                    dist: high_dist,
                    state: NodeState::Frontier,
                });
                nodes[i].state = NodeState::Internal {
                    attribute: split.attribute,
                    threshold: split.threshold,
                    fallback,
                    low,
                    high,
                };
            }
        }
    }

    build_subtree(&nodes, 0)
}

fn some_subtree_is_finished(nodes: &[BuildNode]) -> bool {
    nodes.iter().any(|n| match n.state {
        NodeState::Internal { low, high, .. } => {
            matches!(nodes[low].state, NodeState::Leaf)
                && matches!(nodes[high].state, NodeState::Leaf)
        }
        _ => false,
    })
}

fn build_subtree(nodes: &[BuildNode], i: usize) -> DecisionTree {
    match nodes[i].state {
        NodeState::Frontier | NodeState::Leaf => DecisionTree::Leaf { dist: nodes[i].dist },
        NodeState::Internal {
            attribute,
            threshold,
            fallback,
            low,
            high,
        } => DecisionTree::Node {
            attribute,
            threshold,
            fallback,
            dist: nodes[i].dist,
            low: Box::new(build_subtree(nodes, low)),
            high: Box::new(build_subtree(nodes, high)),
        },
    }
}

/// The heaviest leaf's path; pre-order (low first) breaks weight ties. A
/// bare-leaf tree gives none.
fn best_leaf_rule(tree: &DecisionTree) -> Option<(Vec<Condition>, PopularityClass)> {
    if matches!(tree, DecisionTree::Leaf { .. }) {
        return None;
    }
    let mut best: Option<(f64, Vec<Condition>, PopularityClass)> = None;
    let mut path = Vec::new();
    walk_leaves(tree, &mut path, &mut best);
    best.map(|(_, conditions, class)| (conditions, class))
}

fn walk_leaves(
    tree: &DecisionTree,
    path: &mut Vec<Condition>,
    best: &mut Option<(f64, Vec<Condition>, PopularityClass)>,
) {
    match tree {
        DecisionTree::Leaf { dist } => {
            let weight = dist.total();
            if best.as_ref().is_none_or(|(w, _, _)| weight > *w) {
                *best = Some((weight, path.clone(), dist.majority()));
            }
        }
        DecisionTree::Node {
            attribute,
            threshold,
            low,
            high,
            ..
        } => {
            path.push(Condition {
                attribute: *attribute,
                op: CmpOp::Le,
                threshold: *threshold,
            });
            walk_leaves(low, path, best);
            path.pop();
            path.push(Condition {
                attribute: *attribute,
                op: CmpOp::Gt,
                threshold: *threshold,
            });
            walk_leaves(high, path, best);
            path.pop();
        }
    }
}

/// One rule per line plus a final `DEFAULT:` line; exact round-trip with
/// [`parse_rules`].
pub fn render_rules(rules: &RuleList, feature_names: &[String]) -> String {
    let mut out = String::new();
    for rule in &rules.rules {
        out.push_str("IF ");
        for (i, c) in rule.conditions.iter().enumerate() {
            if i > 0 {
                out.push_str(" AND ");
            }
            let op = match c.op {
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
            };
            out.push_str(&format!("{} {} {}", feature_names[c.attribute], op, c.threshold));
        }
        out.push_str(&format!(
            " THEN {} ({}/{})\n",
            rule.conclusion.label(),
            rule.coverage,
            rule.accuracy
        ));
    }
    out.push_str(&format!("DEFAULT: {}\n", rules.default.label()));
    out
}

pub fn parse_rules(text: &str, feature_names: &[String]) -> Result<RuleList, LearnError> {
    let err = |line: usize, reason: &str| LearnError::ModelFormat {
        line,
        reason: reason.to_string(),
    };
    let mut rules = Vec::new();
    let mut default = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(label) = line.strip_prefix("DEFAULT: ") {
            if default.is_some() {
                return Err(err(lineno, "second DEFAULT line"));
            }
            default = Some(
                PopularityClass::from_label(label)
                    .ok_or_else(|| err(lineno, "unknown default class"))?,
            );
            continue;
        }
        if default.is_some() {
            return Err(err(lineno, "rule after the DEFAULT line"));
        }
        let body = line
            .strip_prefix("IF ")
            .ok_or_else(|| err(lineno, "expected IF"))?;
        let (cond_text, tail) = body
            .split_once(" THEN ")
            .ok_or_else(|| err(lineno, "missing THEN"))?;
        let (label, stats) = tail
            .split_once(" (")
            .ok_or_else(|| err(lineno, "missing coverage"))?;
        let conclusion =
            PopularityClass::from_label(label).ok_or_else(|| err(lineno, "unknown class"))?;
        let stats = stats
            .strip_suffix(')')
            .ok_or_else(|| err(lineno, "unterminated coverage"))?;
        let (cov, acc) = stats
            .split_once('/')
            .ok_or_else(|| err(lineno, "missing accuracy"))?;
        let coverage: f64 = cov.parse().map_err(|_| err(lineno, "bad coverage"))?;
        let accuracy: f64 = acc.parse().map_err(|_| err(lineno, "bad accuracy"))?;
        let mut conditions = Vec::new();
        for part in cond_text.split(" AND ") {
            let tokens: Vec<&str> = part.split(' ').collect();
            let [name, op, thr] = tokens[..] else {
                return Err(err(lineno, "bad condition"));
            };
            let attribute = feature_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| err(lineno, "unknown attribute name"))?;
            let op = match op {
                "<=" => CmpOp::Le,
                ">" => CmpOp::Gt,
                _ => return Err(err(lineno, "bad comparison")),
            };
            let threshold: f64 = thr.parse().map_err(|_| err(lineno, "bad threshold"))?;
            conditions.push(Condition {
                attribute,
                op,
                threshold,
            });
        }
        rules.push(Rule {
            conditions,
            conclusion,
            coverage,
            accuracy,
        });
    }
    Ok(RuleList {
        rules,
        default: default.ok_or_else(|| err(text.lines().count(), "missing DEFAULT line"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::PopularityClass::{Average, Excellent, Poor};
    use crate::learn::table_of;

    fn params() -> LearnerParams {
        LearnerParams::default()
    }

    #[test]
    fn pure_input_gives_no_rules() {
        let t = table_of(
            &[
                (&[Some(1.0)], Poor),
                (&[Some(2.0)], Poor),
                (&[Some(3.0)], Poor),
            ],
            &["x"],
        );
        let rules = part_learn(&t, &params());
        assert!(rules.rules.is_empty());
        assert_eq!(rules.default, Poor);
    }

    #[test]
    fn separable_input_gives_one_rule_and_default() {
        let t = table_of(
            &[
                (&[Some(1.0)], Excellent),
                (&[Some(2.0)], Excellent),
                (&[Some(3.0)], Average),
                (&[Some(4.0)], Average),
                (&[Some(5.0)], Average),
            ],
            &["x"],
        );
        let rules = part_learn(&t, &params());
        assert_eq!(rules.rules.len(), 1);
        let rule = &rules.rules[0];
        assert_eq!(rule.conclusion, Excellent);
        assert_eq!(rule.conditions.len(), 1);
        assert_eq!(rule.conditions[0].op, CmpOp::Le);
        assert_eq!(rules.default, Average);
        // Every training instance classifies correctly via rules+default.
        for row in &t.rows {
            assert_eq!(classify_rules(&rules, &row.features), row.class);
        }
    }

    #[test]
    fn classification_is_total_and_deterministic() {
        let t = table_of(
            &[
                (&[Some(1.0), Some(9.0)], Excellent),
                (&[Some(2.0), Some(8.0)], Excellent),
                (&[Some(3.0), Some(2.0)], Average),
                (&[Some(4.0), Some(1.0)], Average),
                (&[Some(5.0), Some(7.0)], Poor),
                (&[Some(6.0), Some(6.0)], Poor),
                (&[None, Some(5.0)], Average),
                (&[Some(2.5), None], Excellent),
                (&[Some(4.5), Some(3.0)], Poor),
            ],
            &["x", "y"],
        );
        let a = part_learn(&t, &params());
        let b = part_learn(&t, &params());
        assert_eq!(a, b);
        for row in &t.rows {
            // Never panics, always lands on one of the four labels.
            let _ = classify_rules(&a, &row.features);
        }
    }

    #[test]
    fn first_match_wins() {
        let mk = |attr, op, thr, class| Rule {
            conditions: vec![Condition {
                attribute: attr,
                op,
                threshold: thr,
            }],
            conclusion: class,
            coverage: 1.0,
            accuracy: 1.0,
        };
        let rules = RuleList {
            rules: vec![
                mk(0, CmpOp::Le, 5.0, Excellent),
                mk(0, CmpOp::Le, 9.0, Poor),
            ],
            default: Average,
        };
        // 3.0 matches both rules; the first fires.
        assert_eq!(classify_rules(&rules, &[Some(3.0)]), Excellent);
        assert_eq!(classify_rules(&rules, &[Some(7.0)]), Poor);
        assert_eq!(classify_rules(&rules, &[Some(11.0)]), Average);
    }

    #[test]
    fn missing_value_fails_conditions() {
        use crate::dataset::PopularityClass::Terrible;
        let rules = RuleList {
            rules: vec![Rule {
                conditions: vec![Condition {
                    attribute: 0,
                    op: CmpOp::Gt,
                    threshold: 0.0,
                }],
                conclusion: Excellent,
                coverage: 1.0,
                accuracy: 1.0,
            }],
            default: Terrible,
        };
        assert_eq!(classify_rules(&rules, &[None]), Terrible);
        assert_eq!(classify_rules(&rules, &[Some(1.0)]), Excellent);
    }

    #[test]
    fn rule_pool_shrinks_every_round() {
        // Three separable classes force two rounds: a rule peels off the
        // Excellent block, another the Average block, and the now-pure Poor
        // remainder yields a bare-leaf tree, ending the loop. Those rows
        // fall to the default, which is the ORIGINAL majority: a 3/3/3 tie
        // resolved to the earliest label, Excellent.
        let t = table_of(
            &[
                (&[Some(1.0)], Excellent),
                (&[Some(1.5)], Excellent),
                (&[Some(2.0)], Excellent),
                (&[Some(5.0)], Average),
                (&[Some(5.5)], Average),
                (&[Some(6.0)], Average),
                (&[Some(9.0)], Poor),
                (&[Some(9.5)], Poor),
                (&[Some(10.0)], Poor),
            ],
            &["x"],
        );
        let rules = part_learn(&t, &params());
        assert_eq!(rules.rules.len(), 2);
        assert_eq!(rules.rules[0].conclusion, Excellent);
        assert_eq!(rules.rules[1].conclusion, Average);
        assert_eq!(rules.default, Excellent);
        for row in &t.rows {
            let want = if row.class == Poor { Excellent } else { row.class };
            assert_eq!(classify_rules(&rules, &row.features), want);
        }
    }

    #[test]
    fn rendering_round_trips() {
        let t = table_of(
            &[
                (&[Some(1.0), Some(9.0)], Excellent),
                (&[Some(2.0), Some(8.0)], Excellent),
                (&[Some(3.0), Some(2.0)], Average),
                (&[Some(4.0), Some(1.0)], Average),
                (&[Some(5.0), Some(7.0)], Poor),
                (&[Some(6.0), Some(6.0)], Poor),
            ],
            &["x", "y"],
        );
        let rules = part_learn(&t, &params());
        let text = render_rules(&rules, &t.feature_names);
        let back = parse_rules(&text, &t.feature_names).unwrap();
        assert_eq!(rules, back);
        assert_eq!(render_rules(&back, &t.feature_names), text);
    }

    #[test]
    fn render_layout() {
        let rules = RuleList {
            rules: vec![Rule {
                conditions: vec![
                    Condition {
                        attribute: 0,
                        op: CmpOp::Le,
                        threshold: 6.25,
                    },
                    Condition {
                        attribute: 1,
                        op: CmpOp::Gt,
                        threshold: 500000.0,
                    },
                ],
                conclusion: Excellent,
                coverage: 12.0,
                accuracy: 0.75,
            }],
            default: Average,
        };
        let names = vec!["director_rank".to_string(), "budget".to_string()];
        assert_eq!(
            render_rules(&rules, &names),
            "IF director_rank <= 6.25 AND budget > 500000 THEN Excellent (12/0.75)\nDEFAULT: Average\n"
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        let names = vec!["x".to_string()];
        assert!(parse_rules("IF x <= 1 THEN Excellent (1/1)\n", &names).is_err());
        assert!(parse_rules("DEFAULT: Great\n", &names).is_err());
        assert!(parse_rules("IF y <= 1 THEN Excellent (1/1)\nDEFAULT: Average\n", &names).is_err());
    }
}

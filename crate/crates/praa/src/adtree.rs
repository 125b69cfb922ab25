//! Alternating decision trees: a root prediction value plus splitter nodes,
//! each carrying a single-attribute test and two real-valued prediction
//! children. A record's margin is the sum of the prediction values on every
//! path it satisfies; the margin sign picks the class.
//!
//! Training is boosting with exponential weight updates: each round adds the
//! (prediction node, condition) pair minimizing
//! `Z = 2(sqrt(W+(p^c) W-(p^c)) + sqrt(W+(p^!c) W-(p^!c))) + W(!p)`,
//! and the new prediction values are `0.5 ln((W+ + 1)/(W- + 1))`.
//!
//! Serialized form is line-oriented text:
//!
//! ```text
//! adtree v1
//! positive <label>
//! negative <label>
//! iterations <count>
//! attrs <count>
//! attr <index> <name>
//! root <value>
//! splitter <parent-prediction-node> lt <attr> <threshold> <true-value> <false-value>
//! splitter <parent-prediction-node> eq <attr> <true-value> <false-value> <label>
//! ```
//!
//! Prediction node ids: the root is 0; the j-th splitter (1-based) owns
//! prediction children `2j - 1` (condition true) and `2j` (condition false).

use std::fmt;
use std::fs;
use std::path::Path;

use crate::dataset::{AttributeKind, Cell, Dataset};
use crate::error::{Error, Result};

/// Single-attribute test. Numeric attributes test `cell < value`,
/// categorical attributes test `cell == label`.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Threshold { attr: usize, value: f64 },
    Equals { attr: usize, label: String },
}

impl Condition {
    pub fn attr(&self) -> usize {
        match self {
            Condition::Threshold { attr, .. } => *attr,
            Condition::Equals { attr, .. } => *attr,
        }
    }

    /// `None` when the cell is missing (or of an untestable kind): the
    /// splitter then contributes nothing and traversal below it stops.
    pub fn test(&self, cell: &Cell) -> Option<bool> {
        match (self, cell) {
            (_, Cell::Missing) => None,
            (Condition::Threshold { value, .. }, c) => c.as_f64().map(|v| v < *value),
            (Condition::Equals { label, .. }, Cell::Categorical(s)) => Some(s == label),
            (Condition::Equals { .. }, _) => None,
        }
    }

    fn render(&self, names: &[String], branch: bool) -> String {
        match self {
            Condition::Threshold { attr, value } => {
                if branch {
                    format!("{} < {}", names[*attr], value)
                } else {
                    format!("{} >= {}", names[*attr], value)
                }
            }
            Condition::Equals { attr, label } => {
                if branch {
                    format!("{} = {}", names[*attr], label)
                } else {
                    format!("{} != {}", names[*attr], label)
                }
            }
        }
    }
}

/// Splitter node: a condition attached under a prediction node, with the
/// prediction values of its two children.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitter {
    /// Prediction node this splitter hangs from (0 = root).
    pub parent: usize,
    pub condition: Condition,
    pub true_value: f64,
    pub false_value: f64,
}

/// Margin of one record: the summed prediction values and the mapped label.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub score: f64,
    pub label: String,
}

/// Trained (or hand-built) alternating decision tree. Immutable once built;
/// scoring is read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct AdTree {
    root: f64,
    splitters: Vec<Splitter>,
    attr_names: Vec<String>,
    positive: String,
    negative: String,
    iterations: usize,
}

impl AdTree {
    /// Start a tree from its root prediction. `positive` is the label mapped
    /// to nonnegative margins.
    pub fn new(
        root: f64,
        positive: impl Into<String>,
        negative: impl Into<String>,
        attr_names: Vec<String>,
    ) -> AdTree {
        AdTree {
            root,
            splitters: Vec::new(),
            attr_names,
            positive: positive.into(),
            negative: negative.into(),
            iterations: 0,
        }
    }

    /// Append a splitter under an existing prediction node.
    pub fn add_splitter(
        &mut self,
        parent: usize,
        condition: Condition,
        true_value: f64,
        false_value: f64,
    ) -> Result<()> {
        if parent > 2 * self.splitters.len() {
            return Err(Error::InvalidArgument(format!(
                "parent prediction node {parent} does not exist yet"
            )));
        }
        if condition.attr() >= self.attr_names.len() {
            return Err(Error::InvalidArgument(format!(
                "condition references attribute {} of {}",
                condition.attr(),
                self.attr_names.len()
            )));
        }
        self.splitters.push(Splitter {
            parent,
            condition,
            true_value,
            false_value,
        });
        Ok(())
    }

    pub fn root(&self) -> f64 {
        self.root
    }

    pub fn splitters(&self) -> &[Splitter] {
        &self.splitters
    }

    pub fn attr_names(&self) -> &[String] {
        &self.attr_names
    }

    pub fn positive_label(&self) -> &str {
        &self.positive
    }

    pub fn negative_label(&self) -> &str {
        &self.negative
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn n_prediction_nodes(&self) -> usize {
        2 * self.splitters.len() + 1
    }

    /// Prediction nodes reached by a record. Splitters are stored in
    /// topological order, so one forward pass settles every path.
    fn reach(&self, record: &[Cell]) -> Vec<bool> {
        let mut reached = vec![false; self.n_prediction_nodes()];
        reached[0] = true;
        for (j, s) in self.splitters.iter().enumerate() {
            if reached[s.parent] {
                match s.condition.test(&record[s.condition.attr()]) {
                    Some(true) => reached[2 * j + 1] = true,
                    Some(false) => reached[2 * j + 2] = true,
                    None => {}
                }
            }
        }
        reached
    }

    /// Margin of a record whose cells line up with `attr_names` (a trailing
    /// decision cell may be present; it is ignored).
    pub fn score(&self, record: &[Cell]) -> Margin {
        assert!(
            record.len() >= self.attr_names.len(),
            "record has {} cells, tree expects {}",
            record.len(),
            self.attr_names.len()
        );
        let reached = self.reach(record);
        let mut score = self.root;
        for (j, s) in self.splitters.iter().enumerate() {
            if reached[2 * j + 1] {
                score += s.true_value;
            } else if reached[2 * j + 2] {
                score += s.false_value;
            }
        }
        let label = if score >= 0.0 {
            self.positive.clone()
        } else {
            self.negative.clone()
        };
        Margin { score, label }
    }

    /// One rule per root-to-leaf prediction path: the ordered conditions and
    /// the cumulative contribution (root included).
    pub fn extract_rules(&self) -> Vec<Rule> {
        let mut is_parent = vec![false; self.n_prediction_nodes()];
        for s in &self.splitters {
            is_parent[s.parent] = true;
        }
        let mut rules = Vec::new();
        for leaf in 0..self.n_prediction_nodes() {
            if is_parent[leaf] {
                continue;
            }
            let mut conditions = Vec::new();
            let mut contributions = Vec::new();
            let mut node = leaf;
            while node != 0 {
                let j = (node - 1) / 2;
                let branch = node % 2 == 1;
                let s = &self.splitters[j];
                conditions.push(s.condition.render(&self.attr_names, branch));
                contributions.push(if branch { s.true_value } else { s.false_value });
                node = s.parent;
            }
            conditions.reverse();
            contributions.reverse();
            let score = self.root + contributions.iter().sum::<f64>();
            rules.push(Rule {
                conditions,
                contributions,
                score,
            });
        }
        rules
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("adtree v1\n");
        out.push_str(&format!("positive {}\n", self.positive));
        out.push_str(&format!("negative {}\n", self.negative));
        out.push_str(&format!("iterations {}\n", self.iterations));
        out.push_str(&format!("attrs {}\n", self.attr_names.len()));
        for (i, name) in self.attr_names.iter().enumerate() {
            out.push_str(&format!("attr {i} {name}\n"));
        }
        out.push_str(&format!("root {}\n", self.root));
        for s in &self.splitters {
            match &s.condition {
                Condition::Threshold { attr, value } => out.push_str(&format!(
                    "splitter {} lt {} {} {} {}\n",
                    s.parent, attr, value, s.true_value, s.false_value
                )),
                Condition::Equals { attr, label } => out.push_str(&format!(
                    "splitter {} eq {} {} {} {}\n",
                    s.parent, attr, s.true_value, s.false_value, label
                )),
            }
        }
        out
    }

    pub fn deserialize(text: &str) -> Result<AdTree> {
        let bad = |why: &str| Error::Data(format!("adtree parse: {why}"));
        let mut lines = text.lines();
        if lines.next() != Some("adtree v1") {
            return Err(bad("expected header `adtree v1`"));
        }
        let mut positive = None;
        let mut negative = None;
        let mut iterations = 0usize;
        let mut attr_names: Vec<String> = Vec::new();
        let mut root = None;
        let mut splitters = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(' ').ok_or_else(|| bad("malformed line"))?;
            match head {
                "positive" => positive = Some(rest.to_string()),
                "negative" => negative = Some(rest.to_string()),
                "iterations" => {
                    iterations = rest.parse().map_err(|_| bad("bad iteration count"))?
                }
                "attrs" => {
                    let n: usize = rest.parse().map_err(|_| bad("bad attr count"))?;
                    attr_names.reserve(n);
                }
                "attr" => {
                    let (idx, name) = rest.split_once(' ').ok_or_else(|| bad("bad attr line"))?;
                    let idx: usize = idx.parse().map_err(|_| bad("bad attr index"))?;
                    if idx != attr_names.len() {
                        return Err(bad("attr lines out of order"));
                    }
                    attr_names.push(name.to_string());
                }
                "root" => root = Some(rest.parse().map_err(|_| bad("bad root value"))?),
                "splitter" => {
                    let tokens: Vec<&str> = rest.splitn(6, ' ').collect();
                    if tokens.len() < 5 {
                        return Err(bad("short splitter line"));
                    }
                    let parent: usize = tokens[0].parse().map_err(|_| bad("bad parent id"))?;
                    let op = tokens[1];
                    let attr: usize = tokens[2].parse().map_err(|_| bad("bad attr index"))?;
                    let (condition, tv, fv) = match op {
                        "lt" => {
                            if tokens.len() != 6 {
                                return Err(bad("lt splitter needs 6 fields"));
                            }
                            let value: f64 =
                                tokens[3].parse().map_err(|_| bad("bad threshold"))?;
                            let tv: f64 = tokens[4].parse().map_err(|_| bad("bad value"))?;
                            let fv: f64 = tokens[5].parse().map_err(|_| bad("bad value"))?;
                            (Condition::Threshold { attr, value }, tv, fv)
                        }
                        "eq" => {
                            if tokens.len() != 6 {
                                return Err(bad("eq splitter needs 6 fields"));
                            }
                            let tv: f64 = tokens[3].parse().map_err(|_| bad("bad value"))?;
                            let fv: f64 = tokens[4].parse().map_err(|_| bad("bad value"))?;
                            let label = tokens[5].to_string();
                            (Condition::Equals { attr, label }, tv, fv)
                        }
                        other => return Err(bad(&format!("unknown splitter op {other:?}"))),
                    };
                    splitters.push(Splitter {
                        parent,
                        condition,
                        true_value: tv,
                        false_value: fv,
                    });
                }
                other => return Err(bad(&format!("unknown line kind {other:?}"))),
            }
        }
        let mut tree = AdTree {
            root: root.ok_or_else(|| bad("missing root line"))?,
            splitters: Vec::new(),
            attr_names,
            positive: positive.ok_or_else(|| bad("missing positive label"))?,
            negative: negative.ok_or_else(|| bad("missing negative label"))?,
            iterations,
        };
        for s in splitters {
            tree.add_splitter(s.parent, s.condition, s.true_value, s.false_value)?;
        }
        Ok(tree)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path.as_ref(), self.serialize())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<AdTree> {
        AdTree::deserialize(&fs::read_to_string(path.as_ref())?)
    }
}

/// Root-to-leaf decision rule with its cumulative score.
#[derive(Debug, Clone)]
pub struct Rule {
    pub conditions: Vec<String>,
    pub contributions: Vec<f64>,
    /// Root prediction plus every contribution along the path.
    pub score: f64,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conditions.is_empty() {
            write!(f, "always => score {:.3}", self.score)
        } else {
            write!(f, "{} => score {:.3}", self.conditions.join(" AND "), self.score)
        }
    }
}

enum EncodedColumn {
    Numeric(Vec<f64>),
    Categorical { values: Vec<usize>, labels: Vec<String> },
}

struct Encoded {
    columns: Vec<EncodedColumn>,
    /// Candidate thresholds (numeric) or label ids (categorical).
    candidates: Vec<Vec<f64>>,
    y: Vec<f64>,
}

fn encode(data: &Dataset, positive: &str) -> Result<Encoded> {
    let m = data.n_rows();
    let mut columns = Vec::new();
    let mut candidates = Vec::new();
    for l in 0..data.n_features() {
        match data.schema()[l].kind {
            AttributeKind::Integer | AttributeKind::Real => {
                let mut values = Vec::with_capacity(m);
                for row in data.rows() {
                    values.push(row[l].as_f64().ok_or_else(|| {
                        Error::InvalidArgument(
                            "training data contains missing cells; impute first".into(),
                        )
                    })?);
                }
                let mut distinct = values.clone();
                distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
                distinct.dedup();
                let cand: Vec<f64> = distinct
                    .windows(2)
                    .map(|w| (w[0] + w[1]) / 2.0)
                    .collect();
                columns.push(EncodedColumn::Numeric(values));
                candidates.push(cand);
            }
            AttributeKind::Categorical => {
                let mut labels: Vec<String> = Vec::new();
                for row in data.rows() {
                    match &row[l] {
                        Cell::Categorical(s) => {
                            if !labels.contains(s) {
                                labels.push(s.clone());
                            }
                        }
                        _ => {
                            return Err(Error::InvalidArgument(
                                "training data contains missing cells; impute first".into(),
                            ))
                        }
                    }
                }
                labels.sort();
                let values = data
                    .rows()
                    .iter()
                    .map(|row| match &row[l] {
                        Cell::Categorical(s) => labels.iter().position(|x| x == s).unwrap(),
                        _ => unreachable!(),
                    })
                    .collect();
                let cand = (0..labels.len()).map(|i| i as f64).collect();
                columns.push(EncodedColumn::Categorical { values, labels });
                candidates.push(cand);
            }
            AttributeKind::Decision => unreachable!(),
        }
    }
    let y = (0..m)
        .map(|i| if data.decision_label(i) == positive { 1.0 } else { -1.0 })
        .collect();
    Ok(Encoded {
        columns,
        candidates,
        y,
    })
}

fn prediction_value(w_pos: f64, w_neg: f64) -> f64 {
    // epsilon = 1 smoothing keeps pure partitions finite
    0.5 * ((w_pos + 1.0) / (w_neg + 1.0)).ln()
}

struct BestSplit {
    z: f64,
    node: usize,
    attr: usize,
    candidate: f64,
    w_true: (f64, f64),
    w_false: (f64, f64),
}

/// Train with the label of the first record mapped to positive margins.
pub fn train_adtree(data: &Dataset, iterations: usize) -> Result<AdTree> {
    let labels = data.class_labels();
    let positive = labels
        .first()
        .ok_or_else(|| Error::Data("cannot train on an empty dataset".into()))?;
    train_adtree_with_positive(data, iterations, positive)
}

/// Train with an explicit positive label; cross-validation uses this so all
/// fold trees share one sign convention.
pub fn train_adtree_with_positive(
    data: &Dataset,
    iterations: usize,
    positive: &str,
) -> Result<AdTree> {
    if iterations < 1 {
        return Err(Error::InvalidArgument("iterations must be at least 1".into()));
    }
    let labels = data.class_labels();
    if !labels.iter().any(|l| l == positive) {
        return Err(Error::InvalidArgument(format!(
            "positive label {positive:?} does not occur in the training data"
        )));
    }
    let negative = labels
        .iter()
        .find(|l| l.as_str() != positive)
        .cloned()
        .unwrap_or_else(|| "(none)".to_string());
    let attr_names: Vec<String> = data
        .schema()
        .iter()
        .take(data.n_features())
        .map(|c| c.name.clone())
        .collect();

    let enc = encode(data, positive)?;
    let m = data.n_rows();
    let mut weights = vec![1.0f64; m];
    let (w_pos, w_neg) = weight_sums(&weights, &enc.y, &(0..m).collect::<Vec<_>>());
    let root = prediction_value(w_pos, w_neg);
    let mut tree = AdTree::new(root, positive, &negative, attr_names);
    for i in 0..m {
        weights[i] *= (-root * enc.y[i]).exp();
    }

    if labels.len() < 2 {
        log::warn!("training data holds a single class; returning a root-only tree");
        return Ok(tree);
    }

    // Record indices reaching each prediction node; fixed once created.
    let mut reach: Vec<Vec<usize>> = vec![(0..m).collect()];

    for round in 0..iterations {
        let total_weight: f64 = weights.iter().sum();
        let mut best: Option<BestSplit> = None;
        for (node, members) in reach.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let (wp_node, wm_node) = weight_sums(&weights, &enc.y, members);
            let w_not_p = total_weight - wp_node - wm_node;
            for (attr, column) in enc.columns.iter().enumerate() {
                match column {
                    EncodedColumn::Numeric(values) => {
                        let mut sorted: Vec<usize> = members.clone();
                        sorted.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
                        let mut ptr = 0;
                        let mut wp_true = 0.0;
                        let mut wm_true = 0.0;
                        for &threshold in &enc.candidates[attr] {
                            while ptr < sorted.len() && values[sorted[ptr]] < threshold {
                                let i = sorted[ptr];
                                if enc.y[i] > 0.0 {
                                    wp_true += weights[i];
                                } else {
                                    wm_true += weights[i];
                                }
                                ptr += 1;
                            }
                            consider(
                                &mut best,
                                node,
                                attr,
                                threshold,
                                (wp_true, wm_true),
                                (
                                    (wp_node - wp_true).max(0.0),
                                    (wm_node - wm_true).max(0.0),
                                ),
                                w_not_p,
                            );
                        }
                    }
                    EncodedColumn::Categorical { values, labels } => {
                        let mut wp = vec![0.0; labels.len()];
                        let mut wm = vec![0.0; labels.len()];
                        for &i in members {
                            if enc.y[i] > 0.0 {
                                wp[values[i]] += weights[i];
                            } else {
                                wm[values[i]] += weights[i];
                            }
                        }
                        for id in 0..labels.len() {
                            consider(
                                &mut best,
                                node,
                                attr,
                                id as f64,
                                (wp[id], wm[id]),
                                (
                                    (wp_node - wp[id]).max(0.0),
                                    (wm_node - wm[id]).max(0.0),
                                ),
                                w_not_p,
                            );
                        }
                    }
                }
            }
        }

        let Some(best) = best else {
            log::warn!("no candidate splits available; stopping after {round} rounds");
            break;
        };

        let condition = match &enc.columns[best.attr] {
            EncodedColumn::Numeric(_) => Condition::Threshold {
                attr: best.attr,
                value: best.candidate,
            },
            EncodedColumn::Categorical { labels, .. } => Condition::Equals {
                attr: best.attr,
                label: labels[best.candidate as usize].clone(),
            },
        };
        let a = prediction_value(best.w_true.0, best.w_true.1);
        let b = prediction_value(best.w_false.0, best.w_false.1);

        let members = reach[best.node].clone();
        let mut true_members = Vec::new();
        let mut false_members = Vec::new();
        for &i in &members {
            let satisfied = match &enc.columns[best.attr] {
                EncodedColumn::Numeric(values) => values[i] < best.candidate,
                EncodedColumn::Categorical { values, .. } => {
                    values[i] == best.candidate as usize
                }
            };
            if satisfied {
                weights[i] *= (-a * enc.y[i]).exp();
                true_members.push(i);
            } else {
                weights[i] *= (-b * enc.y[i]).exp();
                false_members.push(i);
            }
        }
        tree.add_splitter(best.node, condition, a, b)?;
        reach.push(true_members);
        reach.push(false_members);
        tree.iterations = round + 1;
    }
    Ok(tree)
}

fn weight_sums(weights: &[f64], y: &[f64], members: &[usize]) -> (f64, f64) {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for &i in members {
        if y[i] > 0.0 {
            pos += weights[i];
        } else {
            neg += weights[i];
        }
    }
    (pos, neg)
}

#[allow(clippy::too_many_arguments)]
fn consider(
    best: &mut Option<BestSplit>,
    node: usize,
    attr: usize,
    candidate: f64,
    w_true: (f64, f64),
    w_false: (f64, f64),
    w_not_p: f64,
) {
    let z = 2.0 * ((w_true.0 * w_true.1).sqrt() + (w_false.0 * w_false.1).sqrt()) + w_not_p;
    // Strict improvement keeps the first (node, attr, candidate) on ties.
    if best.as_ref().map_or(true, |b| z < b.z) {
        *best = Some(BestSplit {
            z,
            node,
            attr,
            candidate,
            w_true,
            w_false,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_schema, Dataset};

    fn ds(csv: &str, schema: &str) -> Dataset {
        let schema = parse_schema(schema).unwrap();
        Dataset::from_csv_reader(csv.as_bytes(), &schema, false).unwrap()
    }

    fn training_accuracy(tree: &AdTree, data: &Dataset) -> f64 {
        let correct = (0..data.n_rows())
            .filter(|&i| tree.score(data.feature_row(i)).label == data.decision_label(i))
            .count();
        correct as f64 / data.n_rows() as f64
    }

    #[test]
    fn balanced_dataset_has_zero_root() {
        let data = ds(
            "1,Y\n2,Y\n3,N\n4,N\n",
            "level real\nclass decision\n",
        );
        let tree = train_adtree(&data, 1).unwrap();
        assert_eq!(tree.root(), 0.0);
    }

    #[test]
    fn root_matches_direct_formula() {
        let data = ds(
            "1,Y\n2,Y\n3,Y\n4,N\n",
            "level real\nclass decision\n",
        );
        let tree = train_adtree(&data, 1).unwrap();
        let expected = 0.5 * (4.0f64 / 2.0).ln();
        assert!((tree.root() - expected).abs() < 1e-12);
    }

    #[test]
    fn perfect_binary_feature_one_round() {
        let data = ds(
            "yes,x,Y\nyes,y,Y\nno,x,N\nno,y,N\n",
            "flag categorical\nnoise categorical\nclass decision\n",
        );
        let tree = train_adtree(&data, 1).unwrap();
        assert_eq!(tree.splitters().len(), 1);
        assert_eq!(tree.splitters()[0].condition.attr(), 0);
        assert_eq!(training_accuracy(&tree, &data), 1.0);
    }

    #[test]
    fn single_class_gives_root_only_tree() {
        let schema = parse_schema("level real\nclass decision\n").unwrap();
        let rows = vec![
            vec![Cell::Real(1.0), Cell::Categorical("Y".into())],
            vec![Cell::Real(2.0), Cell::Categorical("Y".into())],
        ];
        let data = Dataset::new(schema, rows).unwrap();
        let tree = train_adtree(&data, 5).unwrap();
        assert!(tree.splitters().is_empty());
        let expected = 0.5 * 3.0f64.ln();
        assert!((tree.root() - expected).abs() < 1e-12);
        assert!(tree.root() > 0.0);
    }

    #[test]
    fn empty_tree_scores_root_everywhere() {
        let tree = AdTree::new(0.25, "Y", "N", vec!["a".into()]);
        let m = tree.score(&[Cell::Real(3.0)]);
        assert_eq!(m.score, 0.25);
        assert_eq!(m.label, "Y");
        let m = tree.score(&[Cell::Missing]);
        assert_eq!(m.score, 0.25);
    }

    #[test]
    fn chained_contributions_sum() {
        let mut tree = AdTree::new(0.0, "Y", "N", vec!["hyplip".into(), "ht".into()]);
        tree.add_splitter(
            0,
            Condition::Threshold { attr: 0, value: 1.5 },
            0.5,
            -2.098,
        )
        .unwrap();
        // Hang the next splitter under the false child (node 2).
        tree.add_splitter(
            2,
            Condition::Threshold { attr: 1, value: 3.5 },
            -1.348,
            0.7,
        )
        .unwrap();
        let margin = tree.score(&[Cell::Real(2.0), Cell::Real(1.0)]);
        assert!((margin.score - (-2.098 + -1.348)).abs() < 1e-12);
        assert!((margin.score - (-3.446)).abs() < 1e-12);
        assert_eq!(margin.label, "N");
    }

    #[test]
    fn missing_cell_stops_traversal_below() {
        let mut tree = AdTree::new(0.1, "Y", "N", vec!["a".into(), "b".into()]);
        tree.add_splitter(0, Condition::Threshold { attr: 0, value: 5.0 }, 1.0, -1.0)
            .unwrap();
        tree.add_splitter(1, Condition::Threshold { attr: 1, value: 5.0 }, 2.0, -2.0)
            .unwrap();
        // Missing on attr 0: neither child of splitter 1 fires, and the
        // second splitter (under node 1) is never reached.
        let m = tree.score(&[Cell::Missing, Cell::Real(1.0)]);
        assert!((m.score - 0.1).abs() < 1e-12);
        // Observed attr 0 but missing attr 1: only the first splitter fires.
        let m = tree.score(&[Cell::Real(1.0), Cell::Missing]);
        assert!((m.score - 1.1).abs() < 1e-12);
    }

    #[test]
    fn rules_from_root_only_tree() {
        let tree = AdTree::new(0.25, "Y", "N", vec![]);
        let rules = tree.extract_rules();
        assert_eq!(rules.len(), 1);
        assert!(rules[0].conditions.is_empty());
        assert_eq!(rules[0].score, 0.25);
        assert_eq!(rules[0].to_string(), "always => score 0.250");
    }

    #[test]
    fn one_splitter_yields_two_rules() {
        let mut tree = AdTree::new(0.0, "Y", "N", vec!["flag".into()]);
        tree.add_splitter(
            0,
            Condition::Equals { attr: 0, label: "yes".into() },
            0.8,
            -0.6,
        )
        .unwrap();
        let rules = tree.extract_rules();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].conditions, vec!["flag = yes".to_string()]);
        assert!((rules[0].score - 0.8).abs() < 1e-12);
        assert_eq!(rules[1].conditions, vec!["flag != yes".to_string()]);
        assert!((rules[1].score - (-0.6)).abs() < 1e-12);
    }

    #[test]
    fn serialization_round_trip_scores_identically() {
        let data = crate::dataset::generate_synthetic(60, 5, 0.0, 17).unwrap();
        let tree = train_adtree(&data, 6).unwrap();
        let back = AdTree::deserialize(&tree.serialize()).unwrap();
        for i in 0..data.n_rows() {
            let a = tree.score(data.feature_row(i));
            let b = back.score(data.feature_row(i));
            assert!((a.score - b.score).abs() < 1e-12);
            assert_eq!(a.label, b.label);
        }
    }

    #[test]
    fn extra_round_only_touches_its_path() {
        let data = crate::dataset::generate_synthetic(80, 5, 0.0, 23).unwrap();
        let t5 = train_adtree(&data, 5).unwrap();
        let t6 = train_adtree(&data, 6).unwrap();
        assert_eq!(t6.splitters().len(), 6);
        let new = &t6.splitters()[5];
        for i in 0..data.n_rows() {
            let record = data.feature_row(i);
            let reached = t5.reach(record);
            let touched = reached[new.parent]
                && new.condition.test(&record[new.condition.attr()]).is_some();
            let a = t5.score(record).score;
            let b = t6.score(record).score;
            if !touched {
                assert!((a - b).abs() < 1e-12, "untouched record {i} moved");
            }
        }
    }

    #[test]
    fn boosting_does_not_hurt_training_accuracy_on_fixture() {
        let data = crate::dataset::generate_synthetic(100, 5, 0.0, 31).unwrap();
        let trained = train_adtree(&data, 10).unwrap();
        let root_only = AdTree::new(
            trained.root(),
            trained.positive_label(),
            trained.negative_label(),
            trained.attr_names().to_vec(),
        );
        assert!(training_accuracy(&trained, &data) >= training_accuracy(&root_only, &data));
    }

    #[test]
    fn rejects_missing_training_cells() {
        let data = ds(
            "1,Y\n?,Y\n3,N\n4,N\n",
            "level real\nclass decision\n",
        );
        assert!(train_adtree(&data, 2).is_err());
    }

    #[test]
    fn label_with_spaces_survives_serialization() {
        let mut tree = AdTree::new(-0.5, "has disease", "no disease", vec!["flag".into()]);
        tree.add_splitter(
            0,
            Condition::Equals { attr: 0, label: "left handed".into() },
            1.0,
            -1.0,
        )
        .unwrap();
        let back = AdTree::deserialize(&tree.serialize()).unwrap();
        assert_eq!(back, tree);
    }
}

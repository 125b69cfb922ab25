//! Nonparametric mixed-type proximity between records.
//!
//! Each feature column contributes an index in [0, 1] to a record pair. The
//! index is built from class-conditional value counts for categorical and
//! integer columns and from skew-directed order statistics for real columns;
//! the pair distance is the Euclidean norm of the per-column indices. No
//! scaling assumptions are made about the raw values.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::dataset::{skewness, AttributeKind, Cell, Dataset};
use crate::error::{Error, Result};

/// How the order-statistic sets are built for real columns across classes.
///
/// `Paper` draws both counting sets from the first record's class column;
/// `Symmetric` draws the second set from the second record's class column
/// with that class's own skewness sign. Fixed when the context is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossRealSets {
    #[default]
    Paper,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum CountKey {
    Int(i64),
    Cat(String),
}

impl CountKey {
    fn from_cell(cell: &Cell) -> Option<CountKey> {
        match cell {
            Cell::Integer(v) => Some(CountKey::Int(*v)),
            Cell::Categorical(s) => Some(CountKey::Cat(s.clone())),
            _ => None,
        }
    }
}

enum ColumnTable {
    /// Categorical and integer columns: per-class value counts.
    Counting {
        counts: Vec<BTreeMap<CountKey, usize>>,
        observed: Vec<usize>,
    },
    /// Real columns: per-class sorted values and skewness direction.
    Real {
        sorted: Vec<Vec<f64>>,
        skew_nonneg: Vec<bool>,
    },
}

/// Precomputed class-conditional tables for one dataset. Immutable after
/// construction; pairwise queries are count lookups and binary searches.
pub struct IndexContext<'a> {
    data: &'a Dataset,
    labels: Vec<String>,
    row_class: Vec<usize>,
    tables: Vec<ColumnTable>,
    mode: CrossRealSets,
}

impl<'a> IndexContext<'a> {
    pub fn new(data: &'a Dataset, mode: CrossRealSets) -> Result<IndexContext<'a>> {
        let labels = data.class_labels();
        if labels.len() > 2 {
            return Err(Error::Data(format!(
                "proximity indices are defined for two decision classes, found {}",
                labels.len()
            )));
        }
        let row_class: Vec<usize> = (0..data.n_rows())
            .map(|i| labels.iter().position(|l| l == data.decision_label(i)).unwrap())
            .collect();

        let n_classes = labels.len();
        let mut tables = Vec::with_capacity(data.n_features());
        for l in 0..data.n_features() {
            let kind = data.schema()[l].kind;
            match kind {
                AttributeKind::Categorical | AttributeKind::Integer => {
                    let mut counts = vec![BTreeMap::new(); n_classes];
                    let mut observed = vec![0usize; n_classes];
                    for (i, row) in data.rows().iter().enumerate() {
                        if let Some(key) = CountKey::from_cell(&row[l]) {
                            let c = row_class[i];
                            *counts[c].entry(key).or_insert(0) += 1;
                            observed[c] += 1;
                        }
                    }
                    tables.push(ColumnTable::Counting { counts, observed });
                }
                AttributeKind::Real => {
                    let mut sorted = vec![Vec::new(); n_classes];
                    for (i, row) in data.rows().iter().enumerate() {
                        if let Cell::Real(v) = row[l] {
                            sorted[row_class[i]].push(v);
                        }
                    }
                    for vs in &mut sorted {
                        vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    }
                    let skew_nonneg = sorted.iter().map(|vs| skewness(vs) >= 0.0).collect();
                    tables.push(ColumnTable::Real { sorted, skew_nonneg });
                }
                AttributeKind::Decision => unreachable!("decision is the last column"),
            }
        }
        Ok(IndexContext {
            data,
            labels,
            row_class,
            tables,
            mode,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        self.data
    }

    pub fn class_of(&self, row: usize) -> usize {
        self.row_class[row]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn count_in_class(&self, l: usize, class: usize, cell: &Cell) -> usize {
        match &self.tables[l] {
            ColumnTable::Counting { counts, .. } => CountKey::from_cell(cell)
                .and_then(|k| counts[class].get(&k))
                .copied()
                .unwrap_or(0),
            _ => unreachable!("counting lookup on a real column"),
        }
    }

    /// Values of class `class` in column `l` that fall on the skew-directed
    /// side of `v`: strictly greater when the class skewness is nonnegative,
    /// less-or-equal when negative. `skew_nonneg` may come from a different
    /// class than the values (cross-class paper mode).
    fn side_count(sorted: &[f64], skew_nonneg: bool, v: f64) -> usize {
        let le = sorted.partition_point(|x| *x <= v);
        if skew_nonneg {
            sorted.len() - le
        } else {
            le
        }
    }

    /// Same-class index for categorical/integer columns:
    /// `min(count(value_i), count(value_k)) / class_observed`, 0 for `i == k`.
    pub fn index_same_class_nominal(&self, i: usize, k: usize, l: usize) -> f64 {
        if i == k {
            return 0.0;
        }
        let class = self.row_class[i];
        debug_assert_eq!(class, self.row_class[k]);
        let gamma = match &self.tables[l] {
            ColumnTable::Counting { observed, .. } => observed[class],
            _ => unreachable!(),
        };
        if gamma == 0 {
            return 0.0;
        }
        let p = self.count_in_class(l, class, self.data.cell(i, l));
        let q = self.count_in_class(l, class, self.data.cell(k, l));
        (p.min(q) as f64) / gamma as f64
    }

    /// Same-class index for real columns: skew-directed side counts of both
    /// cells within the shared class column, normalized by its size.
    pub fn index_same_class_real(&self, i: usize, k: usize, l: usize) -> f64 {
        if i == k {
            return 0.0;
        }
        let class = self.row_class[i];
        debug_assert_eq!(class, self.row_class[k]);
        let (sorted, nonneg) = match &self.tables[l] {
            ColumnTable::Real { sorted, skew_nonneg } => (&sorted[class], skew_nonneg[class]),
            _ => unreachable!(),
        };
        if sorted.is_empty() {
            return 0.0;
        }
        let vi = self.data.cell(i, l).as_f64().expect("observed real cell");
        let vk = self.data.cell(k, l).as_f64().expect("observed real cell");
        let tau = Self::side_count(sorted, nonneg, vi);
        let rho = Self::side_count(sorted, nonneg, vk);
        (tau.min(rho) as f64) / sorted.len() as f64
    }

    /// Cross-class index for categorical/integer columns: each cell's count
    /// inside its own class, combined as `max(beta, delta) / (beta + delta)`.
    pub fn index_cross_class_nominal(&self, i: usize, k: usize, l: usize) -> f64 {
        if i == k {
            return 0.0;
        }
        debug_assert_ne!(self.row_class[i], self.row_class[k]);
        let beta = self.count_in_class(l, self.row_class[i], self.data.cell(i, l));
        let delta = self.count_in_class(l, self.row_class[k], self.data.cell(k, l));
        let total = beta + delta;
        if total == 0 {
            return 0.0;
        }
        (beta.max(delta) as f64) / total as f64
    }

    /// Cross-class index for real columns: skew-directed side counts over
    /// `min(beta, delta) / (|P| + |Q|)`. In `Paper` mode both counts come
    /// from the first record's class column; in `Symmetric` mode the second
    /// count comes from the second record's class column.
    pub fn index_cross_class_real(&self, i: usize, k: usize, l: usize) -> f64 {
        if i == k {
            return 0.0;
        }
        debug_assert_ne!(self.row_class[i], self.row_class[k]);
        let (sorted, skew_nonneg) = match &self.tables[l] {
            ColumnTable::Real { sorted, skew_nonneg } => (sorted, skew_nonneg),
            _ => unreachable!(),
        };
        let (ci, ck) = (self.row_class[i], self.row_class[k]);
        let lambda = sorted[ci].len() + sorted[ck].len();
        if lambda == 0 {
            return 0.0;
        }
        let vi = self.data.cell(i, l).as_f64().expect("observed real cell");
        let vk = self.data.cell(k, l).as_f64().expect("observed real cell");
        let beta = Self::side_count(&sorted[ci], skew_nonneg[ci], vi);
        let delta = match self.mode {
            CrossRealSets::Paper => Self::side_count(&sorted[ci], skew_nonneg[ci], vk),
            CrossRealSets::Symmetric => Self::side_count(&sorted[ck], skew_nonneg[ck], vk),
        };
        (beta.min(delta) as f64) / lambda as f64
    }

    /// Index of column `l` for the unordered pair `{i, k}`; 0 when either
    /// cell is missing (no evidence) and when `i == k`. The pair is oriented
    /// by row index before dispatch: the cross-class real case reads its
    /// counting sets from the first record's class, so a fixed orientation
    /// is what makes the matrix exactly symmetric.
    pub fn column_index(&self, i: usize, k: usize, l: usize) -> f64 {
        if i == k {
            return 0.0;
        }
        let (i, k) = if i < k { (i, k) } else { (k, i) };
        if self.data.cell(i, l).is_missing() || self.data.cell(k, l).is_missing() {
            return 0.0;
        }
        let same_class = self.row_class[i] == self.row_class[k];
        match (&self.tables[l], same_class) {
            (ColumnTable::Counting { .. }, true) => self.index_same_class_nominal(i, k, l),
            (ColumnTable::Counting { .. }, false) => self.index_cross_class_nominal(i, k, l),
            (ColumnTable::Real { .. }, true) => self.index_same_class_real(i, k, l),
            (ColumnTable::Real { .. }, false) => self.index_cross_class_real(i, k, l),
        }
    }

    /// Euclidean norm of the per-column indices.
    pub fn record_distance(&self, i: usize, k: usize) -> f64 {
        if i == k {
            return 0.0;
        }
        let mut sum = 0.0;
        for l in 0..self.data.n_features() {
            let idx = self.column_index(i, k, l);
            sum += idx * idx;
        }
        sum.sqrt()
    }

    /// Distances from row `i` to every row (self distance 0).
    pub fn row_distances(&self, i: usize) -> Vec<f64> {
        (0..self.data.n_rows())
            .map(|k| self.record_distance(i, k))
            .collect()
    }

    /// Full symmetric distance matrix. Pairs are independent, so rows are
    /// computed in parallel and assembled in index order.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let m = self.data.n_rows();
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| ((i + 1)..m).map(|k| self.record_distance(i, k)).collect())
            .collect();
        DistanceMatrix {
            m,
            tri: rows.concat(),
        }
    }
}

/// Symmetric nonnegative pairwise distances with a zero diagonal, stored as
/// the strict upper triangle in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    m: usize,
    tri: Vec<f64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        debug_assert!(i < self.m && k < self.m);
        if i == k {
            return 0.0;
        }
        let (a, b) = if i < k { (i, k) } else { (k, i) };
        // row a starts after a*(m-1) - a*(a-1)/2 strict-upper entries
        let offset = a * (self.m - 1) - a * (a.saturating_sub(1)) / 2;
        self.tri[offset + b - a - 1]
    }

    /// Distances from row `i` to every row, in row order.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.m).map(|k| self.get(i, k)).collect()
    }

    /// Debug dump: one `row,col,distance` line per unordered pair `i <= k`,
    /// distances with 12 significant digits.
    pub fn write_debug_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        writeln!(out, "row,col,distance")?;
        for i in 0..self.m {
            for k in i..self.m {
                writeln!(out, "{},{},{:.11e}", i, k, self.get(i, k))?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

//! Missing-value imputation over the proximity matrix.
//!
//! Neighbors of a record are the rows whose distance scores at or below the
//! median on a median-absolute-deviation scale (`alpha <= 0`). Categorical
//! and integer cells take the neighborhood mode; real cells take an
//! inverse-distance weighted mean. A classic k-nearest-neighbor imputer over
//! the same distance matrix is included as a baseline.

use rayon::prelude::*;

use crate::dataset::{AttributeKind, Cell, Dataset};
use crate::error::{Error, Result};
use crate::proximity::{CrossRealSets, DistanceMatrix, IndexContext};

/// Rows selected as imputation donors for one target record.
#[derive(Debug, Clone)]
pub struct NeighborSet {
    pub target: usize,
    /// Selected rows in ascending index order; never contains `target`.
    pub rows: Vec<usize>,
    /// Distances aligned with `rows`.
    pub distances: Vec<f64>,
}

/// Which imputer produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImputeMethod {
    Praa,
    Knni,
}

impl ImputeMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ImputeMethod::Praa => "praa",
            ImputeMethod::Knni => "knni",
        }
    }
}

/// One filled cell: where, what, and from how many donors.
#[derive(Debug, Clone)]
pub struct CellAudit {
    pub row: usize,
    pub column: usize,
    pub value: Cell,
    /// Donors that contributed the value; 0 when the global column fallback
    /// was used because no neighbor had the column observed.
    pub neighbors: usize,
    pub fallback: bool,
}

/// Summary of an imputation pass.
#[derive(Debug, Clone)]
pub struct ImputationReport {
    pub method: ImputeMethod,
    /// Cells filled per column (indexed like the schema).
    pub filled_per_column: Vec<usize>,
    /// One entry per filled cell, ordered by (row, column).
    pub audit: Vec<CellAudit>,
}

impl ImputationReport {
    fn new(method: ImputeMethod, n_columns: usize) -> Self {
        ImputationReport {
            method,
            filled_per_column: vec![0; n_columns],
            audit: Vec::new(),
        }
    }

    pub fn total_filled(&self) -> usize {
        self.filled_per_column.iter().sum()
    }

    /// Plain-text audit: one line per filled cell.
    pub fn render(&self, data: &Dataset) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "method={} filled={}\n",
            self.method.as_str(),
            self.total_filled()
        ));
        for a in &self.audit {
            let col = &data.schema()[a.column].name;
            out.push_str(&format!(
                "row={} column={} method={} value={} neighbors={}{}\n",
                a.row,
                col,
                self.method.as_str(),
                a.value.render("?"),
                a.neighbors,
                if a.fallback { " fallback=column" } else { "" }
            ));
        }
        out
    }
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    median_of_sorted(&sorted)
}

fn alpha_with(x_k: f64, med: f64, mad: f64) -> f64 {
    if mad <= 0.0 {
        // Degenerate spread: keep everything at or below the median.
        if x_k <= med {
            0.0
        } else {
            1.0
        }
    } else {
        (x_k - med) / mad
    }
}

/// Deviation of one distance from the median of all distances, in MAD units.
/// Nonpositive scores mark a record as closer than the typical record. A
/// zero MAD degenerates to 0 for values at or below the median, +1 above.
pub fn alpha_score(x_k: f64, distances: &[f64]) -> f64 {
    let med = median(distances);
    let deviations: Vec<f64> = distances.iter().map(|x| (x - med).abs()).collect();
    alpha_with(x_k, med, median(&deviations))
}

/// All rows `k != i` with `alpha(d_ik) <= 0`. Falls back to the single
/// nearest row if the rule selects nothing.
pub fn select_neighbors(matrix: &DistanceMatrix, i: usize) -> NeighborSet {
    let m = matrix.size();
    debug_assert!(m >= 2, "neighbor selection needs at least 2 records");
    let mut rows = Vec::with_capacity(m - 1);
    let mut dists = Vec::with_capacity(m - 1);
    for k in 0..m {
        if k != i {
            rows.push(k);
            dists.push(matrix.get(i, k));
        }
    }
    let med = median(&dists);
    let deviations: Vec<f64> = dists.iter().map(|x| (x - med).abs()).collect();
    let mad = median(&deviations);

    let mut sel_rows = Vec::new();
    let mut sel_dists = Vec::new();
    for (&k, &d) in rows.iter().zip(&dists) {
        if alpha_with(d, med, mad) <= 0.0 {
            sel_rows.push(k);
            sel_dists.push(d);
        }
    }
    if sel_rows.is_empty() {
        // Unreachable when MAD > 0 (the minimum always qualifies), kept for
        // totality: take the single nearest row.
        let (pos, _) = rows
            .iter()
            .zip(&dists)
            .enumerate()
            .min_by(|(_, (_, a)), (_, (_, b))| a.partial_cmp(b).unwrap())
            .map(|(pos, _)| (pos, ()))
            .unwrap();
        sel_rows.push(rows[pos]);
        sel_dists.push(dists[pos]);
    }
    NeighborSet {
        target: i,
        rows: sel_rows,
        distances: sel_dists,
    }
}

/// Outcome of filling a single cell.
#[derive(Debug, Clone)]
pub struct ImputedCell {
    pub value: Cell,
    pub neighbors: usize,
    pub fallback: bool,
}

/// Mode over donor values; ties go to the donor value held at the smallest
/// distance, then the lowest row index.
fn mode_pick<T: Ord + Clone>(items: &[(T, f64, usize)]) -> T {
    debug_assert!(!items.is_empty());
    let mut per_value: Vec<(T, usize, (f64, usize))> = Vec::new();
    for (v, d, row) in items {
        match per_value.iter_mut().find(|(pv, _, _)| pv == v) {
            Some((_, count, best)) => {
                *count += 1;
                if (*d, *row) < *best {
                    *best = (*d, *row);
                }
            }
            None => per_value.push((v.clone(), 1, (*d, *row))),
        }
    }
    per_value
        .into_iter()
        .max_by(|(_, ca, ba), (_, cb, bb)| {
            ca.cmp(cb)
                .then_with(|| bb.partial_cmp(ba).unwrap()) // smaller (d, row) wins
        })
        .map(|(v, _, _)| v)
        .unwrap()
}

fn global_column_fill(data: &Dataset, l: usize) -> Option<Cell> {
    match data.schema()[l].kind {
        AttributeKind::Real => {
            let values: Vec<f64> = data
                .rows()
                .iter()
                .filter_map(|r| r[l].as_f64())
                .collect();
            if values.is_empty() {
                None
            } else {
                Some(Cell::Real(median(&values)))
            }
        }
        AttributeKind::Integer => {
            let items: Vec<(i64, f64, usize)> = data
                .rows()
                .iter()
                .enumerate()
                .filter_map(|(row, r)| match r[l] {
                    Cell::Integer(v) => Some((v, 0.0, row)),
                    _ => None,
                })
                .collect();
            if items.is_empty() {
                None
            } else {
                Some(Cell::Integer(mode_pick(&items)))
            }
        }
        AttributeKind::Categorical => {
            let items: Vec<(String, f64, usize)> = data
                .rows()
                .iter()
                .enumerate()
                .filter_map(|(row, r)| match &r[l] {
                    Cell::Categorical(s) => Some((s.clone(), 0.0, row)),
                    _ => None,
                })
                .collect();
            if items.is_empty() {
                None
            } else {
                Some(Cell::Categorical(mode_pick(&items)))
            }
        }
        AttributeKind::Decision => None,
    }
}

/// Fill one missing cell from a neighbor set. Categorical and integer cells
/// take the donor mode; real cells take an inverse-distance weighted mean
/// with weights renormalized over donors that observe the column. A donor at
/// distance zero is indistinguishable from the target and its value is
/// copied outright. With no observing donor the fill widens to the global
/// column mode (categorical/integer) or median (real).
pub fn impute_cell(
    data: &Dataset,
    neighbors: &NeighborSet,
    i: usize,
    l: usize,
) -> Result<ImputedCell> {
    debug_assert!(data.cell(i, l).is_missing());
    let kind = data.schema()[l].kind;
    let observed: Vec<(usize, f64)> = neighbors
        .rows
        .iter()
        .zip(&neighbors.distances)
        .filter(|(&row, _)| !data.cell(row, l).is_missing())
        .map(|(&row, &d)| (row, d))
        .collect();

    if observed.is_empty() {
        let value = global_column_fill(data, l).ok_or_else(|| {
            Error::Data(format!(
                "column {:?} has no observed values to impute from",
                data.schema()[l].name
            ))
        })?;
        return Ok(ImputedCell {
            value,
            neighbors: 0,
            fallback: true,
        });
    }

    let value = match kind {
        AttributeKind::Integer => {
            let items: Vec<(i64, f64, usize)> = observed
                .iter()
                .map(|&(row, d)| match data.cell(row, l) {
                    Cell::Integer(v) => (*v, d, row),
                    _ => unreachable!(),
                })
                .collect();
            Cell::Integer(mode_pick(&items))
        }
        AttributeKind::Categorical => {
            let items: Vec<(String, f64, usize)> = observed
                .iter()
                .map(|&(row, d)| match data.cell(row, l) {
                    Cell::Categorical(s) => (s.clone(), d, row),
                    _ => unreachable!(),
                })
                .collect();
            Cell::Categorical(mode_pick(&items))
        }
        AttributeKind::Real => {
            // A zero-distance donor short-circuits the weighting.
            if let Some(&(row, _)) = observed.iter().find(|(_, d)| *d == 0.0) {
                data.cell(row, l).clone()
            } else {
                let betas: Vec<f64> = observed.iter().map(|(_, d)| 1.0 / d).collect();
                let total: f64 = betas.iter().sum();
                let mut value = 0.0;
                for (&(row, _), beta) in observed.iter().zip(&betas) {
                    value += data.cell(row, l).as_f64().unwrap() * beta / total;
                }
                Cell::Real(value)
            }
        }
        AttributeKind::Decision => unreachable!("decision cells are never missing"),
    };
    Ok(ImputedCell {
        value,
        neighbors: observed.len(),
        fallback: false,
    })
}

fn fill_rows<F>(data: &Dataset, method: ImputeMethod, fill: F) -> Result<(Dataset, ImputationReport)>
where
    F: Fn(usize, usize) -> Result<ImputedCell> + Sync,
{
    let mut out = data.clone();
    let mut report = ImputationReport::new(method, data.n_columns());
    if data.missing_count() == 0 {
        return Ok((out, report));
    }

    let missing_rows: Vec<usize> = (0..data.n_rows())
        .filter(|&i| data.row(i).iter().any(Cell::is_missing))
        .collect();
    // Rows are independent given the fixed matrix; results merge in
    // (row, column) order regardless of completion order.
    let per_row: Vec<Result<Vec<CellAudit>>> = missing_rows
        .par_iter()
        .map(|&i| {
            let mut audits = Vec::new();
            for l in 0..data.n_features() {
                if data.cell(i, l).is_missing() {
                    let cell = fill(i, l)?;
                    audits.push(CellAudit {
                        row: i,
                        column: l,
                        value: cell.value,
                        neighbors: cell.neighbors,
                        fallback: cell.fallback,
                    });
                }
            }
            Ok(audits)
        })
        .collect();

    for audits in per_row {
        for a in audits? {
            report.filled_per_column[a.column] += 1;
            out.set_cell(a.row, a.column, a.value.clone());
            report.audit.push(a);
        }
    }
    Ok((out, report))
}

/// Fill every missing cell using MAD-thresholded nearest neighbors over the
/// proximity matrix. The matrix is computed once on the dataset as-is and
/// all fills read the original observed values, so the pass is
/// order-independent and deterministic.
pub fn impute_dataset(data: &Dataset) -> Result<(Dataset, ImputationReport)> {
    if data.missing_count() == 0 {
        return Ok((
            data.clone(),
            ImputationReport::new(ImputeMethod::Praa, data.n_columns()),
        ));
    }
    let ctx = IndexContext::new(data, CrossRealSets::Paper)?;
    let matrix = ctx.distance_matrix();
    let neighbor_cache: Vec<Option<NeighborSet>> = (0..data.n_rows())
        .into_par_iter()
        .map(|i| {
            if data.row(i).iter().any(Cell::is_missing) {
                Some(select_neighbors(&matrix, i))
            } else {
                None
            }
        })
        .collect();
    fill_rows(data, ImputeMethod::Praa, |i, l| {
        impute_cell(data, neighbor_cache[i].as_ref().unwrap(), i, l)
    })
}

/// Classic k-nearest-neighbor imputation over the same distance matrix:
/// mode (categorical/integer) or unweighted mean (real) of the k nearest
/// donors that observe the column, ties broken by row index.
pub fn knni_impute(data: &Dataset, k: usize) -> Result<(Dataset, ImputationReport)> {
    if k < 1 || k >= data.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "knni neighbor count must satisfy 1 <= k < {}, got {k}",
            data.n_rows()
        )));
    }
    if data.missing_count() == 0 {
        return Ok((
            data.clone(),
            ImputationReport::new(ImputeMethod::Knni, data.n_columns()),
        ));
    }
    let ctx = IndexContext::new(data, CrossRealSets::Paper)?;
    let matrix = ctx.distance_matrix();
    let order_cache: Vec<Option<Vec<(usize, f64)>>> = (0..data.n_rows())
        .into_par_iter()
        .map(|i| {
            if data.row(i).iter().any(Cell::is_missing) {
                let mut order: Vec<(usize, f64)> = (0..data.n_rows())
                    .filter(|&r| r != i)
                    .map(|r| (r, matrix.get(i, r)))
                    .collect();
                order.sort_by(|(ra, da), (rb, db)| {
                    da.partial_cmp(db).unwrap().then_with(|| ra.cmp(rb))
                });
                Some(order)
            } else {
                None
            }
        })
        .collect();

    fill_rows(data, ImputeMethod::Knni, |i, l| {
        let order = order_cache[i].as_ref().unwrap();
        let donors: Vec<(usize, f64)> = order
            .iter()
            .filter(|(row, _)| !data.cell(*row, l).is_missing())
            .take(k)
            .copied()
            .collect();
        if donors.is_empty() {
            let value = global_column_fill(data, l).ok_or_else(|| {
                Error::Data(format!(
                    "column {:?} has no observed values to impute from",
                    data.schema()[l].name
                ))
            })?;
            return Ok(ImputedCell {
                value,
                neighbors: 0,
                fallback: true,
            });
        }
        let value = match data.schema()[l].kind {
            AttributeKind::Real => {
                let sum: f64 = donors
                    .iter()
                    .map(|&(row, _)| data.cell(row, l).as_f64().unwrap())
                    .sum();
                Cell::Real(sum / donors.len() as f64)
            }
            AttributeKind::Integer => {
                let items: Vec<(i64, f64, usize)> = donors
                    .iter()
                    .map(|&(row, d)| match data.cell(row, l) {
                        Cell::Integer(v) => (*v, d, row),
                        _ => unreachable!(),
                    })
                    .collect();
                Cell::Integer(mode_pick(&items))
            }
            AttributeKind::Categorical => {
                let items: Vec<(String, f64, usize)> = donors
                    .iter()
                    .map(|&(row, d)| match data.cell(row, l) {
                        Cell::Categorical(s) => (s.clone(), d, row),
                        _ => unreachable!(),
                    })
                    .collect();
                Cell::Categorical(mode_pick(&items))
            }
            AttributeKind::Decision => unreachable!(),
        };
        Ok(ImputedCell {
            value,
            neighbors: donors.len(),
            fallback: false,
        })
    })
}

//! Typed tabular data with explicit missing cells.
//!
//! A dataset is `m` records over `n` columns. The last column is always the
//! binary decision (class label); the remaining `n-1` columns are features of
//! kind `categorical`, `integer` or `real`. Missing feature cells are first
//! class values, never silently coerced.
//!
//! Schema files declare one column per line:
//!
//! ```text
//! # name kind [missing-marker]
//! age integer
//! sex categorical
//! chol real NA
//! chd decision
//! ```
//!
//! `kind` is one of `categorical`, `integer`, `real`, `decision`. The
//! optional third token overrides the default missing marker `?`. Data files
//! are RFC-4180 CSV without a header row unless the caller says otherwise.

mod synth;

pub use synth::generate_synthetic;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_MISSING_MARKER: &str = "?";

/// Declared type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Categorical,
    Integer,
    Real,
    Decision,
}

impl AttributeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttributeKind::Categorical => "categorical",
            AttributeKind::Integer => "integer",
            AttributeKind::Real => "real",
            AttributeKind::Decision => "decision",
        }
    }

    fn parse(word: &str) -> Option<AttributeKind> {
        match word {
            "categorical" => Some(AttributeKind::Categorical),
            "integer" => Some(AttributeKind::Integer),
            "real" => Some(AttributeKind::Real),
            "decision" => Some(AttributeKind::Decision),
            _ => None,
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-column declaration: name, kind and the text that marks a missing cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    pub missing_marker: String,
}

impl AttributeSchema {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        AttributeSchema {
            name: name.into(),
            kind,
            missing_marker: DEFAULT_MISSING_MARKER.to_string(),
        }
    }
}

/// One table cell. `Missing` is only legal in feature columns.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Missing,
    Categorical(String),
    Integer(i64),
    Real(f64),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// Numeric view used by threshold tests and weighted averages.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Integer(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            _ => None,
        }
    }

    /// Text rendered into CSV output; `marker` stands in for missing cells.
    pub fn render(&self, marker: &str) -> String {
        match self {
            Cell::Missing => marker.to_string(),
            Cell::Categorical(s) => s.clone(),
            Cell::Integer(v) => v.to_string(),
            Cell::Real(v) => format!("{v}"),
        }
    }

    fn matches_kind(&self, kind: AttributeKind) -> bool {
        match (self, kind) {
            (Cell::Missing, _) => true,
            (Cell::Categorical(_), AttributeKind::Categorical) => true,
            (Cell::Categorical(_), AttributeKind::Decision) => true,
            (Cell::Integer(_), AttributeKind::Integer) => true,
            (Cell::Real(_), AttributeKind::Real) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(DEFAULT_MISSING_MARKER))
    }
}

/// Immutable typed table. Constructed once, shared freely afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<AttributeSchema>,
    rows: Vec<Vec<Cell>>,
}

/// Validate schema-level invariants: nonempty unique names, exactly one
/// decision column, decision last.
pub fn validate_schema(schema: &[AttributeSchema]) -> Result<()> {
    if schema.is_empty() {
        return Err(Error::Schema("schema has no columns".into()));
    }
    let mut seen = BTreeMap::new();
    for (i, col) in schema.iter().enumerate() {
        if col.name.is_empty() {
            return Err(Error::Schema(format!("column {} has an empty name", i + 1)));
        }
        if let Some(prev) = seen.insert(col.name.clone(), i) {
            return Err(Error::Schema(format!(
                "duplicate column name {:?} (columns {} and {})",
                col.name,
                prev + 1,
                i + 1
            )));
        }
    }
    let decisions = schema
        .iter()
        .filter(|c| c.kind == AttributeKind::Decision)
        .count();
    if decisions == 0 {
        return Err(Error::Schema("no decision column declared".into()));
    }
    if decisions > 1 {
        return Err(Error::Schema("multiple decision columns declared".into()));
    }
    if schema.last().unwrap().kind != AttributeKind::Decision {
        return Err(Error::Schema("decision column must be the last column".into()));
    }
    Ok(())
}

/// Load a schema file. One declaration per line, `#` starts a comment.
pub fn load_schema(path: impl AsRef<Path>) -> Result<Vec<AttributeSchema>> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_schema(&text)
}

pub fn parse_schema(text: &str) -> Result<Vec<AttributeSchema>> {
    let mut schema = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let name = tokens.next().unwrap().to_string();
        let kind_word = tokens.next().ok_or_else(|| {
            Error::Schema(format!("line {}: expected `name kind`", lineno + 1))
        })?;
        let kind = AttributeKind::parse(kind_word).ok_or_else(|| {
            Error::Schema(format!(
                "line {}: unknown kind {:?}; allowed kinds are categorical, integer, real, decision",
                lineno + 1,
                kind_word
            ))
        })?;
        let marker = tokens
            .next()
            .map(str::to_string)
            .unwrap_or_else(|| DEFAULT_MISSING_MARKER.to_string());
        if let Some(extra) = tokens.next() {
            return Err(Error::Schema(format!(
                "line {}: unexpected token {:?}",
                lineno + 1,
                extra
            )));
        }
        schema.push(AttributeSchema {
            name,
            kind,
            missing_marker: marker,
        });
    }
    validate_schema(&schema)?;
    Ok(schema)
}

/// Write a schema back out in the same line format `load_schema` reads.
pub fn write_schema(schema: &[AttributeSchema], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for col in schema {
        if col.missing_marker == DEFAULT_MISSING_MARKER {
            out.push_str(&format!("{} {}\n", col.name, col.kind));
        } else {
            out.push_str(&format!("{} {} {}\n", col.name, col.kind, col.missing_marker));
        }
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

fn parse_cell(field: &str, col: &AttributeSchema, row: usize) -> Result<Cell> {
    if field == col.missing_marker {
        return Ok(Cell::Missing);
    }
    match col.kind {
        AttributeKind::Categorical | AttributeKind::Decision => {
            Ok(Cell::Categorical(field.to_string()))
        }
        AttributeKind::Integer => field.parse::<i64>().map(Cell::Integer).map_err(|_| {
            Error::Data(format!(
                "row {}: column {:?} expects an integer, got {:?}",
                row, col.name, field
            ))
        }),
        AttributeKind::Real => {
            let v: f64 = field.parse().map_err(|_| {
                Error::Data(format!(
                    "row {}: column {:?} expects a real number, got {:?}",
                    row, col.name, field
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "row {}: column {:?} holds a non-finite value {:?}",
                    row, col.name, field
                )));
            }
            Ok(Cell::Real(v))
        }
    }
}

impl Dataset {
    /// Build a dataset from already-typed cells. Checks cell typing and that
    /// the decision column is fully observed, but not the load-time
    /// invariants (`m >= 2`, exactly two class labels) so edge-case tables
    /// remain constructible in tests and tools.
    pub fn new(schema: Vec<AttributeSchema>, rows: Vec<Vec<Cell>>) -> Result<Dataset> {
        validate_schema(&schema)?;
        let n = schema.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Data(format!(
                    "row {}: expected {} fields, got {}",
                    i + 1,
                    n,
                    row.len()
                )));
            }
            for (cell, col) in row.iter().zip(&schema) {
                if !cell.matches_kind(col.kind) {
                    return Err(Error::Data(format!(
                        "row {}: cell {:?} does not match column {:?} of kind {}",
                        i + 1,
                        cell,
                        col.name,
                        col.kind
                    )));
                }
            }
            if row[n - 1].is_missing() {
                return Err(Error::Data(format!(
                    "row {}: decision column must not be missing",
                    i + 1
                )));
            }
        }
        Ok(Dataset { schema, rows })
    }

    /// Load a CSV data file against a schema. Enforces the full dataset
    /// invariants: typed cells, fully observed two-label decision column and
    /// at least two records.
    pub fn load_csv(
        path: impl AsRef<Path>,
        schema: &[AttributeSchema],
        has_header: bool,
    ) -> Result<Dataset> {
        let file = fs::File::open(path.as_ref())?;
        Dataset::from_csv_reader(file, schema, has_header)
    }

    pub fn from_csv_reader(
        reader: impl std::io::Read,
        schema: &[AttributeSchema],
        has_header: bool,
    ) -> Result<Dataset> {
        validate_schema(schema)?;
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .flexible(true)
            .from_reader(reader);
        let n = schema.len();
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let rowno = i + 1;
            if record.len() != n {
                return Err(Error::Data(format!(
                    "row {}: expected {} fields, got {}",
                    rowno,
                    n,
                    record.len()
                )));
            }
            let mut row = Vec::with_capacity(n);
            for (field, col) in record.iter().zip(schema) {
                row.push(parse_cell(field, col, rowno)?);
            }
            if row[n - 1].is_missing() {
                return Err(Error::Data(format!(
                    "row {}: decision column must not be missing",
                    rowno
                )));
            }
            rows.push(row);
        }
        if rows.len() < 2 {
            return Err(Error::Data(format!(
                "need at least 2 records, got {}",
                rows.len()
            )));
        }
        let ds = Dataset {
            schema: schema.to_vec(),
            rows,
        };
        let labels = ds.class_labels();
        if labels.len() != 2 {
            return Err(Error::Data(format!(
                "decision column must hold exactly two distinct labels, found {}: {:?}",
                labels.len(),
                labels
            )));
        }
        Ok(ds)
    }

    /// Write the dataset as CSV, rendering missing cells with each column's
    /// marker. Reals print in shortest round-trip form.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path.as_ref())?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .zip(&self.schema)
                .map(|(cell, col)| cell.render(&col.missing_marker))
                .collect();
            wtr.write_record(&fields)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Cell] {
        &self.rows[i]
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.rows[row][col]
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.schema.len()
    }

    /// Number of feature columns (everything but the decision).
    pub fn n_features(&self) -> usize {
        self.schema.len() - 1
    }

    pub fn decision_index(&self) -> usize {
        self.schema.len() - 1
    }

    pub fn decision_label(&self, row: usize) -> &str {
        match &self.rows[row][self.decision_index()] {
            Cell::Categorical(s) => s,
            _ => unreachable!("decision cells are validated at construction"),
        }
    }

    /// Feature cells of a row (decision excluded).
    pub fn feature_row(&self, i: usize) -> &[Cell] {
        &self.rows[i][..self.decision_index()]
    }

    /// Distinct decision labels in first-appearance order.
    pub fn class_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for i in 0..self.n_rows() {
            let l = self.decision_label(i);
            if !labels.iter().any(|x| x == l) {
                labels.push(l.to_string());
            }
        }
        labels
    }

    pub fn missing_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.iter().filter(|c| c.is_missing()).count())
            .sum()
    }

    /// New dataset keeping only the features with a set mask bit (decision
    /// column always kept). Mask length must equal `n_features`.
    pub fn project(&self, mask: &[bool]) -> Result<Dataset> {
        if mask.len() != self.n_features() {
            return Err(Error::InvalidArgument(format!(
                "mask length {} does not match feature count {}",
                mask.len(),
                self.n_features()
            )));
        }
        let mut schema: Vec<AttributeSchema> = self
            .schema
            .iter()
            .take(self.n_features())
            .zip(mask)
            .filter(|(_, keep)| **keep)
            .map(|(c, _)| c.clone())
            .collect();
        schema.push(self.schema[self.decision_index()].clone());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out: Vec<Cell> = row
                    .iter()
                    .take(self.n_features())
                    .zip(mask)
                    .filter(|(_, keep)| **keep)
                    .map(|(c, _)| c.clone())
                    .collect();
                out.push(row[self.decision_index()].clone());
                out
            })
            .collect();
        Ok(Dataset { schema, rows })
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Replace one cell; used by the imputers when filling missing values.
    pub(crate) fn set_cell(&mut self, row: usize, col: usize, value: Cell) {
        debug_assert!(value.matches_kind(self.schema[col].kind));
        self.rows[row][col] = value;
    }
}

/// Population skewness: third central moment over the cubed population
/// standard deviation (divisor `m`, not `m - 1`). A constant or empty list
/// yields 0 — no spread means no asymmetry, and downstream set construction
/// then takes the `sk >= 0` branch.
pub fn skewness(values: &[f64]) -> f64 {
    let m = values.len();
    if m == 0 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= m as f64;
    m3 /= m as f64;
    if m2 <= 0.0 {
        return 0.0;
    }
    m3 / m2.sqrt().powi(3)
}

/// Summary of one column over its non-missing cells.
#[derive(Debug, Clone)]
pub struct ColumnStats {
    pub column: usize,
    /// Population skewness; 0.0 for categorical columns.
    pub skewness: f64,
    /// Mean of numeric values; 0.0 for categorical columns.
    pub mean: f64,
    /// Value counts for categorical/integer/decision columns, keyed by the
    /// rendered label. Empty for real columns.
    pub cardinality: BTreeMap<String, usize>,
}

/// Per-column stats over non-missing cells.
pub fn column_stats(ds: &Dataset) -> Vec<ColumnStats> {
    (0..ds.n_columns())
        .map(|l| {
            let kind = ds.schema()[l].kind;
            let mut cardinality = BTreeMap::new();
            let mut numeric = Vec::new();
            for row in ds.rows() {
                match &row[l] {
                    Cell::Missing => {}
                    Cell::Categorical(s) => {
                        *cardinality.entry(s.clone()).or_insert(0) += 1;
                    }
                    Cell::Integer(v) => {
                        *cardinality.entry(v.to_string()).or_insert(0) += 1;
                        numeric.push(*v as f64);
                    }
                    Cell::Real(v) => numeric.push(*v),
                }
            }
            if kind == AttributeKind::Real || kind == AttributeKind::Integer {
                let mean = if numeric.is_empty() {
                    0.0
                } else {
                    numeric.iter().sum::<f64>() / numeric.len() as f64
                };
                ColumnStats {
                    column: l,
                    skewness: skewness(&numeric),
                    mean,
                    cardinality,
                }
            } else {
                ColumnStats {
                    column: l,
                    skewness: 0.0,
                    mean: 0.0,
                    cardinality,
                }
            }
        })
        .collect()
}

//! Loaders for the UCI Iris and original Wisconsin breast-cancer files,
//! plus seeded (optionally stratified) train/test splitting.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    WrongArity { expected: usize, found: usize },
    BadNumber(String),
    BadLabel(String),
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "file contains no data rows"),
            ParseErrorKind::WrongArity { expected, found } => {
                write!(f, "expected {expected} fields, found {found}")
            }
            ParseErrorKind::BadNumber(s) => write!(f, "not a number: `{s}`"),
            ParseErrorKind::BadLabel(s) => write!(f, "unexpected class label `{s}`"),
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// `row` is 1-based; 0 means the file as a whole.
    #[error("parse error at row {row}: {kind}")]
    Parse { row: usize, kind: ParseErrorKind },
    #[error("class {class} has no training samples")]
    DegenerateSplit { class: usize },
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
}

impl DataError {
    pub fn row(&self) -> Option<usize> {
        match self {
            DataError::Parse { row, .. } => Some(*row),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    /// One row per sample.
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    /// (min, max) of each raw feature column before scaling.
    pub feature_ranges: Vec<(f64, f64)>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_ranges.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &l in &self.labels {
            c[l] += 1;
        }
        c
    }

    fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: rows.iter().map(|&i| self.features[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            feature_ranges: self.feature_ranges.clone(),
        }
    }
}

/// Non-blank lines of a comma-separated file, with their 1-based row
/// numbers.
fn records(text: &str) -> Result<Vec<(usize, Vec<String>)>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| DataError::Parse { row, kind: ParseErrorKind::BadNumber(e.to_string()) })?;
        let fields: Vec<String> = rec.iter().map(|f| f.trim().to_string()).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = rec.position().map_or(row, |p| p.line() as usize);
        out.push((row, fields));
    }
    if out.is_empty() {
        return Err(DataError::Parse { row: 0, kind: ParseErrorKind::Empty });
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io { path: path.display().to_string(), source })
}

fn number(row: usize, s: &str) -> Result<f64, DataError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DataError::Parse { row, kind: ParseErrorKind::BadNumber(s.to_string()) })
}

pub fn load_iris(path: &Path) -> Result<Dataset, DataError> {
    parse_iris(&read(path)?)
}

/// Four numeric columns then a class name. Classes are numbered by first
/// appearance; features are min-max scaled to [0, 1] per column.
pub fn parse_iris(text: &str) -> Result<Dataset, DataError> {
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row, fields) in records(text)? {
        if fields.len() != 5 {
            return Err(DataError::Parse {
                row,
                kind: ParseErrorKind::WrongArity { expected: 5, found: fields.len() },
            });
        }
        let x = fields[..4]
            .iter()
            .map(|f| number(row, f))
            .collect::<Result<Vec<_>, _>>()?;
        let name = &fields[4];
        if name.is_empty() || name.parse::<f64>().is_ok() {
            return Err(DataError::Parse { row, kind: ParseErrorKind::BadLabel(name.clone()) });
        }
        let next = names.len();
        let label = *names.entry(name.clone()).or_insert(next);
        features.push(x);
        labels.push(label);
    }
    let n_classes = names.len();
    let feature_ranges = min_max_normalize(&mut features);
    Ok(Dataset { features, labels, n_classes, feature_ranges })
}

/// Scales each column to [0, 1] in place and returns the raw ranges.
/// Constant columns map to 0.
pub fn min_max_normalize(rows: &mut [Vec<f64>]) -> Vec<(f64, f64)> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); width];
    for r in rows.iter() {
        for (j, &v) in r.iter().enumerate() {
            ranges[j].0 = ranges[j].0.min(v);
            ranges[j].1 = ranges[j].1.max(v);
        }
    }
    for r in rows.iter_mut() {
        for (j, v) in r.iter_mut().enumerate() {
            let (lo, hi) = ranges[j];
            *v = if hi > lo { (*v - lo) / (hi - lo) } else { 0.0 };
        }
    }
    ranges
}

/// Summary of what [`load_wdbc`] kept and dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WdbcStats {
    pub raw_rows: usize,
    pub dropped_incomplete: usize,
}

pub fn load_wdbc(path: &Path) -> Result<Dataset, DataError> {
    parse_wdbc(&read(path)?).map(|(d, _)| d)
}

/// Original breast-cancer layout: id, nine integer attributes in 1..=10,
/// class 2 (benign) or 4 (malignant). Rows with a `?` are dropped. Features
/// are scaled by `(v - 1) / 9`; labels are benign 0, malignant 1.
pub fn parse_wdbc(text: &str) -> Result<(Dataset, WdbcStats), DataError> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut stats = WdbcStats { raw_rows: 0, dropped_incomplete: 0 };
    for (row, fields) in records(text)? {
        stats.raw_rows += 1;
        if fields.len() != 11 {
            return Err(DataError::Parse {
                row,
                kind: ParseErrorKind::WrongArity { expected: 11, found: fields.len() },
            });
        }
        if fields[1..10].iter().any(|f| f == "?") {
            stats.dropped_incomplete += 1;
            continue;
        }
        let mut x = Vec::with_capacity(9);
        for f in &fields[1..10] {
            let v = number(row, f)?;
            if !(1.0..=10.0).contains(&v) {
                return Err(DataError::Parse { row, kind: ParseErrorKind::BadNumber(f.clone()) });
            }
            x.push((v - 1.0) / 9.0);
        }
        let label = match fields[10].as_str() {
            "2" => 0,
            "4" => 1,
            other => return Err(DataError::Parse { row, kind: ParseErrorKind::BadLabel(other.to_string()) }),
        };
        features.push(x);
        labels.push(label);
    }
    let feature_ranges = vec![(1.0, 10.0); 9];
    Ok((Dataset { features, labels, n_classes: 2, feature_ranges }, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train_fraction: 0.75, seed: 0, stratified: true }
    }
}

/// Seeded shuffle split. With `stratified`, each class contributes
/// `round(fraction * class size)` samples to train. Both halves keep the
/// original sample order.
pub fn split(d: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), DataError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(DataError::BadFraction(spec.train_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_train = vec![false; d.len()];
    let groups: Vec<Vec<usize>> = if spec.stratified {
        (0..d.n_classes)
            .map(|c| (0..d.len()).filter(|&i| d.labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..d.len()).collect()]
    };
    for mut group in groups {
        group.shuffle(&mut rng);
        let take = (spec.train_fraction * group.len() as f64).round() as usize;
        for &i in &group[..take] {
            in_train[i] = true;
        }
    }
    let train_rows: Vec<usize> = (0..d.len()).filter(|&i| in_train[i]).collect();
    let test_rows: Vec<usize> = (0..d.len()).filter(|&i| !in_train[i]).collect();
    let train = d.subset(&train_rows);
    if let Some(class) = train.class_counts().iter().position(|&c| c == 0) {
        return Err(DataError::DegenerateSplit { class });
    }
    Ok((train, d.subset(&test_rows)))
}

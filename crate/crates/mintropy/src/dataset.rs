//! Discrete tabular datasets: loading, validation, discretization, generation.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One categorical column. Values are dense codes in `0..cardinality`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub values: Vec<u32>,
    pub cardinality: u32,
}

/// Discretization rule for numeric CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinMethod {
    EqualWidth,
    EqualFrequency,
}

#[derive(Debug, Clone, Copy)]
pub struct BinningSpec {
    pub method: BinMethod,
    pub bins: usize,
}

impl BinningSpec {
    pub fn new(method: BinMethod, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidBinning(format!("bins must be >= 2, got {bins}")));
        }
        Ok(Self { method, bins })
    }
}

/// A column-oriented table of categorical features plus a class label per row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<FeatureColumn>,
    pub labels: Vec<u32>,
    pub class_names: Vec<String>,
    pub label_name: String,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::EmptyBody);
        }
        if self.features.is_empty() {
            return Err(Error::InvalidArgument("dataset needs at least one feature".into()));
        }
        for col in &self.features {
            if col.values.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "column {:?} has {} values, expected {}",
                    col.name,
                    col.values.len(),
                    n
                )));
            }
            if col.values.iter().any(|&v| v >= col.cardinality) {
                return Err(Error::InvalidArgument(format!(
                    "column {:?} holds a code beyond its cardinality",
                    col.name
                )));
            }
        }
        if self.labels.iter().any(|&c| c as usize >= self.class_names.len()) {
            return Err(Error::InvalidArgument("label outside class_names".into()));
        }
        Ok(())
    }

    /// Deterministic shuffled split into train and test parts.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        let n = self.n_rows();
        let n_train = (n as f64 * train_fraction).round() as usize;
        if n_train == 0 {
            return Err(Error::EmptySplit { fraction: train_fraction, side: "train", n_rows: n });
        }
        if n_train >= n {
            return Err(Error::EmptySplit { fraction: train_fraction, side: "test", n_rows: n });
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let train = self.take_rows(&order[..n_train]);
        let test = self.take_rows(&order[n_train..]);
        Ok((train, test))
    }

    /// New dataset holding the given rows, same schema and class universe.
    pub fn take_rows(&self, rows: &[usize]) -> Dataset {
        let features = self
            .features
            .iter()
            .map(|col| FeatureColumn {
                name: col.name.clone(),
                values: rows.iter().map(|&r| col.values[r]).collect(),
                cardinality: col.cardinality,
            })
            .collect();
        Dataset {
            features,
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            class_names: self.class_names.clone(),
            label_name: self.label_name.clone(),
        }
    }

    /// Serialize as CSV with header; the label column comes first.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![self.label_name.clone()];
        header.extend(self.features.iter().map(|c| c.name.clone()));
        w.write_record(&header).map_err(csv_io)?;
        for row in 0..self.n_rows() {
            let mut rec = vec![self.class_names[self.labels[row] as usize].clone()];
            for col in &self.features {
                rec.push(col.values[row].to_string());
            }
            w.write_record(&rec).map_err(csv_io)?;
        }
        w.flush().map_err(|e| Error::Io { path: "<writer>".into(), source: e })?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Format { path: "<writer>".into(), message: e.to_string() }
}

/// Load a dense CSV file with a header row.
///
/// String columns are coded in first-appearance order. Numeric columns are
/// binned when a `BinningSpec` is given, otherwise their distinct values act
/// as categories.
pub fn load_csv(path: &Path, label_column: &str, binning: Option<&BinningSpec>) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Format { path: path.into(), message: e.to_string() })?
        .iter()
        .map(str::to_owned)
        .collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::LabelColumnMissing(label_column.to_owned()))?;

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format { path: path.into(), message: e.to_string() })?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow { row: i + 2, expected: header.len(), found: record.len() });
        }
        for (j, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(Error::MissingValue { row: i + 2, column: header[j].clone() });
            }
            raw[j].push(field.to_owned());
        }
    }
    if raw[label_idx].is_empty() {
        return Err(Error::EmptyBody);
    }

    let (labels, class_names) = encode_categorical(&raw[label_idx]);
    let mut features = Vec::new();
    for (j, name) in header.iter().enumerate() {
        if j == label_idx {
            continue;
        }
        let column = &raw[j];
        let col = match binning {
            Some(spec) => match parse_numeric(column) {
                Some(numeric) => bin_numeric(name, &numeric, spec),
                None => categorical_column(name, column),
            },
            None => categorical_column(name, column),
        };
        features.push(col);
    }

    let ds = Dataset { features, labels, class_names, label_name: label_column.to_owned() };
    ds.validate()?;
    Ok(ds)
}

fn encode_categorical(values: &[String]) -> (Vec<u32>, Vec<String>) {
    let mut codes = HashMap::new();
    let mut names = Vec::new();
    let encoded = values
        .iter()
        .map(|v| {
            *codes.entry(v.clone()).or_insert_with(|| {
                names.push(v.clone());
                (names.len() - 1) as u32
            })
        })
        .collect();
    (encoded, names)
}

fn categorical_column(name: &str, values: &[String]) -> FeatureColumn {
    let (codes, names) = encode_categorical(values);
    FeatureColumn { name: name.to_owned(), values: codes, cardinality: names.len() as u32 }
}

fn parse_numeric(values: &[String]) -> Option<Vec<f64>> {
    values.iter().map(|v| v.parse::<f64>().ok()).collect()
}

fn bin_numeric(name: &str, values: &[f64], spec: &BinningSpec) -> FeatureColumn {
    let codes = match spec.method {
        BinMethod::EqualWidth => {
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let width = (max - min) / spec.bins as f64;
            values
                .iter()
                .map(|&v| {
                    if width == 0.0 {
                        0
                    } else {
                        (((v - min) / width) as usize).min(spec.bins - 1) as u32
                    }
                })
                .collect()
        }
        BinMethod::EqualFrequency => {
            // Upper-inclusive quantile boundaries; ties fall into the lower bin.
            let mut sorted = values.to_vec();
            sorted.sort_by(|a, b| a.total_cmp(b));
            let n = sorted.len();
            let thresholds: Vec<f64> = (1..spec.bins)
                .map(|k| sorted[(n * k).div_ceil(spec.bins) - 1])
                .collect();
            values
                .iter()
                .map(|&v| thresholds.iter().filter(|&&t| v > t).count() as u32)
                .collect()
        }
    };
    FeatureColumn { name: name.to_owned(), values: codes, cardinality: spec.bins as u32 }
}

/// Load label-first sparse text: `<label> <idx>:<value> ...` with 1-based,
/// strictly increasing indices. Absent indices decode to 0.
pub fn load_sparse(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    let mut rows: Vec<(String, Vec<(usize, u32)>)> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::Io { path: path.into(), source: e })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().unwrap().to_owned();
        let mut entries = Vec::new();
        let mut last_index = 0usize;
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Format {
                path: path.into(),
                message: format!("line {}: token {tok:?} is not idx:value", lineno + 1),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Format {
                path: path.into(),
                message: format!("line {}: non-numeric index {idx_s:?}", lineno + 1),
            })?;
            let val: u32 = val_s.parse().map_err(|_| Error::Format {
                path: path.into(),
                message: format!("line {}: non-numeric value {val_s:?}", lineno + 1),
            })?;
            if idx <= last_index {
                return Err(Error::Format {
                    path: path.into(),
                    message: format!("line {}: index {idx} not strictly increasing", lineno + 1),
                });
            }
            last_index = idx;
            max_index = max_index.max(idx);
            entries.push((idx, val));
        }
        rows.push((label, entries));
    }
    if rows.is_empty() {
        return Err(Error::EmptyBody);
    }
    if max_index == 0 {
        return Err(Error::InvalidArgument("sparse file declares no features".into()));
    }

    let labels_raw: Vec<String> = rows.iter().map(|(l, _)| l.clone()).collect();
    let (labels, class_names) = encode_categorical(&labels_raw);
    let mut columns: Vec<Vec<u32>> = vec![vec![0; rows.len()]; max_index];
    for (r, (_, entries)) in rows.iter().enumerate() {
        for &(idx, val) in entries {
            columns[idx - 1][r] = val;
        }
    }
    let features = columns
        .into_iter()
        .enumerate()
        .map(|(j, values)| {
            let cardinality = values.iter().copied().max().unwrap_or(0) + 1;
            FeatureColumn { name: format!("f{j}"), values, cardinality }
        })
        .collect();
    let ds = Dataset { features, labels, class_names, label_name: "class".into() };
    ds.validate()?;
    Ok(ds)
}

/// The ten-row, six-feature worked example: one class per row, `f0` splits the
/// classes 4/6, and each of `f1..f5` isolates one pair of classes.
pub fn generate_fig1_dataset() -> Dataset {
    let table: [[&str; 6]; 10] = [
        ["A", "C", "F", "I", "L", "O"],
        ["A", "D", "F", "I", "L", "O"],
        ["A", "E", "G", "I", "L", "O"],
        ["A", "E", "H", "I", "L", "O"],
        ["B", "E", "F", "J", "L", "O"],
        ["B", "E", "F", "K", "L", "O"],
        ["B", "E", "F", "I", "M", "O"],
        ["B", "E", "F", "I", "N", "O"],
        ["B", "E", "F", "I", "L", "P"],
        ["B", "E", "F", "I", "L", "Q"],
    ];
    let features = (0..6)
        .map(|j| {
            let column: Vec<String> = table.iter().map(|row| row[j].to_owned()).collect();
            categorical_column(&format!("f{j}"), &column)
        })
        .collect();
    Dataset {
        features,
        labels: (0..10).collect(),
        class_names: (0..10).map(|c| c.to_string()).collect(),
        label_name: "class".into(),
    }
}

/// Seeded random categorical dataset, used by tests and benches.
pub fn random_dataset(
    n_rows: usize,
    n_features: usize,
    n_classes: usize,
    max_cardinality: u32,
    seed: u64,
) -> Dataset {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = (0..n_features)
        .map(|j| {
            let cardinality = rng.gen_range(2..=max_cardinality);
            let values = (0..n_rows).map(|_| rng.gen_range(0..cardinality)).collect();
            FeatureColumn { name: format!("f{j}"), values, cardinality }
        })
        .collect();
    Dataset {
        features,
        labels: (0..n_rows).map(|_| rng.gen_range(0..n_classes as u32)).collect(),
        class_names: (0..n_classes).map(|c| c.to_string()).collect(),
        label_name: "class".into(),
    }
}

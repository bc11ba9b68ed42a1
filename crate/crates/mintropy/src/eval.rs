//! Downstream evaluation: classifiers over selected feature prefixes,
//! bootstrap splits, accuracy curves.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::distribution::FeatureSubset;
use crate::error::{Error, Result};
use crate::par;
use crate::selection::{greedy_select, Criterion, StopRule};

/// Classifier used to score a feature prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassifierKind {
    IdealBayes,
    NaiveBayes { laplace_alpha: f64 },
}

impl ClassifierKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::IdealBayes => "ideal-bayes",
            ClassifierKind::NaiveBayes { .. } => "naive-bayes",
        }
    }

    fn validate(&self) -> Result<()> {
        if let ClassifierKind::NaiveBayes { laplace_alpha } = self {
            if !laplace_alpha.is_finite() || *laplace_alpha <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "laplace alpha must be positive, got {laplace_alpha}"
                )));
            }
        }
        Ok(())
    }
}

fn check_schema(train: &Dataset, test: &Dataset) -> Result<()> {
    if train.n_features() != test.n_features() {
        return Err(Error::SchemaMismatch(format!(
            "{} train features vs {} test features",
            train.n_features(),
            test.n_features()
        )));
    }
    for (a, b) in train.features.iter().zip(&test.features) {
        if a.name != b.name {
            return Err(Error::SchemaMismatch(format!("column {:?} vs {:?}", a.name, b.name)));
        }
    }
    if train.class_names != test.class_names {
        return Err(Error::SchemaMismatch("class universes differ".into()));
    }
    Ok(())
}

/// Trains on `train`, predicts on `test`, returns the fraction correct.
pub fn classify(train: &Dataset, test: &Dataset, subset: &FeatureSubset, kind: ClassifierKind) -> Result<f64> {
    kind.validate()?;
    check_schema(train, test)?;
    subset.validate(train)?;
    if test.n_rows() == 0 {
        return Err(Error::EmptyTest);
    }
    let predictions = match kind {
        ClassifierKind::IdealBayes => ideal_bayes(train, test, subset),
        ClassifierKind::NaiveBayes { laplace_alpha } => naive_bayes(train, test, subset, laplace_alpha),
    };
    let correct = predictions.iter().zip(&test.labels).filter(|(p, l)| *p == *l).count();
    Ok(correct as f64 / test.n_rows() as f64)
}

fn class_prior_argmax(train: &Dataset) -> u32 {
    let mut counts = vec![0u64; train.class_count()];
    for &l in &train.labels {
        counts[l as usize] += 1;
    }
    counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0))) // ties toward the lowest index
        .map(|(c, _)| c as u32)
        .unwrap()
}

fn ideal_bayes(train: &Dataset, test: &Dataset, subset: &FeatureSubset) -> Vec<u32> {
    let mut posterior: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
    for row in 0..train.n_rows() {
        let tuple: Vec<u32> = subset.indices().iter().map(|&f| train.features[f].values[row]).collect();
        posterior.entry(tuple).or_insert_with(|| vec![0; train.class_count()])[train.labels[row] as usize] += 1;
    }
    let fallback = class_prior_argmax(train);
    (0..test.n_rows())
        .map(|row| {
            let tuple: Vec<u32> = subset.indices().iter().map(|&f| test.features[f].values[row]).collect();
            match posterior.get(&tuple) {
                Some(counts) => {
                    counts
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                        .map(|(c, _)| c as u32)
                        .unwrap()
                }
                None => fallback,
            }
        })
        .collect()
}

fn naive_bayes(train: &Dataset, test: &Dataset, subset: &FeatureSubset, alpha: f64) -> Vec<u32> {
    let k = train.class_count();
    let mut class_counts = vec![0u64; k];
    for &l in &train.labels {
        class_counts[l as usize] += 1;
    }
    // per feature: counts[value][class]
    let per_feature: Vec<Vec<Vec<u64>>> = subset
        .indices()
        .iter()
        .map(|&f| {
            let card = train.features[f].cardinality as usize;
            let mut counts = vec![vec![0u64; k]; card];
            for row in 0..train.n_rows() {
                counts[train.features[f].values[row] as usize][train.labels[row] as usize] += 1;
            }
            counts
        })
        .collect();
    let n = train.n_rows() as f64;
    (0..test.n_rows())
        .map(|row| {
            let mut best = (0u32, f64::NEG_INFINITY);
            for c in 0..k {
                if class_counts[c] == 0 {
                    continue;
                }
                let mut log_p = (class_counts[c] as f64 / n).ln();
                for (j, &f) in subset.indices().iter().enumerate() {
                    let card = train.features[f].cardinality as f64;
                    let v = test.features[f].values[row] as usize;
                    let count = per_feature[j].get(v).map_or(0, |cell| cell[c]);
                    log_p += ((count as f64 + alpha) / (class_counts[c] as f64 + alpha * card)).ln();
                }
                if log_p > best.1 {
                    best = (c as u32, log_p);
                }
            }
            best.0
        })
        .collect()
}

/// Configuration of the bootstrap evaluation protocol.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub n_bootstrap: usize,
    pub max_features: usize,
    pub seed: u64,
    /// Fraction of rows used for training. The special value 1.0 evaluates
    /// with train = test = the full dataset.
    pub train_fraction: f64,
}

impl PipelineConfig {
    pub fn new(n_bootstrap: usize, max_features: usize, seed: u64) -> Self {
        PipelineConfig { n_bootstrap, max_features, seed, train_fraction: 0.8 }
    }
}

/// Accuracy-vs-feature-count curves for one criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset_id: String,
    pub criterion: String,
    pub classifiers: Vec<String>,
    pub seeds: Vec<u64>,
    /// Feature order chosen on the train part of each split.
    pub selected: Vec<Vec<usize>>,
    /// curves[split][classifier][k-1] = test accuracy with the first k features.
    pub curves: Vec<Vec<Vec<f64>>>,
    /// Arithmetic mean across splits, indexed [classifier][k-1].
    pub mean: Vec<Vec<f64>>,
}

impl EvalReport {
    /// One row per (split, criterion, classifier, k); the cross-split mean
    /// appears under the pseudo-split "mean".
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Format { path: "<writer>".into(), message: e.to_string() };
        w.write_record(["split", "criterion", "classifier", "k", "accuracy"]).map_err(err)?;
        for (split, per_classifier) in self.curves.iter().enumerate() {
            for (ci, curve) in per_classifier.iter().enumerate() {
                for (k, acc) in curve.iter().enumerate() {
                    w.write_record([
                        split.to_string(),
                        self.criterion.clone(),
                        self.classifiers[ci].clone(),
                        (k + 1).to_string(),
                        format!("{acc:.6}"),
                    ])
                    .map_err(err)?;
                }
            }
        }
        for (ci, curve) in self.mean.iter().enumerate() {
            for (k, acc) in curve.iter().enumerate() {
                w.write_record([
                    "mean".to_string(),
                    self.criterion.clone(),
                    self.classifiers[ci].clone(),
                    (k + 1).to_string(),
                    format!("{acc:.6}"),
                ])
                .map_err(err)?;
            }
        }
        w.flush().map_err(|e| Error::Io { path: "<writer>".into(), source: e })?;
        Ok(())
    }
}

/// Runs the bootstrap protocol: per split, select on the train part only,
/// then score every feature-count prefix on the test part. Splits execute
/// in parallel and merge in split-index order.
pub fn run_pipeline(
    dataset: &Dataset,
    dataset_id: &str,
    criteria: &[Criterion],
    kinds: &[ClassifierKind],
    config: PipelineConfig,
) -> Result<Vec<EvalReport>> {
    if config.n_bootstrap == 0 {
        return Err(Error::InvalidArgument("n_bootstrap must be positive".into()));
    }
    if config.max_features == 0 || config.max_features > dataset.n_features() {
        return Err(Error::InvalidArgument(format!(
            "max_features must be in 1..={}, got {}",
            dataset.n_features(),
            config.max_features
        )));
    }
    for kind in kinds {
        kind.validate()?;
    }
    let seeds: Vec<u64> = (0..config.n_bootstrap).map(|i| config.seed.wrapping_add(i as u64)).collect();

    let mut reports = Vec::with_capacity(criteria.len());
    for &criterion in criteria {
        let splits = par::map(&seeds, |&split_seed| -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
            let (train, test);
            if config.train_fraction >= 1.0 {
                train = dataset.clone();
                test = dataset.clone();
            } else {
                let (tr, te) = dataset.split(config.train_fraction, split_seed)?;
                train = tr;
                test = te;
            }
            // selection sees only the train part
            let trace = greedy_select(&train, criterion, StopRule::max_features(config.max_features))?;
            let order = trace.selected();
            let mut per_classifier = Vec::with_capacity(kinds.len());
            for &kind in kinds {
                let mut curve = Vec::with_capacity(config.max_features);
                for k in 1..=config.max_features {
                    let take = k.min(order.len());
                    let subset = FeatureSubset::from_indices(order[..take].iter().copied());
                    curve.push(classify(&train, &test, &subset, kind)?);
                }
                per_classifier.push(curve);
            }
            Ok((order, per_classifier))
        });

        let mut selected = Vec::new();
        let mut curves = Vec::new();
        for split in splits {
            let (order, per_classifier) = split?;
            selected.push(order);
            curves.push(per_classifier);
        }
        let mut mean = vec![vec![0.0; config.max_features]; kinds.len()];
        for per_classifier in &curves {
            for (ci, curve) in per_classifier.iter().enumerate() {
                for (k, acc) in curve.iter().enumerate() {
                    mean[ci][k] += acc / config.n_bootstrap as f64;
                }
            }
        }
        reports.push(EvalReport {
            dataset_id: dataset_id.to_owned(),
            criterion: criterion.name().to_owned(),
            classifiers: kinds.iter().map(|k| k.name().to_owned()).collect(),
            seeds: seeds.clone(),
            selected,
            curves,
            mean,
        });
    }
    Ok(reports)
}

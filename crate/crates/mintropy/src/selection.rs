//! Greedy forward selection with pluggable scoring criteria.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::distribution::{joint, FeatureSubset, JointTable};
use crate::entropy::{
    bayes_error, cond_min_entropy, cond_mutual_info_shannon, cond_shannon, feature_mutual_info,
    mutual_info_shannon,
};
use crate::error::{Error, Result};
use crate::par;

/// Scoring rule driving the greedy loop.
///
/// `RenyiMin` and `Shannon` minimize a conditional entropy; the four
/// baselines maximize a relevance-minus-redundancy score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Criterion {
    RenyiMin,
    Shannon,
    Mifs { beta: f64 },
    Mrmr,
    Jmi,
    Cmim,
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::RenyiMin => "renyi",
            Criterion::Shannon => "shannon",
            Criterion::Mifs { .. } => "mifs",
            Criterion::Mrmr => "mrmr",
            Criterion::Jmi => "jmi",
            Criterion::Cmim => "cmim",
        }
    }

    fn validate(&self) -> Result<()> {
        if let Criterion::Mifs { beta } = self {
            if !beta.is_finite() || *beta < 0.0 {
                return Err(Error::InvalidArgument(format!("mifs beta must be >= 0, got {beta}")));
            }
        }
        Ok(())
    }

    /// True when the criterion value is an entropy to be minimized.
    fn minimizes(&self) -> bool {
        matches!(self, Criterion::RenyiMin | Criterion::Shannon)
    }
}

/// Why the greedy loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Threshold,
    TargetError,
    MaxFeatures,
    Exhausted,
}

/// Declarative stopping rules; at least one must be set.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct StopRule {
    /// Entropy threshold in bits, compared against the criterion's own
    /// conditional entropy (H1 for Shannon, H_inf otherwise).
    pub threshold_h: Option<f64>,
    pub max_features: Option<usize>,
    pub target_error: Option<f64>,
}

impl StopRule {
    pub fn threshold(h: f64) -> Self {
        StopRule { threshold_h: Some(h), ..Default::default() }
    }

    pub fn max_features(k: usize) -> Self {
        StopRule { max_features: Some(k), ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.threshold_h.is_none() && self.max_features.is_none() && self.target_error.is_none() {
            return Err(Error::EmptyStopRule);
        }
        if let Some(h) = self.threshold_h {
            if h < 0.0 {
                return Err(Error::NegativeThreshold(h));
            }
        }
        Ok(())
    }
}

/// One accepted feature with its diagnostics after acceptance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionStep {
    pub feature: usize,
    pub criterion_value: f64,
    pub cond_shannon: f64,
    pub cond_min_entropy: f64,
    pub bayes_error: f64,
}

/// Ordered record of a greedy run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub criterion: Criterion,
    pub steps: Vec<SelectionStep>,
    pub stopped_by: StopReason,
}

impl SelectionTrace {
    pub fn selected(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.feature).collect()
    }

    pub fn subset(&self) -> FeatureSubset {
        FeatureSubset::from_indices(self.selected())
    }

    /// Prefix subset after `k` steps.
    pub fn prefix(&self, k: usize) -> FeatureSubset {
        FeatureSubset::from_indices(self.steps.iter().take(k).map(|s| s.feature))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "feature", "criterion_value", "cond_shannon", "cond_min_entropy", "bayes_error"])
            .map_err(|e| Error::Format { path: "<writer>".into(), message: e.to_string() })?;
        for (i, s) in self.steps.iter().enumerate() {
            w.write_record([
                i.to_string(),
                s.feature.to_string(),
                format!("{:.6}", s.criterion_value),
                format!("{:.6}", s.cond_shannon),
                format!("{:.6}", s.cond_min_entropy),
                format!("{:.6}", s.bayes_error),
            ])
            .map_err(|e| Error::Format { path: "<writer>".into(), message: e.to_string() })?;
        }
        w.flush().map_err(|e| Error::Io { path: "<writer>".into(), source: e })?;
        Ok(())
    }
}

/// MIFS score I1(C;f) - beta * sum_{s in S} I1(f_s; f).
pub fn score_mifs(dataset: &Dataset, feature: usize, subset: &FeatureSubset, beta: f64) -> Result<f64> {
    if subset.contains(feature) {
        return Err(Error::DuplicateFeature(feature));
    }
    let relevance = mutual_info_shannon(&joint(dataset, &FeatureSubset::from_indices([feature]))?);
    let mut redundancy = 0.0;
    for &s in subset.indices() {
        redundancy += feature_mutual_info(dataset, s, feature)?;
    }
    Ok(relevance - beta * redundancy)
}

/// mRMR score: relevance minus the mean redundancy over selected features.
pub fn score_mrmr(dataset: &Dataset, feature: usize, subset: &FeatureSubset) -> Result<f64> {
    if subset.is_empty() {
        return score_mifs(dataset, feature, subset, 0.0);
    }
    score_mifs(dataset, feature, subset, 1.0 / subset.len() as f64)
}

/// JMI score min_{s in S} I1(C; f, s); falls back to I1(C; f) for empty S.
pub fn score_jmi(dataset: &Dataset, feature: usize, subset: &FeatureSubset) -> Result<f64> {
    if subset.contains(feature) {
        return Err(Error::DuplicateFeature(feature));
    }
    if subset.is_empty() {
        return Ok(mutual_info_shannon(&joint(dataset, &FeatureSubset::from_indices([feature]))?));
    }
    let mut best = f64::INFINITY;
    for &s in subset.indices() {
        let pair = FeatureSubset::from_indices([feature, s]);
        best = best.min(mutual_info_shannon(&joint(dataset, &pair)?));
    }
    Ok(best)
}

/// CMIM score min_{s in S} I1(C; f | s); falls back to I1(C; f) for empty S.
pub fn score_cmim(dataset: &Dataset, feature: usize, subset: &FeatureSubset) -> Result<f64> {
    if subset.contains(feature) {
        return Err(Error::DuplicateFeature(feature));
    }
    if subset.is_empty() {
        return Ok(mutual_info_shannon(&joint(dataset, &FeatureSubset::from_indices([feature]))?));
    }
    let mut best = f64::INFINITY;
    for &s in subset.indices() {
        best = best.min(cond_mutual_info_shannon(dataset, feature, &FeatureSubset::from_indices([s]))?);
    }
    Ok(best)
}

fn candidate_score(
    dataset: &Dataset,
    criterion: Criterion,
    feature: usize,
    subset: &FeatureSubset,
    current: &JointTable,
) -> Result<f64> {
    match criterion {
        Criterion::RenyiMin => Ok(cond_min_entropy(&current.extend(dataset, feature)?)),
        Criterion::Shannon => Ok(cond_shannon(&current.extend(dataset, feature)?)),
        Criterion::Mifs { beta } => score_mifs(dataset, feature, subset, beta),
        Criterion::Mrmr => score_mrmr(dataset, feature, subset),
        Criterion::Jmi => score_jmi(dataset, feature, subset),
        Criterion::Cmim => score_cmim(dataset, feature, subset),
    }
}

/// Greedy forward selection. Ties break toward the lowest feature index;
/// candidate scoring runs data-parallel but the argmin reduction is a
/// sequential scan in index order, so traces are deterministic.
pub fn greedy_select(dataset: &Dataset, criterion: Criterion, stop: StopRule) -> Result<SelectionTrace> {
    criterion.validate()?;
    stop.validate()?;
    let mut selected = FeatureSubset::empty();
    let mut current = joint(dataset, &selected)?;
    let mut steps: Vec<SelectionStep> = Vec::new();

    let stopped_by = loop {
        let h1 = cond_shannon(&current);
        let h_inf = cond_min_entropy(&current);
        let b = bayes_error(&current);
        if let Some(h) = stop.threshold_h {
            let gauge = if criterion == Criterion::Shannon { h1 } else { h_inf };
            if gauge <= h {
                break StopReason::Threshold;
            }
        }
        if let Some(target) = stop.target_error {
            if b <= target {
                break StopReason::TargetError;
            }
        }
        if let Some(k) = stop.max_features {
            if steps.len() >= k {
                break StopReason::MaxFeatures;
            }
        }

        // constant columns can never improve any criterion
        let candidates: Vec<usize> = (0..dataset.n_features())
            .filter(|&f| !selected.contains(f) && dataset.features[f].cardinality > 1)
            .collect();
        if candidates.is_empty() {
            break StopReason::Exhausted;
        }
        let scores = par::map(&candidates, |&f| candidate_score(dataset, criterion, f, &selected, &current));
        let mut best: Option<(usize, f64)> = None;
        for (&f, score) in candidates.iter().zip(scores) {
            let score = score?;
            let better = match best {
                None => true,
                Some((_, s)) => {
                    if criterion.minimizes() {
                        score < s
                    } else {
                        score > s
                    }
                }
            };
            if better {
                best = Some((f, score));
            }
        }
        let (feature, criterion_value) = best.unwrap();
        current = current.extend(dataset, feature)?;
        selected = selected.with(feature)?;
        steps.push(SelectionStep {
            feature,
            criterion_value,
            cond_shannon: cond_shannon(&current),
            cond_min_entropy: cond_min_entropy(&current),
            bayes_error: bayes_error(&current),
        });
    };

    Ok(SelectionTrace { criterion, steps, stopped_by })
}

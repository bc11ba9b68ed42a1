//! Exact and brute-force reference computations.
//!
//! `min_set_exact` enumerates feature subsets exhaustively; the `brute_force_*`
//! functions recompute scores directly from raw row counts, independent of the
//! incremental joint-table machinery they are used to check.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::distribution::{joint, FeatureSubset};
use crate::entropy::{bayes_error, cond_min_entropy, cond_shannon, Order};
use crate::error::{Error, Result};
use crate::par;
use crate::selection::{Criterion, SelectionTrace};

/// Exhaustive search is capped here; beyond it the subset count explodes.
pub const MAX_EXACT_FEATURES: usize = 24;

/// Smallest subset meeting the entropy threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinSetResult {
    pub subset: Vec<usize>,
    pub achieved_entropy: f64,
    pub explored: u64,
}

/// Outcome of the exact search: either the minimum subset, or proof that even
/// the full feature set misses the threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum MinSetOutcome {
    Found(MinSetResult),
    Infeasible { full_set_entropy: f64, explored: u64 },
}

fn entropy_at(dataset: &Dataset, indices: &[usize], order: Order) -> Result<f64> {
    let table = joint(dataset, &FeatureSubset::from_indices(indices.iter().copied()))?;
    Ok(match order {
        Order::Shannon => cond_shannon(&table),
        Order::MinEntropy => cond_min_entropy(&table),
        Order::Alpha(_) => return Err(Error::InvalidOrder("exact search supports the Shannon and min-entropy limits".into())),
    })
}

/// Exact MIN-SET: subsets enumerated in increasing size, lexicographic within
/// a size; the first satisfier wins. Chunks are scored in parallel but the
/// canonical order decides, so the result is independent of thread count.
pub fn min_set_exact(dataset: &Dataset, order: Order, h: f64) -> Result<MinSetOutcome> {
    if h < 0.0 {
        return Err(Error::NegativeThreshold(h));
    }
    let n = dataset.n_features();
    if n > MAX_EXACT_FEATURES {
        return Err(Error::TooManyFeatures { limit: MAX_EXACT_FEATURES, found: n });
    }

    let mut explored = 0u64;
    for size in 0..=n {
        let mut combos = combinations(n, size);
        const CHUNK: usize = 4096;
        loop {
            let chunk: Vec<Vec<usize>> = combos.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                break;
            }
            let entropies = par::map(&chunk, |subset| entropy_at(dataset, subset, order));
            for (subset, entropy) in chunk.iter().zip(entropies) {
                let entropy = entropy?;
                explored += 1;
                if entropy <= h {
                    return Ok(MinSetOutcome::Found(MinSetResult {
                        subset: subset.clone(),
                        achieved_entropy: entropy,
                        explored,
                    }));
                }
            }
        }
    }
    let full: Vec<usize> = (0..n).collect();
    Ok(MinSetOutcome::Infeasible { full_set_entropy: entropy_at(dataset, &full, order)?, explored })
}

/// Lexicographic k-combinations of 0..n.
fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut state: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let current = state.clone()?;
        // advance to the next combination
        let mut next = current.clone();
        let mut i = k;
        loop {
            if i == 0 {
                state = None;
                break;
            }
            i -= 1;
            if next[i] < n - (k - i) {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                state = Some(next);
                break;
            }
        }
        Some(current)
    })
}

/// A step where the trace's choice was beaten on Bayes error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimalityViolation {
    pub step: usize,
    pub feature: usize,
    pub chosen_error: f64,
    pub alternative_error: f64,
}

/// Checks per-step local optimality of a trace: the accepted feature must
/// reach a Bayes error no worse than any alternative at that step.
pub fn check_local_optimality(dataset: &Dataset, trace: &SelectionTrace) -> Result<Vec<OptimalityViolation>> {
    let n = dataset.n_features();
    for step in &trace.steps {
        if step.feature >= n {
            return Err(Error::TraceMismatch { feature: step.feature });
        }
    }
    let mut violations = Vec::new();
    let mut prefix = FeatureSubset::empty();
    for (t, step) in trace.steps.iter().enumerate() {
        let chosen = bayes_error(&joint(dataset, &prefix.with(step.feature)?)?);
        for f in 0..n {
            if prefix.contains(f) || f == step.feature {
                continue;
            }
            let alternative = bayes_error(&joint(dataset, &prefix.with(f)?)?);
            if chosen > alternative + 1e-12 {
                violations.push(OptimalityViolation {
                    step: t,
                    feature: f,
                    chosen_error: chosen,
                    alternative_error: alternative,
                });
            }
        }
        prefix = prefix.with(step.feature)?;
    }
    Ok(violations)
}

// ---------------------------------------------------------------------------
// Direct recomputation from raw rows (the independent side of every
// dual-route check). No joint tables, no incremental refinement.

fn direct_counts(dataset: &Dataset, indices: &[usize]) -> HashMap<(Vec<u32>, u32), u64> {
    let mut counts = HashMap::new();
    for row in 0..dataset.n_rows() {
        let tuple: Vec<u32> = indices.iter().map(|&i| dataset.features[i].values[row]).collect();
        *counts.entry((tuple, dataset.labels[row])).or_insert(0) += 1;
    }
    counts
}

fn direct_cond_entropy(dataset: &Dataset, indices: &[usize], order: Order) -> f64 {
    let counts = direct_counts(dataset, indices);
    let n = dataset.n_rows() as f64;
    let mut per_tuple: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
    for ((tuple, _), &count) in &counts {
        per_tuple.entry(tuple.clone()).or_default().push(count);
    }
    match order {
        Order::Shannon => {
            let mut h = 0.0;
            for cells in per_tuple.values() {
                let total: u64 = cells.iter().sum();
                for &c in cells {
                    h += (c as f64 / n) * (total as f64 / c as f64).log2();
                }
            }
            h
        }
        Order::MinEntropy => {
            let mut success = 0u64;
            for cells in per_tuple.values() {
                success += *cells.iter().max().unwrap();
            }
            -(success as f64 / n).log2() + 0.0
        }
        Order::Alpha(_) => unreachable!("direct oracle covers the two limits only"),
    }
}

fn direct_class_entropy(dataset: &Dataset) -> f64 {
    let mut counts = vec![0u64; dataset.class_count()];
    for &label in &dataset.labels {
        counts[label as usize] += 1;
    }
    let n = dataset.n_rows() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| (c as f64 / n) * (n / c as f64).log2())
        .sum()
}

fn direct_class_mi(dataset: &Dataset, indices: &[usize]) -> f64 {
    direct_class_entropy(dataset) - direct_cond_entropy(dataset, indices, Order::Shannon)
}

fn direct_feature_mi(dataset: &Dataset, a: usize, b: usize) -> f64 {
    let n = dataset.n_rows() as f64;
    let mut pair: HashMap<(u32, u32), u64> = HashMap::new();
    let mut left: HashMap<u32, u64> = HashMap::new();
    let mut right: HashMap<u32, u64> = HashMap::new();
    for row in 0..dataset.n_rows() {
        let va = dataset.features[a].values[row];
        let vb = dataset.features[b].values[row];
        *pair.entry((va, vb)).or_insert(0) += 1;
        *left.entry(va).or_insert(0) += 1;
        *right.entry(vb).or_insert(0) += 1;
    }
    let mut mi = 0.0;
    for (&(va, vb), &c) in &pair {
        let p_ab = c as f64 / n;
        let p_a = left[&va] as f64 / n;
        let p_b = right[&vb] as f64 / n;
        mi += p_ab * (p_ab / (p_a * p_b)).log2();
    }
    mi.max(0.0)
}

/// Direct evaluation of a criterion score from raw counts; mirrors the
/// selection module's scores and must agree within 1e-9.
pub fn brute_force_score(
    dataset: &Dataset,
    criterion: Criterion,
    feature: usize,
    subset: &FeatureSubset,
) -> Result<f64> {
    if subset.contains(feature) {
        return Err(Error::DuplicateFeature(feature));
    }
    if feature >= dataset.n_features() {
        return Err(Error::FeatureOutOfRange { index: feature, count: dataset.n_features() });
    }
    let mut grown: Vec<usize> = subset.indices().to_vec();
    grown.push(feature);
    grown.sort_unstable();
    Ok(match criterion {
        Criterion::RenyiMin => direct_cond_entropy(dataset, &grown, Order::MinEntropy),
        Criterion::Shannon => direct_cond_entropy(dataset, &grown, Order::Shannon),
        Criterion::Mifs { beta } => {
            let relevance = direct_class_mi(dataset, &[feature]);
            let redundancy: f64 = subset.indices().iter().map(|&s| direct_feature_mi(dataset, s, feature)).sum();
            relevance - beta * redundancy
        }
        Criterion::Mrmr => {
            let relevance = direct_class_mi(dataset, &[feature]);
            if subset.is_empty() {
                relevance
            } else {
                let redundancy: f64 =
                    subset.indices().iter().map(|&s| direct_feature_mi(dataset, s, feature)).sum();
                relevance - redundancy / subset.len() as f64
            }
        }
        Criterion::Jmi => {
            if subset.is_empty() {
                direct_class_mi(dataset, &[feature])
            } else {
                subset
                    .indices()
                    .iter()
                    .map(|&s| direct_class_mi(dataset, &sorted_pair(feature, s)))
                    .fold(f64::INFINITY, f64::min)
            }
        }
        Criterion::Cmim => {
            if subset.is_empty() {
                direct_class_mi(dataset, &[feature])
            } else {
                subset
                    .indices()
                    .iter()
                    .map(|&s| {
                        direct_cond_entropy(dataset, &[s], Order::Shannon)
                            - direct_cond_entropy(dataset, &sorted_pair(feature, s), Order::Shannon)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    })
}

fn sorted_pair(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_fig1_dataset, random_dataset};
    use crate::selection::{greedy_select, StopRule};

    #[test]
    fn combinations_lexicographic() {
        let all: Vec<Vec<usize>> = combinations(4, 2).collect();
        assert_eq!(all, vec![
            vec![0, 1], vec![0, 2], vec![0, 3],
            vec![1, 2], vec![1, 3], vec![2, 3],
        ]);
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(3, 3).count(), 1);
    }

    #[test]
    fn fig1_min_set_is_the_last_five() {
        let ds = generate_fig1_dataset();
        match min_set_exact(&ds, Order::MinEntropy, 0.0).unwrap() {
            MinSetOutcome::Found(r) => {
                assert_eq!(r.subset, vec![1, 2, 3, 4, 5]);
                assert_eq!(r.achieved_entropy, 0.0);
            }
            other => panic!("expected a solution, got {other:?}"),
        }
        match min_set_exact(&ds, Order::Shannon, 0.0).unwrap() {
            MinSetOutcome::Found(r) => assert_eq!(r.subset.len(), 5),
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn trivial_threshold_gives_empty_subset() {
        let ds = generate_fig1_dataset();
        match min_set_exact(&ds, Order::Shannon, 4.0).unwrap() {
            MinSetOutcome::Found(r) => {
                assert!(r.subset.is_empty());
                assert_eq!(r.explored, 1);
            }
            other => panic!("expected the empty subset, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_threshold_reported() {
        // two identical rows with different classes: entropy can never reach 0
        let mut ds = random_dataset(4, 2, 2, 2, 1);
        for col in &mut ds.features {
            col.values = vec![0, 0, 1, 1];
        }
        ds.labels = vec![0, 1, 0, 1];
        match min_set_exact(&ds, Order::MinEntropy, 0.0).unwrap() {
            MinSetOutcome::Infeasible { full_set_entropy, explored } => {
                assert!(full_set_entropy > 0.0);
                assert_eq!(explored, 4); // all 2^2 subsets
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn zero_threshold_solution_separates_classes() {
        let ds = generate_fig1_dataset();
        let MinSetOutcome::Found(r) = min_set_exact(&ds, Order::MinEntropy, 0.0).unwrap() else {
            panic!("expected a solution");
        };
        for a in 0..ds.n_rows() {
            for b in a + 1..ds.n_rows() {
                let same = r.subset.iter().all(|&f| ds.features[f].values[a] == ds.features[f].values[b]);
                assert!(!same || ds.labels[a] == ds.labels[b]);
            }
        }
    }

    #[test]
    fn guard_rejects_large_feature_counts() {
        let ds = random_dataset(10, 25, 2, 2, 5);
        assert!(matches!(
            min_set_exact(&ds, Order::Shannon, 0.0),
            Err(Error::TooManyFeatures { .. })
        ));
        let small = random_dataset(10, 3, 2, 2, 5);
        assert!(min_set_exact(&small, Order::Shannon, -0.5).is_err());
    }

    #[test]
    fn renyi_trace_locally_optimal_on_fig1() {
        let ds = generate_fig1_dataset();
        let trace = greedy_select(&ds, Criterion::RenyiMin, StopRule::threshold(0.0)).unwrap();
        assert!(check_local_optimality(&ds, &trace).unwrap().is_empty());
    }

    #[test]
    fn shannon_trace_violates_local_optimality_on_fig1() {
        let ds = generate_fig1_dataset();
        let trace = greedy_select(&ds, Criterion::Shannon, StopRule::threshold(0.0)).unwrap();
        let violations = check_local_optimality(&ds, &trace).unwrap();
        assert!(!violations.is_empty());
        let first = &violations[0];
        assert_eq!(first.step, 0);
        assert!((first.chosen_error - 0.8).abs() < 1e-12);
        assert!((first.alternative_error - 0.7).abs() < 1e-12);
    }

    #[test]
    fn single_feature_trace_vacuously_optimal() {
        let ds = random_dataset(20, 1, 2, 3, 37);
        let trace = greedy_select(&ds, Criterion::RenyiMin, StopRule::max_features(1)).unwrap();
        assert!(check_local_optimality(&ds, &trace).unwrap().is_empty());
    }

    #[test]
    fn mismatched_trace_rejected() {
        let ds = generate_fig1_dataset();
        let trace = greedy_select(&ds, Criterion::RenyiMin, StopRule::max_features(2)).unwrap();
        let tiny = random_dataset(10, 1, 2, 2, 41);
        assert!(matches!(
            check_local_optimality(&tiny, &trace),
            Err(Error::TraceMismatch { .. })
        ));
    }

    #[test]
    fn brute_force_matches_selection_scores() {
        use crate::selection::{score_cmim, score_jmi, score_mifs, score_mrmr};
        for seed in [1, 2, 3] {
            let ds = random_dataset(50, 4, 3, 3, seed);
            let subset = FeatureSubset::from_indices([0, 2]);
            for f in [1usize, 3] {
                for beta in [0.0, 0.5, 1.0] {
                    let a = score_mifs(&ds, f, &subset, beta).unwrap();
                    let b = brute_force_score(&ds, Criterion::Mifs { beta }, f, &subset).unwrap();
                    assert!((a - b).abs() < 1e-9, "mifs seed {seed} f {f} beta {beta}: {a} vs {b}");
                }
                let pairs = [
                    (score_mrmr(&ds, f, &subset).unwrap(), Criterion::Mrmr),
                    (score_jmi(&ds, f, &subset).unwrap(), Criterion::Jmi),
                    (score_cmim(&ds, f, &subset).unwrap(), Criterion::Cmim),
                ];
                for (a, criterion) in pairs {
                    let b = brute_force_score(&ds, criterion, f, &subset).unwrap();
                    assert!((a - b).abs() < 1e-9, "{criterion:?} seed {seed} f {f}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn greedy_never_beats_exact() {
        for seed in [5, 6, 7] {
            let ds = random_dataset(40, 6, 3, 2, seed);
            for (criterion, order) in
                [(Criterion::Shannon, Order::Shannon), (Criterion::RenyiMin, Order::MinEntropy)]
            {
                let trace = greedy_select(&ds, criterion, StopRule::threshold(0.0)).unwrap();
                if trace.stopped_by != crate::selection::StopReason::Threshold {
                    continue; // dataset not separable, nothing to compare
                }
                match min_set_exact(&ds, order, 0.0).unwrap() {
                    MinSetOutcome::Found(r) => assert!(r.subset.len() <= trace.steps.len()),
                    MinSetOutcome::Infeasible { .. } => panic!("greedy found a separating set, exact must too"),
                }
            }
        }
    }
}

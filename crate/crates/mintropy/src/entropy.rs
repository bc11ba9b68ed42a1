//! Information measures over discrete distributions and joint tables.
//!
//! Everything is in bits (log base 2). Cell sums run in ascending
//! (tuple-code, class-index) order so results are bitwise reproducible.

use crate::dataset::Dataset;
use crate::distribution::{joint, FeatureSubset, JointTable};
use crate::error::{Error, Result};

/// Order of a Renyi entropy: a finite positive alpha != 1, or one of the
/// two limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Shannon,
    MinEntropy,
    Alpha(f64),
}

impl Order {
    pub fn alpha(value: f64) -> Result<Order> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidOrder(format!("alpha must be a finite positive real, got {value}")));
        }
        if value == 1.0 {
            return Err(Error::InvalidOrder("alpha = 1 is the Shannon limit; use Order::Shannon".into()));
        }
        Ok(Order::Alpha(value))
    }
}

const SUM_TOLERANCE: f64 = 1e-9;

/// Clamp tiny negative round-off in mutual-information differences.
fn clamp_negative_zero(v: f64) -> f64 {
    if v < 0.0 && v > -SUM_TOLERANCE {
        0.0
    } else {
        v
    }
}

/// Renyi entropy of a probability vector at the given order, in bits.
pub fn renyi_entropy(p: &[f64], order: Order) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    let mut sum = 0.0;
    for &x in p {
        if x < 0.0 {
            return Err(Error::InvalidDistribution(format!("negative entry {x}")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}, not 1")));
    }
    let value = match order {
        Order::Shannon => -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>(),
        Order::MinEntropy => -p.iter().cloned().fold(0.0f64, f64::max).log2(),
        Order::Alpha(alpha) => {
            // entries that would underflow p^alpha are dropped as exact zeros
            let floor = 1e-300f64.powf(1.0 / alpha);
            let power_sum: f64 = p.iter().filter(|&&x| x >= floor).map(|&x| x.powf(alpha)).sum();
            power_sum.log2() / (1.0 - alpha)
        }
    };
    // -0.0 from a point mass normalizes to 0.0
    Ok(value + 0.0)
}

/// Conditional Shannon entropy H1(C | S): the expected residual class
/// entropy once the feature tuple is known.
pub fn cond_shannon(table: &JointTable) -> f64 {
    let n = table.n_rows() as f64;
    let mut h = 0.0;
    for tuple in 0..table.tuple_count() {
        let n_t = table.tuple_total(tuple) as f64;
        for class in 0..table.class_count() {
            let n_tc = table.cell(tuple, class) as f64;
            if n_tc > 0.0 {
                h += (n_tc / n) * (n_t / n_tc).log2();
            }
        }
    }
    h
}

/// Arimoto conditional min-entropy H_inf(C | S) = -log2 sum_t max_c p(t, c).
pub fn cond_min_entropy(table: &JointTable) -> f64 {
    -(guess_success(table) / table.n_rows() as f64).log2() + 0.0
}

/// Integer numerator of the one-guess success probability sum_t max_c n(t,c);
/// dividing once keeps exact cases (like certainty) exact.
fn guess_success(table: &JointTable) -> f64 {
    let mut success = 0u64;
    for tuple in 0..table.tuple_count() {
        success += (0..table.class_count()).map(|c| table.cell(tuple, c)).max().unwrap_or(0);
    }
    success as f64
}

/// Bayes error B(C | S) = 1 - sum_t max_c p(t, c): the misclassification
/// probability of the best single-guess predictor.
pub fn bayes_error(table: &JointTable) -> f64 {
    1.0 - guess_success(table) / table.n_rows() as f64
}

/// Cachin's conditional min-entropy: the expectation over tuples of the
/// posterior min-entropy. Unlike the Arimoto form it can exceed the prior
/// min-entropy.
pub fn cachin_cond_min_entropy(table: &JointTable) -> f64 {
    let n = table.n_rows() as f64;
    let mut h = 0.0;
    for tuple in 0..table.tuple_count() {
        let n_t = table.tuple_total(tuple) as f64;
        if n_t == 0.0 {
            continue;
        }
        let best = (0..table.class_count()).map(|c| table.cell(tuple, c)).max().unwrap_or(0) as f64;
        h += (n_t / n) * -(best / n_t).log2();
    }
    h + 0.0
}

/// Shannon mutual information I1(C; S) = H1(C) - H1(C|S).
pub fn mutual_info_shannon(table: &JointTable) -> f64 {
    let h_c = renyi_entropy(&table.class_marginal(), Order::Shannon).expect("marginal is a distribution");
    clamp_negative_zero(h_c - cond_shannon(table))
}

/// Min-entropy mutual information I_inf(C; S) = H_inf(C) - H_inf(C|S).
pub fn mutual_info_min(table: &JointTable) -> f64 {
    let h_c = renyi_entropy(&table.class_marginal(), Order::MinEntropy).expect("marginal is a distribution");
    clamp_negative_zero(h_c - cond_min_entropy(table))
}

/// Conditional Shannon mutual information I1(C; f | S).
pub fn cond_mutual_info_shannon(dataset: &Dataset, feature: usize, subset: &FeatureSubset) -> Result<f64> {
    let base = joint(dataset, subset)?;
    let refined = base.extend(dataset, feature)?;
    Ok(clamp_negative_zero(cond_shannon(&base) - cond_shannon(&refined)))
}

/// Conditional min-entropy mutual information I_inf(C; f | S).
pub fn cond_mutual_info_min(dataset: &Dataset, feature: usize, subset: &FeatureSubset) -> Result<f64> {
    let base = joint(dataset, subset)?;
    let refined = base.extend(dataset, feature)?;
    // Arimoto monotonicity rules out true negatives; only round-off is removed
    Ok(clamp_negative_zero(cond_min_entropy(&base) - cond_min_entropy(&refined)))
}

/// Shannon mutual information between two feature columns.
pub fn feature_mutual_info(dataset: &Dataset, a: usize, b: usize) -> Result<f64> {
    for &i in &[a, b] {
        if i >= dataset.n_features() {
            return Err(Error::FeatureOutOfRange { index: i, count: dataset.n_features() });
        }
    }
    let col_a = &dataset.features[a];
    let col_b = &dataset.features[b];
    let (ka, kb) = (col_a.cardinality as usize, col_b.cardinality as usize);
    let mut counts = vec![vec![0u64; kb]; ka];
    for (&va, &vb) in col_a.values.iter().zip(&col_b.values) {
        counts[va as usize][vb as usize] += 1;
    }
    let table = JointTable::from_counts(counts)?;
    Ok(mutual_info_shannon(&table.transposed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_fig1_dataset;
    use crate::distribution::joint;

    const LOG2_10: f64 = std::f64::consts::LOG2_10;

    fn fig1_table(indices: &[usize]) -> JointTable {
        let ds = generate_fig1_dataset();
        joint(&ds, &FeatureSubset::from_indices(indices.iter().copied())).unwrap()
    }

    #[test]
    fn uniform_entropy_is_log_cardinality() {
        let p = vec![0.1; 10];
        for order in [Order::Shannon, Order::MinEntropy, Order::alpha(0.5).unwrap(), Order::alpha(2.0).unwrap()] {
            assert!((renyi_entropy(&p, order).unwrap() - LOG2_10).abs() < 1e-9);
        }
    }

    #[test]
    fn point_mass_entropy_is_zero() {
        let p = vec![0.0, 1.0, 0.0];
        for order in [Order::Shannon, Order::MinEntropy, Order::alpha(3.0).unwrap()] {
            assert_eq!(renyi_entropy(&p, order).unwrap(), 0.0);
        }
    }

    #[test]
    fn alpha_two_collision_entropy() {
        // H_2(0.75, 0.25) = -log2(0.625)
        let h = renyi_entropy(&[0.75, 0.25], Order::alpha(2.0).unwrap()).unwrap();
        assert!((h - 0.6780719051126378).abs() < 1e-12);
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(renyi_entropy(&[0.5, 0.6], Order::Shannon).is_err());
        assert!(renyi_entropy(&[-0.1, 1.1], Order::Shannon).is_err());
        assert!(Order::alpha(1.0).is_err());
        assert!(Order::alpha(0.0).is_err());
        assert!(Order::alpha(f64::INFINITY).is_err());
    }

    #[test]
    fn fig1_conditional_shannon() {
        assert!((cond_shannon(&fig1_table(&[0])) - 2.350977500432694).abs() < 1e-12);
        for f in 1..6 {
            assert!((cond_shannon(&fig1_table(&[f])) - 2.4).abs() < 1e-12);
        }
        assert_eq!(cond_shannon(&fig1_table(&[0, 1, 2, 3, 4, 5])), 0.0);
    }

    #[test]
    fn fig1_conditional_min_entropy() {
        assert!((cond_min_entropy(&fig1_table(&[0])) - 2.321928094887362).abs() < 1e-12);
        for f in 1..6 {
            assert!((cond_min_entropy(&fig1_table(&[f])) - 1.7369655941662063).abs() < 1e-12);
        }
        assert!((cond_min_entropy(&fig1_table(&[1, 2])) - 1.0).abs() < 1e-12);
        assert!((cond_min_entropy(&fig1_table(&[0, 1])) - 1.3219280948873622).abs() < 1e-12);
    }

    #[test]
    fn fig1_bayes_error() {
        assert!((bayes_error(&fig1_table(&[0])) - 0.8).abs() < 1e-12);
        assert_eq!(bayes_error(&fig1_table(&[1, 2, 3, 4, 5])), 0.0);
    }

    #[test]
    fn bayes_error_min_entropy_identity() {
        let ds = generate_fig1_dataset();
        for mask in 1u32..64 {
            let subset = FeatureSubset::from_indices((0..6).filter(|i| mask & (1 << i) != 0));
            let t = joint(&ds, &subset).unwrap();
            let b = bayes_error(&t);
            let h = cond_min_entropy(&t);
            assert!((b - (1.0 - (-h).exp2())).abs() < 1e-12);
        }
    }

    #[test]
    fn shannon_mutual_info_fig1() {
        let t = fig1_table(&[0]);
        assert!((mutual_info_shannon(&t) - (LOG2_10 - 2.350977500432694)).abs() < 1e-12);
        // symmetry through the transposed table
        assert!((mutual_info_shannon(&t) - mutual_info_shannon(&t.transposed())).abs() < 1e-9);
    }

    #[test]
    fn min_mutual_info_fig1() {
        let t = fig1_table(&[1]);
        assert!((mutual_info_min(&t) - (LOG2_10 - 1.7369655941662063)).abs() < 1e-12);
    }

    #[test]
    fn independent_feature_gives_zero_mi() {
        // feature constant across rows: independent of the class
        let t = JointTable::from_counts(vec![vec![5, 5]]).unwrap();
        assert_eq!(mutual_info_shannon(&t), 0.0);
        assert_eq!(mutual_info_min(&t), 0.0);
    }

    #[test]
    fn min_mutual_info_is_asymmetric() {
        // brute-force search over tiny 2x3 joints finds a witness
        let mut found = false;
        'outer: for a in 0..4u64 {
            for b in 0..4u64 {
                for c in 0..4u64 {
                    for d in 0..4u64 {
                        for e in 0..4u64 {
                            for f in 0..4u64 {
                                if a + b + c + d + e + f == 0 {
                                    continue;
                                }
                                let t = JointTable::from_counts(vec![vec![a, b, c], vec![d, e, f]]).unwrap();
                                let forward = mutual_info_min(&t);
                                let backward = mutual_info_min(&t.transposed());
                                if (forward - backward).abs() > 1e-6 {
                                    found = true;
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(found, "no asymmetry witness among 2x3 joints");
    }

    #[test]
    fn cond_mutual_info_determined_feature_is_zero() {
        let ds = generate_fig1_dataset();
        // f1..f5 jointly determine every row, so no feature adds information
        let all_but_f0 = FeatureSubset::from_indices(1..6);
        let v = cond_mutual_info_shannon(&ds, 0, &all_but_f0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn cond_mutual_info_empty_subset_reduces_to_mi() {
        let ds = generate_fig1_dataset();
        let direct = mutual_info_shannon(&fig1_table(&[2]));
        let via_empty = cond_mutual_info_shannon(&ds, 2, &FeatureSubset::empty()).unwrap();
        assert!((direct - via_empty).abs() < 1e-12);
    }

    #[test]
    fn cond_mutual_info_f1_given_f0_nonnegative() {
        let ds = generate_fig1_dataset();
        let v = cond_mutual_info_shannon(&ds, 1, &FeatureSubset::from_indices([0])).unwrap();
        let expected = 2.350977500432694 - cond_shannon(&fig1_table(&[0, 1]));
        assert!((v - expected).abs() < 1e-12);
        assert!(v >= 0.0);
    }

    #[test]
    fn cachin_deterministic_is_zero_uniform_is_log() {
        let t = fig1_table(&[1, 2, 3, 4, 5]);
        assert_eq!(cachin_cond_min_entropy(&t), 0.0);
        let u = JointTable::from_counts(vec![vec![2, 2], vec![3, 3]]).unwrap();
        assert!((cachin_cond_min_entropy(&u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cachin_monotonicity_violation() {
        // prior (0.7, 0.3); observable y1 gives posterior (0.5, 0.5), y2 gives (1, 0)
        let t = JointTable::from_counts(vec![vec![3, 3], vec![4, 0]]).unwrap();
        let prior_min_entropy = renyi_entropy(&t.class_marginal(), Order::MinEntropy).unwrap();
        let cachin = cachin_cond_min_entropy(&t);
        let arimoto = cond_min_entropy(&t);
        assert!((cachin - 0.6).abs() < 1e-12);
        assert!((prior_min_entropy - 0.7f64.log2().abs()).abs() < 1e-12);
        assert!(cachin > prior_min_entropy, "Cachin must exceed the prior min-entropy here");
        assert!(arimoto <= prior_min_entropy + 1e-12);
        assert!((arimoto - (-0.7f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn shannon_chain_identity() {
        // H1(C|S) = H1(C,S) - H1(S) on flattened distributions
        let t = fig1_table(&[0, 3]);
        let n = t.n_rows() as f64;
        let mut joint_p = Vec::new();
        let mut tuple_p = Vec::new();
        for tuple in 0..t.tuple_count() {
            tuple_p.push(t.tuple_total(tuple) as f64 / n);
            for class in 0..t.class_count() {
                joint_p.push(t.cell(tuple, class) as f64 / n);
            }
        }
        let h_joint = renyi_entropy(&joint_p, Order::Shannon).unwrap();
        let h_tuple = renyi_entropy(&tuple_p, Order::Shannon).unwrap();
        assert!((cond_shannon(&t) - (h_joint - h_tuple)).abs() < 1e-9);
    }

    #[test]
    fn renyi_alpha_limits() {
        let p = [0.6, 0.25, 0.1, 0.05];
        let shannon = renyi_entropy(&p, Order::Shannon).unwrap();
        for a in [0.999, 1.001] {
            let h = renyi_entropy(&p, Order::alpha(a).unwrap()).unwrap();
            assert!((h - shannon).abs() < 1e-3);
        }
        let min = renyi_entropy(&p, Order::MinEntropy).unwrap();
        let h100 = renyi_entropy(&p, Order::alpha(100.0).unwrap()).unwrap();
        assert!((h100 - min).abs() < 1e-2);
    }
}

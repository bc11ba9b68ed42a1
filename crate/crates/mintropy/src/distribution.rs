//! Empirical joint distributions p(class, feature-tuple) over feature subsets.
//!
//! Tables store integer counts, not floats; probabilities are formed at
//! entropy-evaluation time so refinement invariants hold exactly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// An ordered (strictly increasing) set of feature positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    pub fn empty() -> Self {
        FeatureSubset(Vec::new())
    }

    /// Builds a subset from arbitrary indices; sorts and deduplicates.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FeatureSubset(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// Returns the subset with `index` added, or an error if already present.
    pub fn with(&self, index: usize) -> Result<Self> {
        match self.0.binary_search(&index) {
            Ok(_) => Err(Error::DuplicateFeature(index)),
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, index);
                Ok(FeatureSubset(v))
            }
        }
    }

    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        for &i in &self.0 {
            if i >= dataset.n_features() {
                return Err(Error::FeatureOutOfRange { index: i, count: dataset.n_features() });
            }
        }
        Ok(())
    }
}

/// Empirical joint distribution over (feature-value tuple, class).
///
/// Only observed tuples are stored; tuple codes are assigned in row
/// first-appearance order, which makes `extend` and `joint` agree exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    /// counts[tuple_code][class_index]
    counts: Vec<Vec<u64>>,
    /// Feature value codes of each observed tuple, in subset order.
    tuples: Vec<Vec<u32>>,
    /// Tuple code per dataset row; empty for tables built from raw counts.
    row_codes: Vec<u32>,
    subset: FeatureSubset,
    class_count: usize,
    n_rows: u64,
}

impl JointTable {
    /// Builds a table directly from a (tuple x class) count matrix.
    ///
    /// Such tables are detached from any dataset and cannot be extended.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        if counts.is_empty() || counts[0].is_empty() {
            return Err(Error::InvalidDistribution("empty count matrix".into()));
        }
        let class_count = counts[0].len();
        if counts.iter().any(|row| row.len() != class_count) {
            return Err(Error::InvalidDistribution("ragged count matrix".into()));
        }
        let n_rows: u64 = counts.iter().flatten().sum();
        if n_rows == 0 {
            return Err(Error::InvalidDistribution("all counts zero".into()));
        }
        let tuples = (0..counts.len()).map(|t| vec![t as u32]).collect();
        Ok(JointTable {
            counts,
            tuples,
            row_codes: Vec::new(),
            subset: FeatureSubset::empty(),
            class_count,
            n_rows,
        })
    }

    /// Swaps the roles of tuple and class. The result is detached.
    pub fn transposed(&self) -> JointTable {
        let tuple_count = self.counts.len();
        let mut counts = vec![vec![0u64; tuple_count]; self.class_count];
        for (t, row) in self.counts.iter().enumerate() {
            for (c, &n) in row.iter().enumerate() {
                counts[c][t] = n;
            }
        }
        let tuples = (0..self.class_count).map(|c| vec![c as u32]).collect();
        JointTable {
            counts,
            tuples,
            row_codes: Vec::new(),
            subset: FeatureSubset::empty(),
            class_count: tuple_count,
            n_rows: self.n_rows,
        }
    }

    pub fn n_rows(&self) -> u64 {
        self.n_rows
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn tuple_count(&self) -> usize {
        self.counts.len()
    }

    pub fn subset(&self) -> &FeatureSubset {
        &self.subset
    }

    /// Count in cell (tuple, class).
    pub fn cell(&self, tuple: usize, class: usize) -> u64 {
        self.counts[tuple][class]
    }

    /// Total count of one tuple across classes.
    pub fn tuple_total(&self, tuple: usize) -> u64 {
        self.counts[tuple].iter().sum()
    }

    /// Feature value codes of an observed tuple, in subset order.
    pub fn tuple_values(&self, tuple: usize) -> &[u32] {
        &self.tuples[tuple]
    }

    /// Cells in ascending (tuple-code, class-index) order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(t, row)| row.iter().enumerate().map(move |(c, &n)| (t, c, n)))
    }

    /// Class marginal as probabilities; sums to 1.
    pub fn class_marginal(&self) -> Vec<f64> {
        let mut totals = vec![0u64; self.class_count];
        for row in &self.counts {
            for (c, &n) in row.iter().enumerate() {
                totals[c] += n;
            }
        }
        totals.iter().map(|&n| n as f64 / self.n_rows as f64).collect()
    }

    /// Refines the table by one extra feature in O(n_rows).
    pub fn extend(&self, dataset: &Dataset, new_feature: usize) -> Result<JointTable> {
        if new_feature >= dataset.n_features() {
            return Err(Error::FeatureOutOfRange { index: new_feature, count: dataset.n_features() });
        }
        if self.subset.contains(new_feature) {
            return Err(Error::DuplicateFeature(new_feature));
        }
        if self.row_codes.len() != self.n_rows as usize {
            return Err(Error::DetachedTable);
        }
        let column = &dataset.features[new_feature].values;
        let subset = self.subset.with(new_feature)?;
        // position of the new feature within the extended ordered subset
        let insert_at = subset.indices().iter().position(|&i| i == new_feature).unwrap();

        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut counts: Vec<Vec<u64>> = Vec::new();
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        let mut row_codes = Vec::with_capacity(self.row_codes.len());
        for (row, &parent) in self.row_codes.iter().enumerate() {
            let value = column[row];
            let code = *index.entry((parent, value)).or_insert_with(|| {
                let mut tuple = self.tuples[parent as usize].clone();
                tuple.insert(insert_at, value);
                tuples.push(tuple);
                counts.push(vec![0; self.class_count]);
                (tuples.len() - 1) as u32
            });
            counts[code as usize][dataset.labels[row] as usize] += 1;
            row_codes.push(code);
        }
        Ok(JointTable {
            counts,
            tuples,
            row_codes,
            subset,
            class_count: self.class_count,
            n_rows: self.n_rows,
        })
    }
}

/// Joint table over the empty subset: one tuple aggregating every row, so
/// conditioning on it reduces to the unconditional class distribution.
fn empty_joint(dataset: &Dataset) -> JointTable {
    let class_count = dataset.class_count();
    let mut counts = vec![vec![0u64; class_count]];
    for &label in &dataset.labels {
        counts[0][label as usize] += 1;
    }
    JointTable {
        counts,
        tuples: vec![Vec::new()],
        row_codes: vec![0; dataset.n_rows()],
        subset: FeatureSubset::empty(),
        class_count,
        n_rows: dataset.n_rows() as u64,
    }
}

/// Empirical joint distribution of (subset tuple, class) over the dataset.
pub fn joint(dataset: &Dataset, subset: &FeatureSubset) -> Result<JointTable> {
    subset.validate(dataset)?;
    let mut table = empty_joint(dataset);
    for &feature in subset.indices() {
        table = table.extend(dataset, feature)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_fig1_dataset, random_dataset};

    #[test]
    fn fig1_f0_cells() {
        let ds = generate_fig1_dataset();
        let t = joint(&ds, &FeatureSubset::from_indices([0])).unwrap();
        assert_eq!(t.tuple_count(), 2);
        for c in 0..4 {
            assert_eq!(t.cell(0, c), 1); // p(A, c) = 1/10
            assert_eq!(t.cell(1, c), 0);
        }
        for c in 4..10 {
            assert_eq!(t.cell(1, c), 1); // p(B, c) = 1/10
            assert_eq!(t.cell(0, c), 0);
        }
    }

    #[test]
    fn empty_subset_aggregates_all_rows() {
        let ds = generate_fig1_dataset();
        let t = joint(&ds, &FeatureSubset::empty()).unwrap();
        assert_eq!(t.tuple_count(), 1);
        assert_eq!(t.tuple_total(0), 10);
        assert_eq!(t.class_marginal(), vec![0.1; 10]);
    }

    #[test]
    fn fig1_f1_f2_observed_tuples() {
        let ds = generate_fig1_dataset();
        let t = joint(&ds, &FeatureSubset::from_indices([1, 2])).unwrap();
        // exactly (C,F),(D,F),(E,G),(E,H),(E,F) under first-appearance codes
        let mut tuples: Vec<Vec<u32>> = (0..t.tuple_count()).map(|i| t.tuple_values(i).to_vec()).collect();
        tuples.sort();
        assert_eq!(tuples, vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn extend_from_empty_is_joint() {
        let ds = generate_fig1_dataset();
        let base = joint(&ds, &FeatureSubset::empty()).unwrap();
        let ext = base.extend(&ds, 3).unwrap();
        let direct = joint(&ds, &FeatureSubset::from_indices([3])).unwrap();
        assert_eq!(ext, direct);
    }

    #[test]
    fn extend_f1_by_f0() {
        let ds = generate_fig1_dataset();
        let t = joint(&ds, &FeatureSubset::from_indices([1])).unwrap();
        let ext = t.extend(&ds, 0).unwrap();
        assert_eq!(ext.tuple_count(), 4); // (C,A),(D,A),(E,A),(E,B) as (f0,f1) pairs
        // refinement conservation: child totals per parent equal parent totals
        for parent in 0..t.tuple_count() {
            let parent_total = t.tuple_total(parent);
            let child_total: u64 = (0..ext.tuple_count())
                .filter(|&i| ext.tuple_values(i)[1] == t.tuple_values(parent)[0])
                .map(|i| ext.tuple_total(i))
                .sum();
            assert_eq!(parent_total, child_total);
        }
    }

    #[test]
    fn extend_rejects_duplicate() {
        let ds = generate_fig1_dataset();
        let t = joint(&ds, &FeatureSubset::from_indices([1])).unwrap();
        assert!(matches!(t.extend(&ds, 1), Err(Error::DuplicateFeature(1))));
    }

    #[test]
    fn extend_matches_scratch_on_random_data() {
        let ds = random_dataset(60, 5, 3, 3, 7);
        for mask in 0u32..32 {
            let subset = FeatureSubset::from_indices((0..5).filter(|i| mask & (1 << i) != 0));
            let scratch = joint(&ds, &subset).unwrap();
            // grow one feature at a time in a different insertion order
            let mut grown = joint(&ds, &FeatureSubset::empty()).unwrap();
            for &f in subset.indices().iter().rev() {
                grown = grown.extend(&ds, f).unwrap();
            }
            // counts must agree per tuple value (codes may differ by order)
            let key = |t: &JointTable| {
                let mut v: Vec<(Vec<u32>, Vec<u64>)> = (0..t.tuple_count())
                    .map(|i| (t.tuple_values(i).to_vec(), (0..t.class_count()).map(|c| t.cell(i, c)).collect()))
                    .collect();
                v.sort();
                v
            };
            assert_eq!(key(&scratch), key(&grown));
        }
    }

    #[test]
    fn chain_rule_exact_on_counts() {
        // p(x,y) = p(y) p(x|y) cross-multiplied on integer counts
        let ds = random_dataset(50, 4, 4, 3, 11);
        let t = joint(&ds, &FeatureSubset::from_indices([0, 2])).unwrap();
        let n = t.n_rows();
        let mut grand_total = 0u64;
        let mut class_totals = vec![0u64; t.class_count()];
        for tuple in 0..t.tuple_count() {
            let n_t = t.tuple_total(tuple);
            let mut row_sum = 0u64;
            for (c, total) in class_totals.iter_mut().enumerate() {
                let n_tc = t.cell(tuple, c);
                assert!(n_tc <= n_t);
                row_sum += n_tc;
                *total += n_tc;
            }
            assert_eq!(row_sum, n_t);
            grand_total += n_t;
        }
        assert_eq!(grand_total, n);
        // class marginal of the joint equals the label frequency
        for (c, &total) in class_totals.iter().enumerate() {
            let freq = ds.labels.iter().filter(|&&l| l as usize == c).count() as u64;
            assert_eq!(total, freq);
        }
    }

    #[test]
    fn from_counts_rejects_degenerate() {
        assert!(JointTable::from_counts(vec![]).is_err());
        assert!(JointTable::from_counts(vec![vec![0, 0]]).is_err());
        assert!(JointTable::from_counts(vec![vec![1, 2], vec![3]]).is_err());
    }

    #[test]
    fn detached_table_cannot_extend() {
        let ds = generate_fig1_dataset();
        let t = JointTable::from_counts(vec![vec![3, 3], vec![4, 0]]).unwrap();
        assert!(matches!(t.extend(&ds, 0), Err(Error::DetachedTable)));
    }
}

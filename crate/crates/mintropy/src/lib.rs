//! Feature selection over conditional Renyi min-entropy and Shannon entropy.
//!
//! The crate splits into:
//! - [`dataset`]: loading, validation, discretization, generated examples
//! - [`distribution`]: empirical joint tables over feature subsets
//! - [`entropy`]: the Renyi family, conditional variants, Bayes error
//! - [`selection`]: greedy forward selection with pluggable criteria
//! - [`oracle`]: exact exhaustive search and brute-force reference scores
//! - [`eval`]: classifiers, bootstrap splits, accuracy curves
//!
//! Hot loops (candidate scoring, subset enumeration, bootstrap splits) run
//! data-parallel under the default `parallel` feature and fall back to
//! sequential execution without it; results are identical either way.

pub mod dataset;
pub mod distribution;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod oracle;
pub mod par;
pub mod selection;

pub use dataset::{generate_fig1_dataset, load_csv, load_sparse, BinMethod, BinningSpec, Dataset};
pub use distribution::{joint, FeatureSubset, JointTable};
pub use entropy::{
    bayes_error, cachin_cond_min_entropy, cond_min_entropy, cond_mutual_info_min,
    cond_mutual_info_shannon, cond_shannon, mutual_info_min, mutual_info_shannon, renyi_entropy,
    Order,
};
pub use error::{Error, Result};
pub use eval::{classify, run_pipeline, ClassifierKind, EvalReport, PipelineConfig};
pub use oracle::{brute_force_score, check_local_optimality, min_set_exact, MinSetOutcome, MinSetResult};
pub use selection::{greedy_select, Criterion, SelectionTrace, StopReason, StopRule};

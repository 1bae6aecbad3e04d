//! Metrics and experiment drivers.

mod cv;
mod domain;
mod metrics;
mod pipeline;
mod stats;

pub use cv::{results_table, run_distant_experiment, run_nested_cv, DistantMode, ExperimentReport, FoldResult};
pub use domain::{run_crossdomain, run_domain_experiment, CrossDomainTable, DomainMode, DomainRow, DomainTable};
pub use metrics::{accuracy, compute_metrics, macro_f1, predict_labels, roc_auc, Metrics, DEFAULT_THRESHOLD};
pub use pipeline::{Experiment, Hyper, ModelSpec, RunOptions, ALPHA_GRID, RHO_GRID};
pub use stats::{paired_t_test, t_two_tailed, PairedTest};

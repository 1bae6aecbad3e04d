use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::metrics::{compute_metrics, Metrics};
use super::pipeline::{fit_score, select, with_pool, Experiment, ModelSpec, Split};
use crate::corpus::{Corpus, FoldPlan};
use crate::error::{Error, Result};
use crate::util::{derive_seed, fingerprint};

#[derive(Clone, Debug, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub metrics: Metrics,
    pub params: String,
}

/// Per-fold and mean metrics of one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub config: String,
    pub config_fingerprint: String,
    pub plan_fingerprint: String,
    pub families: Vec<String>,
    pub skipped: Vec<String>,
    pub folds: Vec<FoldResult>,
    pub mean: Metrics,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

impl ExperimentReport {
    pub(crate) fn new(name: &str, config: String, plan_fingerprint: String, folds: Vec<FoldResult>, families: Vec<String>, skipped: Vec<String>) -> Self {
        let mean = Metrics::mean(&folds.iter().map(|f| f.metrics).collect::<Vec<_>>());
        ExperimentReport {
            name: name.to_string(),
            config_fingerprint: fingerprint(config.as_bytes()),
            config,
            plan_fingerprint,
            families,
            skipped,
            folds,
            mean,
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config {} {} {}", self.config_fingerprint, self.name, self.config);
        let _ = writeln!(s, "# plan {}", self.plan_fingerprint);
        if !self.families.is_empty() {
            let _ = writeln!(s, "# families {}", self.families.join(","));
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(s, "# skipped {} (resource not supplied)", self.skipped.join(","));
        }
        s.push_str("fold\tn_train\tn_test\taccuracy\tmacro_f1\troc_auc\tparams\n");
        for f in &self.folds {
            let m = &f.metrics;
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{}\t{}",
                f.fold,
                f.n_train,
                f.n_test,
                m.accuracy,
                m.macro_f1,
                fmt_opt(m.roc_auc),
                f.params
            );
        }
        let m = &self.mean;
        let _ = writeln!(s, "mean\t\t\t{:.6}\t{:.6}\t{}\t", m.accuracy, m.macro_f1, fmt_opt(m.roc_auc));
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn macro_f1s(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.metrics.macro_f1).collect()
    }
}

/// Table with one row per experiment: accuracy and macro-F1 in percent,
/// AUC as a fraction.
pub fn results_table(reports: &[ExperimentReport]) -> String {
    let mut s = String::from("model\taccuracy\tmacro_f1\troc_auc\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{}\t{:.1}\t{:.1}\t{}",
            r.name,
            100.0 * r.mean.accuracy,
            100.0 * r.mean.macro_f1,
            r.mean.roc_auc.map_or_else(|| "NA".into(), |a| format!("{a:.3}"))
        );
    }
    s
}

fn check_plan(corpus: &Corpus, plan: &FoldPlan) -> Result<()> {
    if plan.doc_ids.len() != corpus.len() || plan.doc_ids.iter().zip(&corpus.documents).any(|(a, d)| *a != d.id) {
        return Err(Error::Config("fold plan does not match the corpus document order".into()));
    }
    Ok(())
}

/// How distant-supervision documents join the annotated training data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistantMode {
    /// annotated data only
    Annotated,
    /// distant documents appended to every training set
    Pooling,
    /// appended, with annotated and distant as two EasyAdapt domains
    EasyAdapt,
}

impl DistantMode {
    pub fn name(self) -> &'static str {
        match self {
            DistantMode::Annotated => "annotated",
            DistantMode::Pooling => "pooling",
            DistantMode::EasyAdapt => "easyadapt",
        }
    }
}

impl std::str::FromStr for DistantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "annotated" | "baseline" => Ok(DistantMode::Annotated),
            "pooling" => Ok(DistantMode::Pooling),
            "easyadapt" => Ok(DistantMode::EasyAdapt),
            other => Err(Error::Config(format!("unknown distant mode {other:?}"))),
        }
    }
}

pub(crate) const ANNOTATED_TAG: &str = "annotated";
pub(crate) const DISTANT_TAG: &str = "distant";

/// Nested cross-validation with optional extra training data appended to
/// every (inner and outer) training set.
#[allow(clippy::too_many_arguments)]
pub(crate) fn nested(exp: &Experiment, corpus: &Corpus, tag: &str, plan: &FoldPlan, extra: Option<&Split>, adapt: Option<&[String]>, name: &str, config: String) -> Result<ExperimentReport> {
    check_plan(corpus, plan)?;
    let run_fold = |k: usize| -> Result<(FoldResult, Vec<String>, Vec<String>)> {
        let seed = derive_seed(exp.options.seed, &format!("outer{k}"));
        let train_idx = plan.outer_train(k);
        let test_idx = plan.outer_test(k);
        let with_extra = |idx: &[usize]| -> Result<Split> {
            let mut s = Split::subset(corpus, idx, tag);
            if let Some(e) = extra.filter(|e| !e.corpus.is_empty()) {
                s.append(e)?;
            }
            Ok(s)
        };
        let inner: Vec<(Split, Split)> = match exp.model {
            ModelSpec::LogReg { .. } => {
                let folds = plan.inner_folds(k);
                (0..folds.len())
                    .map(|j| {
                        let tr: Vec<usize> = folds.iter().enumerate().filter(|&(i, _)| i != j).flat_map(|(_, f)| f.iter().copied()).collect();
                        let mut tr_sorted = tr;
                        tr_sorted.sort_unstable();
                        Ok((with_extra(&tr_sorted)?, Split::subset(corpus, &folds[j], tag)))
                    })
                    .collect::<Result<_>>()?
            }
            _ => Vec::new(),
        };
        let hyper = select(exp, &inner, adapt, seed)?;
        let train = with_extra(&train_idx)?;
        let test = Split::subset(corpus, &test_idx, tag);
        let fit = fit_score(exp, &train, &test, adapt, hyper, seed)?;
        let metrics = compute_metrics(&test.labels()?, &fit.scores, exp.options.threshold)?;
        Ok((
            FoldResult {
                fold: k,
                n_train: train.corpus.len(),
                n_test: test.corpus.len(),
                metrics,
                params: hyper.describe(),
            },
            fit.families,
            fit.skipped,
        ))
    };
    let results: Vec<_> = with_pool(exp.options.jobs, || {
        (0..plan.n_outer).into_par_iter().map(run_fold).collect::<Result<Vec<_>>>()
    })??;
    let families = results.first().map(|r| r.1.clone()).unwrap_or_default();
    let skipped = results.first().map(|r| r.2.clone()).unwrap_or_default();
    let folds = results.into_iter().map(|r| r.0).collect();
    Ok(ExperimentReport::new(name, config, fingerprint(plan.to_tsv().as_bytes()), folds, families, skipped))
}


/// Outer folds of `plan` for evaluation; for logistic regression each outer
/// training set is grid-searched over its inner folds, then refit.
pub fn run_nested_cv(corpus: &Corpus, plan: &FoldPlan, exp: &Experiment) -> Result<ExperimentReport> {
    let config = exp.describe();
    nested(exp, corpus, ANNOTATED_TAG, plan, None, None, exp.model.name(), config)
}

/// Nested CV on the annotated corpus with distant documents added to every
/// training set according to `mode`. Test folds stay annotated-only.
pub fn run_distant_experiment(annotated: &Corpus, distant: &Corpus, mode: DistantMode, plan: &FoldPlan, exp: &Experiment) -> Result<ExperimentReport> {
    if distant.is_empty() && mode != DistantMode::Annotated {
        return Err(Error::Ingestion("distant corpus is empty".into()));
    }
    distant.labels()?;
    let config = format!("{} distant_mode={} distant_docs={}", exp.describe(), mode.name(), distant.len());
    let name = format!("distant-{}", mode.name());
    let extra = Split::new(distant.clone(), DISTANT_TAG);
    let domains = vec![ANNOTATED_TAG.to_string(), DISTANT_TAG.to_string()];
    match mode {
        DistantMode::Annotated => nested(exp, annotated, ANNOTATED_TAG, plan, None, None, &name, config),
        DistantMode::Pooling => nested(exp, annotated, ANNOTATED_TAG, plan, Some(&extra), None, &name, config),
        DistantMode::EasyAdapt => nested(exp, annotated, ANNOTATED_TAG, plan, Some(&extra), Some(&domains), &name, config),
    }
}

use std::collections::HashSet;
use std::sync::Arc;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::features::{easyadapt, FeatureConfig, FeatureVector, Featurizer, Resources};
use crate::models::{train_logreg, train_mfc, train_mlp, LinearModel, LrParams, MlpConfig};
use crate::util::derive_seed;

use super::metrics::{macro_f1, predict_labels, DEFAULT_THRESHOLD};

pub const ALPHA_GRID: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
pub const RHO_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Classifier family and its tuning grid.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Mfc,
    LogReg {
        /// (alpha, rho) pairs searched by inner cross-validation
        grid: Vec<(f64, f64)>,
        max_epochs: usize,
        tol: f64,
    },
    Mlp(MlpConfig),
}

impl ModelSpec {
    pub fn logreg() -> Self {
        let grid = ALPHA_GRID
            .iter()
            .flat_map(|&a| RHO_GRID.iter().map(move |&r| (a, r)))
            .collect();
        ModelSpec::LogReg {
            grid,
            max_epochs: LrParams::default().max_epochs,
            tol: LrParams::default().tol,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Mfc => "mfc",
            ModelSpec::LogReg { .. } => "logreg",
            ModelSpec::Mlp(_) => "mlp",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ModelSpec::Mfc => "mfc".into(),
            ModelSpec::LogReg { grid, max_epochs, tol } => {
                let g: Vec<String> = grid.iter().map(|(a, r)| format!("{a}/{r}")).collect();
                format!("logreg grid={} max_epochs={max_epochs} tol={tol}", g.join(","))
            }
            ModelSpec::Mlp(c) => format!(
                "mlp E={} D={} dropout={} lr={} epochs={} batch={} min_df={}",
                c.embed_dim, c.hidden, c.dropout, c.lr, c.epochs, c.batch_size, c.min_df
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// worker threads for fold-level parallelism
    pub jobs: usize,
    pub threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 42,
            jobs: 1,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// Everything needed to train and score one configuration.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub features: FeatureConfig,
    pub model: ModelSpec,
    pub resources: Arc<Resources>,
    pub options: RunOptions,
}

impl Experiment {
    pub fn describe(&self) -> String {
        format!(
            "features={} model=[{}] seed={} threshold={}",
            self.features.label(),
            self.model.describe(),
            self.options.seed,
            self.options.threshold
        )
    }
}

/// Documents plus the adaptation domain of each.
#[derive(Clone, Debug)]
pub(crate) struct Split {
    pub corpus: Corpus,
    pub tags: Vec<String>,
}

impl Split {
    pub fn new(corpus: Corpus, tag: &str) -> Self {
        let tags = vec![tag.to_string(); corpus.len()];
        Split { corpus, tags }
    }

    pub fn subset(corpus: &Corpus, idx: &[usize], tag: &str) -> Self {
        Split::new(corpus.subset(idx), tag)
    }

    pub fn append(&mut self, other: &Split) -> Result<()> {
        let mut docs = std::mem::take(&mut self.corpus.documents);
        docs.extend(other.corpus.documents.iter().cloned());
        self.corpus = Corpus::new(docs, self.corpus.source_tag.clone())?;
        self.tags.extend(other.tags.iter().cloned());
        Ok(())
    }

    pub fn labels(&self) -> Result<Vec<u8>> {
        self.corpus.labels()
    }

    fn ids(&self) -> impl Iterator<Item = &str> {
        self.corpus.documents.iter().map(|d| d.id.as_str())
    }
}

/// Selected hyperparameters of one fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hyper {
    Fixed,
    Lr { alpha: f64, rho: f64 },
}

impl Hyper {
    pub fn describe(&self) -> String {
        match self {
            Hyper::Fixed => "-".into(),
            Hyper::Lr { alpha, rho } => format!("alpha={alpha},rho={rho}"),
        }
    }
}

/// Rows of a fitted featurizer, EasyAdapt-augmented when `adapt` is set.
pub(crate) struct Design {
    pub featurizer: Featurizer,
    pub train: Vec<FeatureVector<f64>>,
    pub test: Vec<FeatureVector<f64>>,
}

fn augment(rows: Vec<FeatureVector<f64>>, tags: &[String], adapt: Option<&[String]>) -> Result<Vec<FeatureVector<f64>>> {
    match adapt {
        None => Ok(rows),
        Some(domains) => rows.iter().zip(tags).map(|(v, t)| easyadapt(v, t, domains)).collect(),
    }
}

pub(crate) fn design(exp: &Experiment, train: &Split, test: &Split, adapt: Option<&[String]>) -> Result<Design> {
    let featurizer = Featurizer::fit(&train.corpus, &exp.features, exp.resources.clone())?;
    featurizer.check_disjoint(test.ids())?;
    let tr = augment(featurizer.transform_corpus(&train.corpus)?, &train.tags, adapt)?;
    let te = augment(featurizer.transform_corpus(&test.corpus)?, &test.tags, adapt)?;
    Ok(Design {
        featurizer,
        train: tr,
        test: te,
    })
}

fn lr_params(spec: &ModelSpec, alpha: f64, rho: f64, seed: u64) -> LrParams {
    let (max_epochs, tol) = match spec {
        ModelSpec::LogReg { max_epochs, tol, .. } => (*max_epochs, *tol),
        _ => (LrParams::default().max_epochs, LrParams::default().tol),
    };
    LrParams {
        alpha,
        rho,
        seed,
        max_epochs,
        tol,
    }
}

fn score_linear(model: &LinearModel<f64>, rows: &[FeatureVector<f64>]) -> Result<Vec<f64>> {
    rows.iter().map(|x| model.predict_proba(x)).collect()
}

fn words(c: &Corpus) -> Result<Vec<Vec<String>>> {
    c.documents
        .iter()
        .map(|d| Ok(d.tokens()?.iter().map(|t| t.lower.clone()).collect()))
        .collect()
}

/// Output of one train/score round.
pub(crate) struct Fit {
    pub scores: Vec<f64>,
    pub families: Vec<String>,
    pub skipped: Vec<String>,
}

/// Trains on `train` with `hyper` and scores `test`.
pub(crate) fn fit_score(exp: &Experiment, train: &Split, test: &Split, adapt: Option<&[String]>, hyper: Hyper, seed: u64) -> Result<Fit> {
    let seen: HashSet<&str> = train.ids().collect();
    if test.ids().any(|id| seen.contains(id)) {
        return Err(Error::Leakage("a test document is also in the training set".into()));
    }
    let y = train.labels()?;
    match &exp.model {
        ModelSpec::Mfc => {
            let m = train_mfc(&y)?;
            Ok(Fit {
                scores: vec![m.score(); test.corpus.len()],
                families: Vec::new(),
                skipped: Vec::new(),
            })
        }
        ModelSpec::LogReg { .. } => {
            let (alpha, rho) = match hyper {
                Hyper::Lr { alpha, rho } => (alpha, rho),
                Hyper::Fixed => (LrParams::default().alpha, LrParams::default().rho),
            };
            let d = design(exp, train, test, adapt)?;
            let (model, _) = train_logreg(&d.train, &y, &lr_params(&exp.model, alpha, rho, seed))?;
            Ok(Fit {
                scores: score_linear(&model, &d.test)?,
                families: d.featurizer.families().iter().map(|f| f.to_string()).collect(),
                skipped: d.featurizer.skipped().iter().map(|f| f.to_string()).collect(),
            })
        }
        ModelSpec::Mlp(cfg) => {
            let cfg = MlpConfig { seed, ..*cfg };
            let model = train_mlp::<f64, String>(&words(&train.corpus)?, &y, &cfg)?;
            Ok(Fit {
                scores: words(&test.corpus)?.iter().map(|w| model.predict_proba(w)).collect(),
                families: vec!["words".into()],
                skipped: Vec::new(),
            })
        }
    }
}

/// Grid search by mean macro-F1 over the `inner` (train, test) pairs; ties
/// keep the earlier grid point. Pairs whose training side has one class are
/// skipped.
pub(crate) fn select(exp: &Experiment, inner: &[(Split, Split)], adapt: Option<&[String]>, seed: u64) -> Result<Hyper> {
    let ModelSpec::LogReg { grid, .. } = &exp.model else {
        return Ok(Hyper::Fixed);
    };
    if grid.len() == 1 {
        return Ok(Hyper::Lr {
            alpha: grid[0].0,
            rho: grid[0].1,
        });
    }
    let mut totals = vec![0.0; grid.len()];
    let mut used = 0usize;
    for (k, (tr, te)) in inner.iter().enumerate() {
        let y = tr.labels()?;
        if te.corpus.is_empty() || y.iter().all(|&l| l == y[0]) {
            continue;
        }
        let yt = te.labels()?;
        let d = design(exp, tr, te, adapt)?;
        for (g, &(alpha, rho)) in grid.iter().enumerate() {
            let p = lr_params(&exp.model, alpha, rho, derive_seed(seed, &format!("inner{k}")));
            let (m, _) = train_logreg(&d.train, &y, &p)?;
            let pred = predict_labels(&score_linear(&m, &d.test)?, exp.options.threshold);
            totals[g] += macro_f1(&yt, &pred);
        }
        used += 1;
    }
    if used == 0 {
        let d = LrParams::default();
        return Ok(Hyper::Lr {
            alpha: d.alpha,
            rho: d.rho,
        });
    }
    let mut best = 0;
    for g in 1..grid.len() {
        if totals[g] > totals[best] {
            best = g;
        }
    }
    Ok(Hyper::Lr {
        alpha: grid[best].0,
        rho: grid[best].1,
    })
}

/// Runs `f` on a pool of `jobs` threads.
pub(crate) fn with_pool<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use complaint_core::analysis::{cohen_kappa, correlation_report, AnalysisFamily, SIGNIFICANCE};
use complaint_core::clusters::{similarity_graph, spectral_cluster, ClusterMap, EmbeddingTable};
use complaint_core::corpus::{
    ingest_distant, load_corpus, plan_nested_folds, save_corpus, Corpus, FoldPlan, DEFAULT_TRIGGER_HASHTAGS,
};
use complaint_core::eval::{
    paired_t_test, results_table, run_crossdomain, run_distant_experiment, run_domain_experiment, run_nested_cv,
    DistantMode, DomainMode, DomainTable, Experiment, ExperimentReport, ModelSpec, RunOptions,
};
use complaint_core::features::{build_vocab, matrix_to_text, FeatureConfig, Featurizer, MarkerLexica, Resources, SentimentLexica};
use complaint_core::lexicons::Lexicon;
use complaint_core::models::{
    train_logreg, train_mfc, train_mlp, LrParams, MlpConfig, Model, ModelKind, MODEL_FORMAT_VERSION,
};
use complaint_core::textproc::{train_pos_tagger, TaggerModel, TAGGER_HEADER};
use complaint_core::Error;

mod config;

use config::RunConfig;

fn version_text() -> String {
    format!(
        "complaints {} (model format {MODEL_FORMAT_VERSION}, tagger format \"{TAGGER_HEADER}\")",
        env!("CARGO_PKG_VERSION")
    )
}

/// Complaint identification in short social-media texts.
#[derive(Parser, Debug)]
#[command(name = "complaints", disable_version_flag = true)]
struct Cli {
    /// `key = value` configuration file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads for fold-level parallelism
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// validate configuration and resources, then stop
    #[arg(long, global = true)]
    dry_run: bool,
    /// print toolkit and file format versions
    #[arg(long, short = 'V')]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the feature matrix of a corpus
    Featurize {
        #[command(flatten)]
        io: CorpusOut,
        #[command(flatten)]
        feats: FeatArgs,
    },
    /// Fit one model on a whole corpus and save it
    Train {
        #[command(flatten)]
        io: CorpusOut,
        #[command(flatten)]
        feats: FeatArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Nested cross-validation report
    Cv {
        #[command(flatten)]
        io: CorpusOut,
        #[command(flatten)]
        feats: FeatArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        folds: FoldArgs,
    },
    /// Annotated-only, pooling and EasyAdapt with distant-supervision data
    Distant {
        #[command(flatten)]
        io: CorpusOut,
        #[command(flatten)]
        feats: FeatArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        folds: FoldArgs,
        /// labeled distant corpus (same format as --corpus)
        #[arg(long)]
        distant: Option<String>,
        /// raw texts carrying a trigger hashtag, one per line
        #[arg(long)]
        distant_pos: Option<String>,
        /// raw texts without complaint hashtags, one per line
        #[arg(long)]
        distant_neg: Option<String>,
        /// comma-separated trigger hashtags
        #[arg(long)]
        hashtags: Option<String>,
        /// annotated | pooling | easyadapt | all
        #[arg(long)]
        mode: Option<String>,
    },
    /// Per-domain macro-F1
    Domains {
        #[command(flatten)]
        io: CorpusOut,
        #[command(flatten)]
        feats: FeatArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        folds: FoldArgs,
        /// in_domain | pooling | easyadapt | all
        #[arg(long)]
        mode: Option<String>,
    },
    /// Train-on-one, test-on-another ROC AUC matrix
    Crossdomain {
        #[command(flatten)]
        io: CorpusOut,
        #[command(flatten)]
        feats: FeatArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Feature-label correlations
    Analyze {
        #[command(flatten)]
        io: CorpusOut,
        #[command(flatten)]
        res: ResourceArgs,
        /// unigrams or a feature family name
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        top: Option<usize>,
    },
    /// Cohen's kappa of two annotation files (`id<TAB>label` lines)
    Kappa { first: PathBuf, second: PathBuf },
    /// Spectral word clusters from embeddings
    Clusters {
        #[command(flatten)]
        io: CorpusOut,
        /// word2vec text format embeddings
        #[arg(long)]
        embeddings: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// most frequent corpus words to cluster
        #[arg(long)]
        max_words: Option<usize>,
    },
    /// Train a tagger (--tagged) or tag a corpus (--corpus with --tagger)
    Tag {
        #[command(flatten)]
        io: CorpusOut,
        /// training sentences, one `word/TAG` sequence per line
        #[arg(long)]
        tagged: Option<String>,
        #[arg(long)]
        tagger: Option<String>,
        #[arg(long)]
        epochs: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct CorpusOut {
    #[arg(long)]
    corpus: Option<String>,
    /// primary output file; stdout when absent
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct ResourceArgs {
    /// LIWC-format dictionary
    #[arg(long)]
    liwc: Option<String>,
    #[arg(long)]
    mpqa: Option<String>,
    #[arg(long)]
    nrc: Option<String>,
    /// word valence lexicon for the rule-based scorer
    #[arg(long)]
    valence: Option<String>,
    /// word-to-cluster map
    #[arg(long)]
    clusters: Option<String>,
    /// tagger model; the rule-only tagger is used when absent
    #[arg(long)]
    tagger: Option<String>,
}

#[derive(Args, Debug)]
struct FeatArgs {
    /// comma list of feature families, or `all`
    #[arg(long)]
    features: Option<String>,
    #[command(flatten)]
    res: ResourceArgs,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// mfc | logreg | mlp
    #[arg(long)]
    model: Option<String>,
    /// fixes the penalty strength instead of searching the grid
    #[arg(long)]
    alpha: Option<f64>,
    /// fixes the L1 share instead of searching the grid
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    embed_dim: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    dropout: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
}

#[derive(Args, Debug)]
struct FoldArgs {
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    inner: Option<usize>,
    /// fold plan file to reuse
    #[arg(long)]
    plan: Option<String>,
    /// where to write the fold plan used
    #[arg(long)]
    save_plan: Option<String>,
}

type Pairs = Vec<(&'static str, Option<String>)>;

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

impl CorpusOut {
    fn pairs(&self) -> Pairs {
        vec![("corpus", s(&self.corpus)), ("out", s(&self.out))]
    }
}

impl ResourceArgs {
    fn pairs(&self) -> Pairs {
        vec![
            ("liwc", s(&self.liwc)),
            ("mpqa", s(&self.mpqa)),
            ("nrc", s(&self.nrc)),
            ("valence", s(&self.valence)),
            ("clusters", s(&self.clusters)),
            ("tagger", s(&self.tagger)),
        ]
    }
}

impl FeatArgs {
    fn pairs(&self) -> Pairs {
        let mut p = vec![("features", s(&self.features))];
        p.extend(self.res.pairs());
        p
    }
}

impl ModelArgs {
    fn pairs(&self) -> Pairs {
        vec![
            ("model", s(&self.model)),
            ("alpha", s(&self.alpha)),
            ("rho", s(&self.rho)),
            ("threshold", s(&self.threshold)),
            ("embed_dim", s(&self.embed_dim)),
            ("hidden", s(&self.hidden)),
            ("dropout", s(&self.dropout)),
            ("lr", s(&self.lr)),
            ("epochs", s(&self.epochs)),
            ("batch_size", s(&self.batch_size)),
        ]
    }
}

impl FoldArgs {
    fn pairs(&self) -> Pairs {
        vec![
            ("folds", s(&self.folds)),
            ("inner", s(&self.inner)),
            ("plan", s(&self.plan)),
            ("save_plan", s(&self.save_plan)),
        ]
    }
}

impl Command {
    fn pairs(&self) -> Pairs {
        match self {
            Command::Featurize { io, feats } => [io.pairs(), feats.pairs()].concat(),
            Command::Train { io, feats, model } | Command::Crossdomain { io, feats, model } => {
                [io.pairs(), feats.pairs(), model.pairs()].concat()
            }
            Command::Cv { io, feats, model, folds } => [io.pairs(), feats.pairs(), model.pairs(), folds.pairs()].concat(),
            Command::Distant {
                io,
                feats,
                model,
                folds,
                distant,
                distant_pos,
                distant_neg,
                hashtags,
                mode,
            } => {
                let mut p = [io.pairs(), feats.pairs(), model.pairs(), folds.pairs()].concat();
                p.extend([
                    ("distant", s(distant)),
                    ("distant_pos", s(distant_pos)),
                    ("distant_neg", s(distant_neg)),
                    ("hashtags", s(hashtags)),
                    ("mode", s(mode)),
                ]);
                p
            }
            Command::Domains { io, feats, model, folds, mode } => {
                let mut p = [io.pairs(), feats.pairs(), model.pairs(), folds.pairs()].concat();
                p.push(("mode", s(mode)));
                p
            }
            Command::Analyze { io, res, family, top } => {
                let mut p = [io.pairs(), res.pairs()].concat();
                p.extend([("family", s(family)), ("top", s(top))]);
                p
            }
            Command::Kappa { .. } => Vec::new(),
            Command::Clusters { io, embeddings, k, max_words } => {
                let mut p = io.pairs();
                p.extend([("embeddings", s(embeddings)), ("k", s(k)), ("max_words", s(max_words))]);
                p
            }
            Command::Tag { io, tagged, tagger, epochs } => {
                let mut p = io.pairs();
                p.extend([("tagged", s(tagged)), ("tagger", s(tagger)), ("epochs", s(epochs))]);
                p
            }
        }
    }
}

fn user(msg: impl Into<String>) -> anyhow::Error {
    anyhow::anyhow!(Error::Config(msg.into()))
}

/// Writes `text` to the `out` path, or stdout.
fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match cfg.str("out") {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_lexicon(cfg: &RunConfig, key: &str) -> Result<Option<Lexicon>> {
    cfg.str(key)
        .map(|p| Lexicon::load(p).with_context(|| format!("loading --{key}")))
        .transpose()
}

fn load_resources(cfg: &RunConfig) -> Result<Resources> {
    Ok(Resources {
        liwc: load_lexicon(cfg, "liwc")?,
        sentiment: SentimentLexica {
            mpqa: load_lexicon(cfg, "mpqa")?,
            nrc: load_lexicon(cfg, "nrc")?,
            valence: load_lexicon(cfg, "valence")?,
        },
        clusters: cfg
            .str("clusters")
            .map(|p| ClusterMap::load(p, None).context("loading --clusters"))
            .transpose()?,
        markers: MarkerLexica::default(),
    })
}

fn load_tagger(cfg: &RunConfig) -> Result<TaggerModel> {
    match cfg.str("tagger") {
        Some(p) => TaggerModel::load(p).context("loading --tagger"),
        None => Ok(TaggerModel::rule_only()),
    }
}

/// Loads, tokenizes and, when `tag` is set, POS-tags a corpus.
fn prepare(path: &str, tagger: Option<&TaggerModel>) -> Result<Corpus> {
    let mut c = load_corpus(path).with_context(|| format!("loading corpus {path}"))?;
    prepare_loaded(&mut c, tagger)?;
    Ok(c)
}

fn prepare_loaded(c: &mut Corpus, tagger: Option<&TaggerModel>) -> Result<()> {
    c.tokenize();
    if let Some(t) = tagger {
        c.tag(t)?;
    }
    Ok(())
}

fn feature_config(cfg: &RunConfig) -> Result<FeatureConfig> {
    Ok(FeatureConfig::parse(cfg.str("features").unwrap_or("bow"))?)
}

fn needs_tags(fc: &FeatureConfig) -> bool {
    fc.families.iter().any(|f| f.needs_tags())
}

fn mlp_config(cfg: &RunConfig) -> Result<MlpConfig> {
    let d = MlpConfig::default();
    Ok(MlpConfig {
        embed_dim: cfg.get_or("embed_dim", d.embed_dim)?,
        hidden: cfg.get_or("hidden", d.hidden)?,
        dropout: cfg.get_or("dropout", d.dropout)?,
        lr: cfg.get_or("lr", d.lr)?,
        epochs: cfg.get_or("epochs", d.epochs)?,
        batch_size: cfg.get_or("batch_size", d.batch_size)?,
        seed: cfg.get_or("seed", d.seed)?,
        ..d
    })
}

fn model_spec(cfg: &RunConfig) -> Result<ModelSpec> {
    let kind: ModelKind = cfg.get_or("model", ModelKind::LogReg)?;
    Ok(match kind {
        ModelKind::Mfc => ModelSpec::Mfc,
        ModelKind::Mlp => ModelSpec::Mlp(mlp_config(cfg)?),
        ModelKind::LogReg => {
            let mut spec = ModelSpec::logreg();
            let alpha: Option<f64> = cfg.get("alpha")?;
            let rho: Option<f64> = cfg.get("rho")?;
            if let ModelSpec::LogReg { grid, .. } = &mut spec {
                grid.retain(|&(a, r)| alpha.is_none_or(|x| x == a) && rho.is_none_or(|x| x == r));
                if grid.is_empty() {
                    *grid = vec![(alpha.unwrap_or(LrParams::default().alpha), rho.unwrap_or(LrParams::default().rho))];
                }
            }
            spec
        }
    })
}

fn experiment(cfg: &RunConfig, resources: Resources) -> Result<Experiment> {
    let threshold: f64 = cfg.get_or("threshold", RunOptions::default().threshold)?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(user(format!("threshold {threshold} outside [0, 1]")));
    }
    Ok(Experiment {
        features: feature_config(cfg)?,
        model: model_spec(cfg)?,
        resources: Arc::new(resources),
        options: RunOptions {
            seed: cfg.get_or("seed", RunOptions::default().seed)?,
            jobs: cfg.get_or("jobs", RunOptions::default().jobs)?,
            threshold,
        },
    })
}

/// Corpus prepared for `exp`: tagged when a selected family needs tags or a
/// tagger was supplied.
fn experiment_corpus(cfg: &RunConfig, exp: &Experiment) -> Result<(Corpus, Option<TaggerModel>)> {
    let tagger = (needs_tags(&exp.features) || cfg.str("tagger").is_some())
        .then(|| load_tagger(cfg))
        .transpose()?;
    let corpus = prepare(cfg.require("corpus")?, tagger.as_ref())?;
    Ok((corpus, tagger))
}

fn fold_plan(cfg: &RunConfig, corpus: &Corpus) -> Result<FoldPlan> {
    let plan = match cfg.str("plan") {
        Some(p) => FoldPlan::load(p, corpus).with_context(|| format!("loading fold plan {p}"))?,
        None => plan_nested_folds(
            corpus,
            cfg.get_or("folds", 10)?,
            cfg.get_or("inner", 3)?,
            cfg.get_or("seed", RunOptions::default().seed)?,
        )?,
    };
    if let Some(p) = cfg.str("save_plan") {
        plan.save(p)?;
    }
    Ok(plan)
}

fn active_families(r: &ExperimentReport) {
    if !r.skipped.is_empty() {
        eprintln!("families skipped for missing resources: {}", r.skipped.join(","));
    }
    if !r.families.is_empty() {
        eprintln!("families active: {}", r.families.join(","));
    }
}

fn cmd_featurize(cfg: &RunConfig, dry: bool) -> Result<()> {
    let resources = Arc::new(load_resources(cfg)?);
    let fc = feature_config(cfg)?;
    let tagger = (needs_tags(&fc) || cfg.str("tagger").is_some()).then(|| load_tagger(cfg)).transpose()?;
    let corpus = prepare(cfg.require("corpus")?, tagger.as_ref())?;
    if dry {
        return Ok(());
    }
    let fz = Featurizer::fit(&corpus, &fc, resources)?;
    let rows = fz.transform_corpus::<f64>(&corpus)?;
    let ids: Vec<&str> = corpus.documents.iter().map(|d| d.id.as_str()).collect();
    emit(cfg, &matrix_to_text(&ids, &rows))?;
    if let Some(out) = cfg.str("out") {
        fz.schema().save(format!("{out}.schema"))?;
    }
    Ok(())
}

fn cmd_train(cfg: &RunConfig, dry: bool) -> Result<()> {
    let out = cfg.require("out")?.to_string();
    let exp = experiment(cfg, load_resources(cfg)?)?;
    let (corpus, _) = experiment_corpus(cfg, &exp)?;
    if dry {
        return Ok(());
    }
    let y = corpus.labels()?;
    let model = match &exp.model {
        ModelSpec::Mfc => Model::Mfc(train_mfc(&y)?),
        ModelSpec::LogReg { grid, max_epochs, tol } => {
            if grid.len() != 1 {
                return Err(user("train needs a fixed --alpha and --rho"));
            }
            let fz = Featurizer::fit(&corpus, &exp.features, exp.resources.clone())?;
            let rows = fz.transform_corpus::<f64>(&corpus)?;
            let params = LrParams {
                alpha: grid[0].0,
                rho: grid[0].1,
                seed: exp.options.seed,
                max_epochs: *max_epochs,
                tol: *tol,
            };
            let (m, report) = train_logreg(&rows, &y, &params)?;
            if !report.converged {
                eprintln!("warning: solver stopped after {} epochs without converging", report.epochs);
            }
            fz.schema().save(format!("{out}.schema"))?;
            Model::LogReg(m)
        }
        ModelSpec::Mlp(c) => {
            let docs: Vec<Vec<&str>> = corpus
                .documents
                .iter()
                .map(|d| Ok(d.tokens()?.iter().map(|t| t.lower.as_str()).collect()))
                .collect::<complaint_core::Result<_>>()?;
            Model::Mlp(train_mlp::<f64, &str>(&docs, &y, c)?)
        }
    };
    model.save(&out)?;
    Ok(())
}

fn cmd_cv(cfg: &RunConfig, dry: bool) -> Result<()> {
    let exp = experiment(cfg, load_resources(cfg)?)?;
    let (corpus, _) = experiment_corpus(cfg, &exp)?;
    let plan = fold_plan(cfg, &corpus)?;
    if dry {
        return Ok(());
    }
    let report = run_nested_cv(&corpus, &plan, &exp)?;
    active_families(&report);
    emit(cfg, &report.to_tsv())
}

fn distant_corpus(cfg: &RunConfig, tagger: Option<&TaggerModel>) -> Result<Corpus> {
    let mut c = match (cfg.str("distant"), cfg.str("distant_pos"), cfg.str("distant_neg")) {
        (Some(p), None, None) => load_corpus(p).with_context(|| format!("loading distant corpus {p}"))?,
        (None, Some(pos), Some(neg)) => {
            let tags: Vec<String> = match cfg.str("hashtags") {
                Some(h) => h.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect(),
                None => DEFAULT_TRIGGER_HASHTAGS.iter().map(|t| t.to_string()).collect(),
            };
            ingest_distant(pos, neg, &tags)?
        }
        _ => return Err(user("give either --distant or both --distant-pos and --distant-neg")),
    };
    prepare_loaded(&mut c, tagger)?;
    Ok(c)
}

fn cmd_distant(cfg: &RunConfig, dry: bool) -> Result<()> {
    let exp = experiment(cfg, load_resources(cfg)?)?;
    let (corpus, tagger) = experiment_corpus(cfg, &exp)?;
    let distant = distant_corpus(cfg, tagger.as_ref())?;
    let plan = fold_plan(cfg, &corpus)?;
    let modes = match cfg.str("mode").unwrap_or("all") {
        "all" => vec![DistantMode::Annotated, DistantMode::Pooling, DistantMode::EasyAdapt],
        m => vec![m.parse::<DistantMode>()?],
    };
    if dry {
        return Ok(());
    }
    let reports = modes
        .iter()
        .map(|&m| run_distant_experiment(&corpus, &distant, m, &plan, &exp))
        .collect::<complaint_core::Result<Vec<_>>>()?;
    if reports.len() == 1 {
        return emit(cfg, &reports[0].to_tsv());
    }
    let mut text = format!("# config {}\n", reports[0].config_fingerprint);
    text.push_str(&results_table(&reports));
    let f1 = |i: usize| reports[i].macro_f1s();
    for (a, b) in [(2, 1), (2, 0), (0, 1)] {
        let line = match paired_t_test(&f1(a), &f1(b)) {
            Ok(t) => format!("{:.6}\t{:.4}\t{:.6}", t.mean_diff, t.t, t.p),
            Err(e) => format!("NA\tNA\tNA\t{e}"),
        };
        let _ = writeln!(text, "# paired t-test {} vs {} (macro-F1 diff, t, p)\t{line}", reports[a].name, reports[b].name);
    }
    emit(cfg, &text)
}

fn domain_rows(tables: &[DomainTable]) -> String {
    let mut s = format!("# config {}\n", complaint_core::fingerprint(tables[0].config.as_bytes()));
    for t in tables {
        for n in &t.notes {
            let _ = writeln!(s, "# note {} {n}", t.mode.name());
        }
    }
    s.push_str("domain\tn_docs");
    for t in tables {
        let _ = write!(s, "\t{}", t.mode.name());
    }
    s.push('\n');
    for (i, row) in tables[0].rows.iter().enumerate() {
        let _ = write!(s, "{}\t{}", row.domain.display_name(), row.n_docs);
        for t in tables {
            let cell = t.rows[i]
                .report
                .as_ref()
                .map_or_else(|| "NA".to_string(), |r| format!("{:.1}", 100.0 * r.mean.macro_f1));
            let _ = write!(s, "\t{cell}");
        }
        s.push('\n');
    }
    s
}

fn cmd_domains(cfg: &RunConfig, dry: bool) -> Result<()> {
    let exp = experiment(cfg, load_resources(cfg)?)?;
    let (corpus, _) = experiment_corpus(cfg, &exp)?;
    let modes = match cfg.str("mode").unwrap_or("all") {
        "all" => DomainMode::ALL.to_vec(),
        m => vec![m.parse::<DomainMode>()?],
    };
    let outer = cfg.get_or("folds", 10)?;
    let inner = cfg.get_or("inner", 3)?;
    if dry {
        return Ok(());
    }
    let tables = modes
        .iter()
        .map(|&m| run_domain_experiment(&corpus, m, &exp, outer, inner))
        .collect::<complaint_core::Result<Vec<_>>>()?;
    for t in &tables {
        for n in &t.notes {
            eprintln!("{}: {n}", t.mode.name());
        }
    }
    emit(cfg, &domain_rows(&tables))
}

fn cmd_crossdomain(cfg: &RunConfig, dry: bool) -> Result<()> {
    let exp = experiment(cfg, load_resources(cfg)?)?;
    let (corpus, _) = experiment_corpus(cfg, &exp)?;
    if dry {
        return Ok(());
    }
    emit(cfg, &run_crossdomain(&corpus, &exp)?.to_tsv())
}

fn cmd_analyze(cfg: &RunConfig, dry: bool) -> Result<()> {
    let resources = Arc::new(load_resources(cfg)?);
    let family: AnalysisFamily = cfg.get_or("family", AnalysisFamily::Unigrams)?;
    let top: usize = cfg.get_or("top", 20)?;
    let tags = match family {
        AnalysisFamily::Features(f) => f.needs_tags(),
        AnalysisFamily::Unigrams => false,
    };
    let tagger = (tags || cfg.str("tagger").is_some()).then(|| load_tagger(cfg)).transpose()?;
    let corpus = prepare(cfg.require("corpus")?, tagger.as_ref())?;
    if dry {
        return Ok(());
    }
    let report = correlation_report(&corpus, family, resources)?;
    if !report.skipped.is_empty() {
        eprintln!("{} constant features skipped", report.skipped.len());
    }
    match cfg.str("out") {
        Some(_) => {
            emit(cfg, &report.to_tsv())?;
            print!("{}", report.render(top, SIGNIFICANCE));
            Ok(())
        }
        None => {
            print!("{}", report.render(top, SIGNIFICANCE));
            Ok(())
        }
    }
}

fn read_annotations(path: &Path) -> Result<Vec<(String, u8)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || (i == 0 && line.starts_with("id\t")) {
            continue;
        }
        let (id, label) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format { line: i + 1, message: "expected id<TAB>label".into() })?;
        let label = match label.trim() {
            "0" => 0,
            "1" => 1,
            other => bail!(Error::Format { line: i + 1, message: format!("label {other:?} is not 0 or 1") }),
        };
        out.push((id.to_string(), label));
    }
    Ok(out)
}

fn cmd_kappa(first: &Path, second: &Path, dry: bool) -> Result<()> {
    let a = read_annotations(first)?;
    let b: std::collections::HashMap<String, u8> = read_annotations(second)?.into_iter().collect();
    let mut la = Vec::with_capacity(a.len());
    let mut lb = Vec::with_capacity(a.len());
    for (id, l) in &a {
        let other = b.get(id).ok_or_else(|| user(format!("document {id:?} missing from {}", second.display())))?;
        la.push(*l);
        lb.push(*other);
    }
    if dry {
        return Ok(());
    }
    println!("n\t{}\nkappa\t{:.6}", la.len(), cohen_kappa(&la, &lb)?);
    Ok(())
}

fn cmd_clusters(cfg: &RunConfig, dry: bool) -> Result<()> {
    let emb: EmbeddingTable<f64> = EmbeddingTable::load(cfg.require("embeddings")?).context("loading --embeddings")?;
    let corpus = prepare(cfg.require("corpus")?, None)?;
    let k: usize = cfg.get_or("k", 200)?;
    let max_words: usize = cfg.get_or("max_words", 3000)?;
    let vocab = build_vocab(&corpus)?;
    let words: Vec<String> = vocab
        .words()
        .iter()
        .filter(|w| emb.get(w).is_some())
        .take(max_words)
        .cloned()
        .collect();
    if k > words.len() {
        return Err(user(format!("k = {k} exceeds the {} words available", words.len())));
    }
    if dry {
        return Ok(());
    }
    let graph = similarity_graph(&emb, &words)?;
    let cm = spectral_cluster(&graph, k, cfg.get_or("seed", RunOptions::default().seed)?)?;
    emit(cfg, &cm.to_text())
}

fn cmd_tag(cfg: &RunConfig, dry: bool) -> Result<()> {
    let seed = cfg.get_or("seed", RunOptions::default().seed)?;
    if let Some(tagged) = cfg.str("tagged") {
        let out = cfg.require("out")?;
        if dry {
            return Ok(());
        }
        let (model, report) = train_pos_tagger(tagged, cfg.get_or("epochs", 10)?, seed)?;
        eprintln!(
            "trained on {} sentences, train accuracy {:.4}{}",
            report.train_sentences,
            report.train_accuracy,
            report.heldout_accuracy.map_or(String::new(), |a| format!(", held-out accuracy {a:.4}"))
        );
        model.save(out)?;
        return Ok(());
    }
    let tagger = load_tagger(cfg)?;
    let mut corpus = load_corpus(cfg.require("corpus")?)?;
    if dry {
        return Ok(());
    }
    corpus.tokenize();
    corpus.tag(&tagger)?;
    for d in &mut corpus.documents {
        let tags = d.tokens()?.iter().map(|t| t.pos.clone().unwrap_or_default()).collect();
        d.pos_tags = Some(tags);
    }
    match cfg.str("out") {
        Some(out) => save_corpus(&corpus, out)?,
        None => complaint_core::corpus::write_corpus(&corpus, std::io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if cli.version {
        println!("{}", version_text());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(user("no subcommand given; see --help"));
    };
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.overlay([("seed", s(&cli.seed)), ("jobs", s(&cli.jobs))]);
    cfg.overlay(command.pairs());
    cfg.set_default("seed", RunOptions::default().seed);
    cfg.set_default("jobs", RunOptions::default().jobs);
    if cfg.get::<usize>("jobs")? == Some(0) {
        return Err(user("--jobs must be at least 1"));
    }
    eprint!("{}", cfg.to_text().lines().map(|l| format!("# {l}\n")).collect::<String>());
    let dry = cli.dry_run;
    match &command {
        Command::Featurize { .. } => cmd_featurize(&cfg, dry)?,
        Command::Train { .. } => cmd_train(&cfg, dry)?,
        Command::Cv { .. } => cmd_cv(&cfg, dry)?,
        Command::Distant { .. } => cmd_distant(&cfg, dry)?,
        Command::Domains { .. } => cmd_domains(&cfg, dry)?,
        Command::Crossdomain { .. } => cmd_crossdomain(&cfg, dry)?,
        Command::Analyze { .. } => cmd_analyze(&cfg, dry)?,
        Command::Kappa { first, second } => cmd_kappa(first, second, dry)?,
        Command::Clusters { .. } => cmd_clusters(&cfg, dry)?,
        Command::Tag { .. } => cmd_tag(&cfg, dry)?,
    }
    if dry {
        eprintln!("dry run: configuration and resources are valid");
    } else if let Some(out) = cfg.str("out") {
        std::fs::write(format!("{out}.config"), cfg.to_text()).map_err(|e| Error::io(out, e))?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_internal() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(2),
    }
}

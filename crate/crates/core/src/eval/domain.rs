use std::fmt::Write as _;

use super::cv::{nested, ExperimentReport};
use super::metrics::roc_auc;
use super::pipeline::{fit_score, select, Experiment, ModelSpec, Split};
use crate::corpus::{plan_nested_folds, plan_stratified, Corpus, Domain};
use crate::error::{Error, Result};
use crate::util::derive_seed;

/// How out-of-domain documents are used when evaluating one domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainMode {
    InDomain,
    Pooling,
    EasyAdapt,
}

impl DomainMode {
    pub const ALL: [DomainMode; 3] = [DomainMode::InDomain, DomainMode::Pooling, DomainMode::EasyAdapt];

    pub fn name(self) -> &'static str {
        match self {
            DomainMode::InDomain => "in_domain",
            DomainMode::Pooling => "pooling",
            DomainMode::EasyAdapt => "easyadapt",
        }
    }
}

impl std::str::FromStr for DomainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in_domain" | "in-domain" | "indomain" => Ok(DomainMode::InDomain),
            "pooling" => Ok(DomainMode::Pooling),
            "easyadapt" => Ok(DomainMode::EasyAdapt),
            other => Err(Error::Config(format!("unknown domain mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainRow {
    pub domain: Domain,
    pub n_docs: usize,
    pub n_complaints: usize,
    /// outer folds actually used
    pub folds: usize,
    /// `None` when the domain cannot be cross-validated
    pub report: Option<ExperimentReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainTable {
    pub mode: DomainMode,
    pub config: String,
    pub rows: Vec<DomainRow>,
    pub notes: Vec<String>,
}

impl DomainTable {
    pub fn macro_f1(&self, d: Domain) -> Option<f64> {
        self.rows.iter().find(|r| r.domain == d)?.report.as_ref().map(|r| r.mean.macro_f1)
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config {} mode={}", crate::util::fingerprint(self.config.as_bytes()), self.mode.name());
        for n in &self.notes {
            let _ = writeln!(s, "# note {n}");
        }
        s.push_str("domain\tn_docs\tcomplaints\tfolds\tmacro_f1\n");
        for r in &self.rows {
            let f1 = r.report.as_ref().map_or_else(|| "NA".into(), |rep| format!("{:.1}", 100.0 * rep.mean.macro_f1));
            let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", r.domain.display_name(), r.n_docs, r.n_complaints, r.folds, f1);
        }
        s
    }
}

fn domain_tags(c: &Corpus) -> Vec<String> {
    c.documents.iter().map(|d| d.domain.slug().to_string()).collect()
}

/// Nested CV inside each domain. `outer` folds are reduced to the smaller
/// class count of a domain; domains with fewer than two documents of either
/// class get no result.
pub fn run_domain_experiment(corpus: &Corpus, mode: DomainMode, exp: &Experiment, outer: usize, inner: usize) -> Result<DomainTable> {
    if corpus.documents.iter().any(|d| d.domain == Domain::Unknown) {
        return Err(Error::Data("per-domain experiments need a domain for every document".into()));
    }
    let labels = corpus.labels()?;
    let domains = corpus.domains();
    let slugs: Vec<String> = domains.iter().map(|d| d.slug().to_string()).collect();
    let config = format!("{} domain_mode={} outer={outer} inner={inner}", exp.describe(), mode.name());
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &d in &domains {
        let (inside, outside): (Vec<usize>, Vec<usize>) = (0..corpus.len()).partition(|&i| corpus.documents[i].domain == d);
        let sub = corpus.subset(&inside);
        let pos = inside.iter().filter(|&&i| labels[i] == 1).count();
        let k = outer.min(pos).min(inside.len() - pos);
        let mut row = DomainRow {
            domain: d,
            n_docs: inside.len(),
            n_complaints: pos,
            folds: k,
            report: None,
        };
        if k < 2 {
            notes.push(format!("{}: too few documents of one class, skipped", d.slug()));
            rows.push(row);
            continue;
        }
        if k < outer {
            notes.push(format!("{}: outer folds reduced from {outer} to {k}", d.slug()));
        }
        let plan = plan_nested_folds(&sub, k, inner, derive_seed(exp.options.seed, d.slug()))?;
        let extra = if mode == DomainMode::InDomain || outside.is_empty() {
            None
        } else {
            let other = corpus.subset(&outside);
            let tags = domain_tags(&other);
            Some(Split { corpus: other, tags })
        };
        let adapt = (mode == DomainMode::EasyAdapt && extra.is_some()).then_some(slugs.as_slice());
        let name = format!("{}-{}", mode.name(), d.slug());
        row.report = Some(nested(exp, &sub, d.slug(), &plan, extra.as_ref(), adapt, &name, config.clone())?);
        rows.push(row);
    }
    Ok(DomainTable { mode, config, rows, notes })
}

/// Train-domain by test-domain AUC matrix plus a row trained on every
/// domain except the test one. Off-diagonal cells only.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossDomainTable {
    pub config: String,
    pub domains: Vec<Domain>,
    /// `cells[i][j]`: trained on domain i, tested on domain j; `None` on the
    /// diagonal and where AUC is undefined
    pub cells: Vec<Vec<Option<f64>>>,
    pub all_row: Vec<Option<f64>>,
}

impl CrossDomainTable {
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config {}", crate::util::fingerprint(self.config.as_bytes()));
        s.push_str("train\\test");
        for d in &self.domains {
            let _ = write!(s, "\t{}", d.display_name());
        }
        s.push('\n');
        let cell = |i: usize, j: usize, v: Option<f64>| {
            if i == j {
                "-".to_string()
            } else {
                v.map_or_else(|| "NA".into(), |a| format!("{:.1}", 100.0 * a))
            }
        };
        for (i, d) in self.domains.iter().enumerate() {
            s.push_str(d.display_name());
            for j in 0..self.domains.len() {
                let _ = write!(s, "\t{}", cell(i, j, self.cells[i][j]));
            }
            s.push('\n');
        }
        s.push_str("All");
        for v in &self.all_row {
            let _ = write!(s, "\t{}", v.map_or_else(|| "NA".into(), |a| format!("{:.1}", 100.0 * a)));
        }
        s.push('\n');
        s
    }
}

const CROSS_INNER: usize = 3;

/// Hyperparameters by inner CV on `train`, refit on all of it, AUC on `test`.
fn train_and_auc(exp: &Experiment, train: &Corpus, test: &Corpus, seed: u64) -> Result<Option<f64>> {
    let y = train.labels()?;
    let yt = test.labels()?;
    let pos = y.iter().filter(|&&l| l == 1).count();
    let tpos = yt.iter().filter(|&&l| l == 1).count();
    if pos == 0 || pos == y.len() || tpos == 0 || tpos == yt.len() {
        return Ok(None);
    }
    let k = CROSS_INNER.min(pos).min(y.len() - pos);
    let tr = Split::new(train.clone(), "train");
    let te = Split::new(test.clone(), "test");
    let inner = if k >= 2 && matches!(exp.model, ModelSpec::LogReg { .. }) {
        let ids: Vec<&str> = train.documents.iter().map(|d| d.id.as_str()).collect();
        let assign = plan_stratified(&y, &ids, k, seed)?;
        (0..k)
            .map(|f| {
                let a: Vec<usize> = (0..y.len()).filter(|&i| assign[i] != f).collect();
                let b: Vec<usize> = (0..y.len()).filter(|&i| assign[i] == f).collect();
                (Split::subset(train, &a, "train"), Split::subset(train, &b, "train"))
            })
            .collect()
    } else {
        Vec::new()
    };
    let hyper = select(exp, &inner, None, seed)?;
    let fit = fit_score(exp, &tr, &te, None, hyper, seed)?;
    Ok(Some(roc_auc(&yt, &fit.scores)?))
}

/// Cross-domain transfer: each domain's model scored on every other domain.
pub fn run_crossdomain(corpus: &Corpus, exp: &Experiment) -> Result<CrossDomainTable> {
    if corpus.documents.iter().any(|d| d.domain == Domain::Unknown) {
        return Err(Error::Data("cross-domain experiments need a domain for every document".into()));
    }
    let domains = corpus.domains();
    if domains.len() < 2 {
        return Err(Error::Data(format!("cross-domain experiments need at least 2 domains, found {}", domains.len())));
    }
    let members: Vec<Vec<usize>> = domains
        .iter()
        .map(|&d| (0..corpus.len()).filter(|&i| corpus.documents[i].domain == d).collect())
        .collect();
    let parts: Vec<Corpus> = members.iter().map(|m| corpus.subset(m)).collect();
    let seed = derive_seed(exp.options.seed, "crossdomain");
    let n = domains.len();
    let cells = super::pipeline::with_pool(exp.options.jobs, || {
        use rayon::prelude::*;
        (0..n * n)
            .into_par_iter()
            .map(|c| {
                let (i, j) = (c / n, c % n);
                if i == j {
                    Ok(None)
                } else {
                    train_and_auc(exp, &parts[i], &parts[j], seed)
                }
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let all_row = (0..n)
        .map(|j| {
            let rest: Vec<usize> = (0..n).filter(|&i| i != j).flat_map(|i| members[i].iter().copied()).collect();
            let mut rest = rest;
            rest.sort_unstable();
            train_and_auc(exp, &corpus.subset(&rest), &parts[j], seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossDomainTable {
        config: exp.describe(),
        domains,
        cells: cells.chunks(n).map(|r| r.to_vec()).collect(),
        all_row,
    })
}

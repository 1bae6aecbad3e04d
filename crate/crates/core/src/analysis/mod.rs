//! Univariate feature-label correlations and annotation agreement.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::eval::t_two_tailed;
use crate::features::{build_vocab, normalize_unit_sum, Family, FeatureConfig, FeatureVector, Featurizer, Resources};

/// Cutoff on the adjusted p-value for the text rendering.
pub const SIGNIFICANCE: f64 = 0.01;

/// Product-moment correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Contract("correlation inputs differ in length".into()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Undefined(format!("correlation needs at least 3 points, got {n}")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("correlation with a constant input".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-tailed p-value of correlation `r` over `n` points.
pub fn pearson_p(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Undefined(format!("p-value needs at least 3 points, got {n}")));
    }
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    t_two_tailed(r * (df / (1.0 - r * r)).sqrt(), df)
}

/// Simes step-up adjustment: sorted ascending, p(i) becomes
/// min over j >= i of m·p(j)/j, capped at 1.
pub fn simes_adjust(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut out = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        // m / j >= 1 exactly, so the product never drops below p[i]
        running = running.min(p[i] * (m as f64 / (rank + 1) as f64));
        out[i] = running.min(1.0);
    }
    out
}

/// Chance-corrected agreement of two binary annotations.
pub fn cohen_kappa(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Contract("annotations differ in length".into()));
    }
    if a.is_empty() {
        return Err(Error::Undefined("kappa of empty annotations".into()));
    }
    if a.iter().chain(b).any(|&l| l > 1) {
        return Err(Error::Data("kappa expects binary labels".into()));
    }
    let n = a.len() as f64;
    let po = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let pa = a.iter().filter(|&&l| l == 1).count() as f64 / n;
    let pb = b.iter().filter(|&&l| l == 1).count() as f64 / n;
    let pe = pa * pb + (1.0 - pa) * (1.0 - pb);
    if pe >= 1.0 {
        return Err(Error::Undefined("kappa undefined when chance agreement is 1".into()));
    }
    Ok((po - pe) / (1.0 - pe))
}

/// Feature set whose members are correlated with the label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalysisFamily {
    /// token frequencies (document frequency at least 2)
    Unigrams,
    Features(Family),
}

impl AnalysisFamily {
    pub fn name(self) -> &'static str {
        match self {
            AnalysisFamily::Unigrams => "unigrams",
            AnalysisFamily::Features(f) => f.name(),
        }
    }
}

impl FromStr for AnalysisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unigrams" | "unigram" | "bow" | "words" => Ok(AnalysisFamily::Unigrams),
            other => Ok(AnalysisFamily::Features(other.parse()?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationEntry {
    pub feature: String,
    pub r: f64,
    pub p: f64,
    pub p_adjusted: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub family: String,
    pub n_docs: usize,
    /// every feature, by descending r (ties by name)
    pub entries: Vec<CorrelationEntry>,
    /// features with constant values, left out
    pub skipped: Vec<String>,
}

impl CorrelationReport {
    /// Top `k` complaint-associated features (r > 0) passing `cutoff`.
    pub fn positive(&self, k: usize, cutoff: f64) -> Vec<&CorrelationEntry> {
        self.entries.iter().filter(|e| e.r > 0.0 && e.p_adjusted < cutoff).take(k).collect()
    }

    /// Top `k` features associated with non-complaints, most negative first.
    pub fn negative(&self, k: usize, cutoff: f64) -> Vec<&CorrelationEntry> {
        self.entries.iter().rev().filter(|e| e.r < 0.0 && e.p_adjusted < cutoff).take(k).collect()
    }

    pub fn get(&self, feature: &str) -> Option<&CorrelationEntry> {
        self.entries.iter().find(|e| e.feature == feature)
    }

    pub fn to_tsv(&self) -> String {
        let mut s = format!("# family {} n={}\n", self.family, self.n_docs);
        if !self.skipped.is_empty() {
            let _ = writeln!(s, "# skipped {} constant features", self.skipped.len());
        }
        s.push_str("feature\tr\tp\tp_adjusted\n");
        for e in &self.entries {
            let _ = writeln!(s, "{}\t{:.6}\t{:.6e}\t{:.6e}", e.feature, e.r, e.p, e.p_adjusted);
        }
        s
    }

    /// Two ranked lists in the layout of a printed table.
    pub fn render(&self, k: usize, cutoff: f64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (n={}, adjusted p < {cutoff})", self.family, self.n_docs);
        let _ = writeln!(s, "\nComplaints");
        for e in self.positive(k, cutoff) {
            let _ = writeln!(s, "  {:<30} {:.3}", e.feature, e.r);
        }
        let _ = writeln!(s, "\nNot complaints");
        for e in self.negative(k, cutoff) {
            let _ = writeln!(s, "  {:<30} {:.3}", e.feature, -e.r);
        }
        s
    }
}

fn unigram_rows(corpus: &Corpus) -> Result<Vec<FeatureVector<f64>>> {
    let vocab = build_vocab(corpus)?;
    corpus
        .documents
        .iter()
        .map(|d| {
            let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
            for t in d.tokens()? {
                if vocab.contains(&t.lower) {
                    *counts.entry(t.lower.as_str()).or_default() += 1.0;
                }
            }
            let mut v = FeatureVector::new("unigrams");
            for (w, c) in counts {
                v.set(w, c);
            }
            Ok(v)
        })
        .collect()
}

/// Per-feature correlation with the label over `rows`, each row first
/// normalized to unit sum.
pub fn correlate(rows: &[FeatureVector<f64>], y: &[u8], family: &str) -> Result<CorrelationReport> {
    if rows.len() != y.len() {
        return Err(Error::Contract("feature rows and labels differ in length".into()));
    }
    let n = rows.len();
    let mut columns: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        for (k, v) in normalize_unit_sum(row).iter() {
            columns.entry(k.to_string()).or_default().push((i, v));
        }
    }
    let yf: Vec<f64> = y.iter().map(|&l| l as f64).collect();
    let cols: Vec<(String, Vec<(usize, f64)>)> = columns.into_iter().collect();
    let results: Vec<(String, Result<f64>)> = cols
        .par_iter()
        .map(|(name, nz)| {
            let mut x = vec![0.0; n];
            for &(i, v) in nz {
                x[i] = v;
            }
            (name.clone(), pearson_r(&x, &yf))
        })
        .collect();
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for (name, r) in results {
        match r {
            Ok(r) => kept.push((name, r)),
            Err(Error::Undefined(_)) => skipped.push(name),
            Err(e) => return Err(e),
        }
    }
    let ps = kept.iter().map(|(_, r)| pearson_p(*r, n)).collect::<Result<Vec<_>>>()?;
    let adj = simes_adjust(&ps);
    let mut entries: Vec<CorrelationEntry> = kept
        .into_iter()
        .zip(ps.into_iter().zip(adj))
        .map(|((feature, r), (p, p_adjusted))| CorrelationEntry {
            feature,
            r,
            p,
            p_adjusted,
            n,
        })
        .collect();
    entries.sort_by(|a, b| b.r.total_cmp(&a.r).then_with(|| a.feature.cmp(&b.feature)));
    Ok(CorrelationReport {
        family: family.to_string(),
        n_docs: n,
        entries,
        skipped,
    })
}

/// Correlations of one feature family, extracted over the whole corpus.
pub fn correlation_report(corpus: &Corpus, family: AnalysisFamily, resources: Arc<Resources>) -> Result<CorrelationReport> {
    let y = corpus.labels()?;
    let rows = match family {
        AnalysisFamily::Unigrams | AnalysisFamily::Features(Family::Bow) => unigram_rows(corpus)?,
        AnalysisFamily::Features(f) => {
            let fz = Featurizer::fit(corpus, &FeatureConfig::new(&[f])?, resources)?;
            fz.transform_corpus(corpus)?
        }
    };
    correlate(&rows, &y, family.name())
}

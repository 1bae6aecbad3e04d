use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::Corpus;
use crate::error::{Error, Result};
use crate::util::{fnv1a, splitmix64};

/// Nested stratified cross-validation assignment.
///
/// Every document carries one outer fold and one inner fold. The inner folds
/// of outer training set `k` are the documents outside fold `k`, grouped by
/// their inner fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub doc_ids: Vec<String>,
    pub outer: Vec<usize>,
    pub inner: Vec<usize>,
    pub n_outer: usize,
    pub n_inner: usize,
    /// `None` for plans read from a file.
    pub seed: Option<u64>,
}

fn seeded_order(ids: &[&str], members: &[usize], seed: u64) -> Vec<usize> {
    let mut keyed: Vec<(u64, usize)> = members
        .iter()
        .map(|&i| (splitmix64(seed ^ fnv1a(ids[i].as_bytes())), i))
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Stratified assignment of `labels` into `k` folds: each class is ordered by
/// a seeded hash of the document id and dealt round-robin, continuing the
/// deal across classes so fold sizes differ by at most one.
pub fn plan_stratified(labels: &[u8], ids: &[&str], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Stratification(format!("need at least 2 folds, got {k}")));
    }
    let mut assignment = vec![0usize; labels.len()];
    let mut counter = 0usize;
    for class in [0u8, 1u8] {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::Stratification(format!(
                "class {class} has {} documents, fewer than {k} folds",
                members.len()
            )));
        }
        for i in seeded_order(ids, &members, seed) {
            assignment[i] = counter % k;
            counter += 1;
        }
    }
    Ok(assignment)
}

/// Plans `outer` stratified folds and, within them, `inner` folds.
pub fn plan_nested_folds(corpus: &Corpus, outer: usize, inner: usize, seed: u64) -> Result<FoldPlan> {
    let labels = corpus.labels()?;
    let ids: Vec<&str> = corpus.documents.iter().map(|d| d.id.as_str()).collect();
    let outer_assign = plan_stratified(&labels, &ids, outer, seed)?;
    if inner < 2 {
        return Err(Error::Stratification(format!("need at least 2 inner folds, got {inner}")));
    }

    // Inner labels are dealt per class in (outer fold, hash) order so every
    // outer training set splits into near-stratified inner folds.
    let inner_seed = splitmix64(seed ^ 0x1);
    let mut inner_assign = vec![0usize; labels.len()];
    let mut counter = 0usize;
    for class in [0u8, 1u8] {
        for fold in 0..outer {
            let members: Vec<usize> = (0..labels.len())
                .filter(|&i| labels[i] == class && outer_assign[i] == fold)
                .collect();
            for i in seeded_order(&ids, &members, inner_seed) {
                inner_assign[i] = counter % inner;
                counter += 1;
            }
        }
    }
    Ok(FoldPlan {
        doc_ids: ids.iter().map(|s| (*s).to_owned()).collect(),
        outer: outer_assign,
        inner: inner_assign,
        n_outer: outer,
        n_inner: inner,
        seed: Some(seed),
    })
}

impl FoldPlan {
    pub fn outer_folds(&self) -> Vec<Vec<usize>> {
        let mut folds = vec![Vec::new(); self.n_outer];
        for (i, &f) in self.outer.iter().enumerate() {
            folds[f].push(i);
        }
        folds
    }

    pub fn outer_test(&self, k: usize) -> Vec<usize> {
        (0..self.outer.len()).filter(|&i| self.outer[i] == k).collect()
    }

    pub fn outer_train(&self, k: usize) -> Vec<usize> {
        (0..self.outer.len()).filter(|&i| self.outer[i] != k).collect()
    }

    /// Inner partition of outer training set `k`, as corpus indices.
    pub fn inner_folds(&self, k: usize) -> Vec<Vec<usize>> {
        let mut folds = vec![Vec::new(); self.n_inner];
        for i in 0..self.outer.len() {
            if self.outer[i] != k {
                folds[self.inner[i]].push(i);
            }
        }
        folds
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.doc_ids.len() {
            let _ = writeln!(s, "{}\t{}\t{}", self.doc_ids[i], self.outer[i], self.inner[i]);
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    /// Parses a plan file against `corpus`; every document must appear exactly once.
    pub fn parse(text: &str, corpus: &Corpus) -> Result<FoldPlan> {
        let index: HashMap<&str, usize> = corpus
            .documents
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.as_str(), i))
            .collect();
        let mut outer = vec![usize::MAX; corpus.len()];
        let mut inner = vec![usize::MAX; corpus.len()];
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fmt_err = |message: String| Error::Format { line: n + 1, message };
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return Err(fmt_err(format!("expected 3 fields, got {}", parts.len())));
            }
            let i = *index
                .get(parts[0])
                .ok_or_else(|| fmt_err(format!("unknown document id {:?}", parts[0])))?;
            if outer[i] != usize::MAX {
                return Err(fmt_err(format!("document {:?} listed twice", parts[0])));
            }
            outer[i] = parts[1].parse().map_err(|_| fmt_err("bad outer fold".into()))?;
            inner[i] = parts[2].parse().map_err(|_| fmt_err("bad inner fold".into()))?;
        }
        if let Some(i) = outer.iter().position(|&f| f == usize::MAX) {
            return Err(Error::Integrity(format!(
                "fold plan does not cover document {:?}",
                corpus.documents[i].id
            )));
        }
        let n_outer = outer.iter().max().map_or(0, |m| m + 1);
        let n_inner = inner.iter().max().map_or(0, |m| m + 1);
        Ok(FoldPlan {
            doc_ids: corpus.documents.iter().map(|d| d.id.clone()).collect(),
            outer,
            inner,
            n_outer,
            n_inner,
            seed: None,
        })
    }

    pub fn load(path: impl AsRef<Path>, corpus: &Corpus) -> Result<FoldPlan> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FoldPlan::parse(&text, corpus)
    }
}

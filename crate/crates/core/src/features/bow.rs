use std::collections::{BTreeMap, HashMap, HashSet};

use super::FeatureVector;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textproc::Token;

/// Minimum number of documents a unit must occur in to be retained.
pub const MIN_DF: usize = 2;

/// Retained units with document frequencies and idf weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Vocab {
    /// by df descending, then lexicographic
    words: Vec<String>,
    df: HashMap<String, usize>,
    idf: HashMap<String, f64>,
    n_docs: usize,
}

impl Vocab {
    /// Builds from per-document unit lists; idf = ln(N/df) + 1.
    pub fn from_units<'a, I, D>(docs: I) -> Result<Vocab>
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = &'a str>,
    {
        let mut df: HashMap<String, usize> = HashMap::new();
        let mut n_docs = 0;
        for doc in docs {
            n_docs += 1;
            let distinct: HashSet<&str> = doc.into_iter().collect();
            for u in distinct {
                *df.entry(u.to_string()).or_insert(0) += 1;
            }
        }
        if n_docs == 0 {
            return Err(Error::Data("cannot build a vocabulary from an empty corpus".into()));
        }
        df.retain(|_, &mut c| c >= MIN_DF);
        let mut words: Vec<String> = df.keys().cloned().collect();
        words.sort_by(|a, b| df[b].cmp(&df[a]).then_with(|| a.cmp(b)));
        let n = n_docs as f64;
        let idf = df.iter().map(|(w, &c)| (w.clone(), (n / c as f64).ln() + 1.0)).collect();
        Ok(Vocab { words, df, idf, n_docs })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn df(&self, w: &str) -> usize {
        self.df.get(w).copied().unwrap_or(0)
    }

    pub fn idf(&self, w: &str) -> Option<f64> {
        self.idf.get(w).copied()
    }

    pub fn contains(&self, w: &str) -> bool {
        self.idf.contains_key(w)
    }

    /// TF-IDF over `units`, L2-normalized, names prefixed by `ns:`.
    pub fn tfidf<T: Scalar>(&self, units: &[&str], ns: &str, schema: &str) -> FeatureVector<T> {
        let mut tf: BTreeMap<&str, usize> = BTreeMap::new();
        for &u in units {
            if self.contains(u) {
                *tf.entry(u).or_insert(0) += 1;
            }
        }
        let raw: Vec<(&str, f64)> = tf.into_iter().map(|(u, c)| (u, c as f64 * self.idf[u])).collect();
        let norm = raw.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        let mut v = FeatureVector::new(schema);
        if norm > 0.0 {
            for (u, x) in raw {
                v.set_f64(format!("{ns}:{u}"), x / norm);
            }
        }
        v
    }
}

pub(crate) fn word_units(tokens: &[Token]) -> Vec<&str> {
    tokens.iter().map(|t| t.lower.as_str()).collect()
}

pub(crate) fn tagged_units(tokens: &[Token]) -> Result<Vec<String>> {
    tokens
        .iter()
        .map(|t| match &t.pos {
            Some(tag) => Ok(format!("{}_{}", t.lower, tag)),
            None => Err(Error::Contract(format!("token {:?} is not POS-tagged", t.surface))),
        })
        .collect()
}

/// Unigram vocabulary of a tokenized corpus.
pub fn build_vocab(corpus: &Corpus) -> Result<Vocab> {
    let docs = corpus.documents.iter().map(|d| d.tokens()).collect::<Result<Vec<_>>>()?;
    Vocab::from_units(docs.iter().map(|t| word_units(t)))
}

/// Vocabulary over `word_TAG` units of a tagged corpus.
pub fn build_pos_vocab(corpus: &Corpus) -> Result<Vocab> {
    let docs = corpus
        .documents
        .iter()
        .map(|d| tagged_units(d.tokens()?))
        .collect::<Result<Vec<_>>>()?;
    Vocab::from_units(docs.iter().map(|u| u.iter().map(String::as_str)))
}

pub fn bow_tfidf<T: Scalar>(tokens: &[Token], vocab: &Vocab, schema: &str) -> FeatureVector<T> {
    vocab.tfidf(&word_units(tokens), "bow", schema)
}

pub fn pos_augmented_unigrams<T: Scalar>(tokens: &[Token], vocab: &Vocab, schema: &str) -> Result<FeatureVector<T>> {
    let units = tagged_units(tokens)?;
    let refs: Vec<&str> = units.iter().map(String::as_str).collect();
    Ok(vocab.tfidf(&refs, "bowpos", schema))
}

/// Relative frequencies of tag unigrams (`pos1:`) and adjacent tag bigrams
/// (`pos2:`), each normalized separately.
pub fn pos_ngram_features<T: Scalar>(tokens: &[Token], schema: &str) -> Result<FeatureVector<T>> {
    let tags = tokens
        .iter()
        .map(|t| {
            t.tag()
                .ok_or_else(|| Error::Contract(format!("token {:?} is not POS-tagged", t.surface)))
        })
        .collect::<Result<Vec<&str>>>()?;
    let mut v = FeatureVector::new(schema);
    let mut uni: BTreeMap<String, usize> = BTreeMap::new();
    for t in &tags {
        *uni.entry(format!("pos1:{t}")).or_insert(0) += 1;
    }
    let mut bi: BTreeMap<String, usize> = BTreeMap::new();
    for w in tags.windows(2) {
        *bi.entry(format!("pos2:{}_{}", w[0], w[1])).or_insert(0) += 1;
    }
    for counts in [uni, bi] {
        let total: usize = counts.values().sum();
        for (k, c) in counts {
            v.set_f64(k, c as f64 / total as f64);
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::tokenize;

    fn vocab(docs: &[&str]) -> Vocab {
        let toks: Vec<Vec<Token>> = docs.iter().map(|d| tokenize(d)).collect();
        Vocab::from_units(toks.iter().map(|t| word_units(t))).unwrap()
    }

    #[test]
    fn df_threshold() {
        let v = vocab(&["a b", "a c"]);
        assert_eq!(v.words(), ["a"]);
        assert_eq!(v.idf("a"), Some(1.0));
        assert!(!v.contains("b"));
    }

    #[test]
    fn ordering_by_df_then_word() {
        let v = vocab(&["b a c", "b a c", "a d", "d"]);
        assert_eq!(v.words(), ["a", "b", "c", "d"]);
        let v = vocab(&["z y", "z y", "z", "x x"]);
        assert_eq!(v.words(), ["z", "y"]);
    }

    #[test]
    fn tfidf_hand_values() {
        let v = vocab(&["a", "a"]);
        let f: FeatureVector<f64> = bow_tfidf(&tokenize("a"), &v, "s");
        assert_eq!(f.get("bow:a"), 1.0);
        assert!(bow_tfidf::<f64>(&tokenize("q"), &v, "s").is_empty());
        // N = 4: df(a) = 4 → idf 1, df(b) = 2 → idf ln 2 + 1
        let v = vocab(&["a b", "a b", "a", "a"]);
        let f: FeatureVector<f64> = bow_tfidf(&tokenize("a a b"), &v, "s");
        let (x, y) = (2.0, 2f64.ln() + 1.0);
        let n = (x * x + y * y).sqrt();
        assert!((f.get("bow:a") - x / n).abs() < 1e-15);
        assert!((f.get("bow:b") - y / n).abs() < 1e-15);
        assert!((f.l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pos_ngrams() {
        let mut toks = tokenize("my account");
        toks[0].pos = Some("PRP$".into());
        toks[1].pos = Some("NN".into());
        let f: FeatureVector<f64> = pos_ngram_features(&toks, "s").unwrap();
        assert_eq!(f.get("pos1:PRP$"), 0.5);
        assert_eq!(f.get("pos1:NN"), 0.5);
        assert_eq!(f.get("pos2:PRP$_NN"), 1.0);
        let f: FeatureVector<f64> = pos_ngram_features(&toks[..1], "s").unwrap();
        assert!(f.names().all(|n| n.starts_with("pos1:")));
        assert!(pos_ngram_features::<f64>(&tokenize("x"), "s").is_err());
    }

    #[test]
    fn bowpos_names() {
        let mut toks = tokenize("bought bought");
        for t in &mut toks {
            t.pos = Some("VBN".into());
        }
        let v = Vocab::from_units([vec!["bought_VBN"], vec!["bought_VBN"]]).unwrap();
        let f: FeatureVector<f64> = pos_augmented_unigrams(&toks, &v, "s").unwrap();
        assert_eq!(f.get("bowpos:bought_VBN"), 1.0);
        assert!(pos_augmented_unigrams::<f64>(&tokenize("bought"), &v, "s").is_err());
    }
}

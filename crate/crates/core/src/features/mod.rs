//! Feature families and their assembly into namespaced sparse vectors.

mod bow;
mod markers;
mod sentiment;
pub mod temporal;
mod vector;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

pub use bow::{build_pos_vocab, build_vocab, bow_tfidf, pos_augmented_unigrams, pos_ngram_features, Vocab, MIN_DF};
pub use markers::{
    complaint_markers, intensifiers, is_request, marker_feature_names, ComplaintMarkers, Intensifiers, MarkerGroup,
    MarkerLexica, TemporalStats,
};
pub use sentiment::{mpqa_scores, nrc_scores, rule_compound, SentimentLexica, NRC_EMOTIONS};
pub use temporal::{recognize_temporal, Granularity, TemporalExpression};
pub use vector::{
    easyadapt, easyadapt_schema, matrix_to_text, normalize_unit_sum, parse_matrix, FeatureSchema, FeatureVector,
};

use crate::clusters::{cluster_features, ClusterMap};
use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::lexicons::Lexicon;
use crate::scalar::Scalar;
use crate::textproc::KNOWN_TAGS;
use crate::util::fingerprint;

/// A selectable feature family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Bow,
    BowPos,
    Pos,
    Liwc,
    Clusters,
    Mpqa,
    Nrc,
    Vader,
    Request,
    Intensifiers,
    Downgraders,
    Temporal,
    Pronouns,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::Bow,
        Family::BowPos,
        Family::Pos,
        Family::Liwc,
        Family::Clusters,
        Family::Mpqa,
        Family::Nrc,
        Family::Vader,
        Family::Request,
        Family::Intensifiers,
        Family::Downgraders,
        Family::Temporal,
        Family::Pronouns,
    ];
    pub const SENTIMENT: [Family; 3] = [Family::Mpqa, Family::Nrc, Family::Vader];
    pub const COMPLAINT: [Family; 5] = [
        Family::Request,
        Family::Intensifiers,
        Family::Downgraders,
        Family::Temporal,
        Family::Pronouns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bow => "bow",
            Family::BowPos => "bowpos",
            Family::Pos => "pos",
            Family::Liwc => "liwc",
            Family::Clusters => "clusters",
            Family::Mpqa => "mpqa",
            Family::Nrc => "nrc",
            Family::Vader => "vader",
            Family::Request => "request",
            Family::Intensifiers => "intensifiers",
            Family::Downgraders => "downgraders",
            Family::Temporal => "temporal",
            Family::Pronouns => "pronouns",
        }
    }

    fn marker_group(self) -> Option<MarkerGroup> {
        Some(match self {
            Family::Request => MarkerGroup::Request,
            Family::Intensifiers => MarkerGroup::Intensifiers,
            Family::Downgraders => MarkerGroup::Downgraders,
            Family::Temporal => MarkerGroup::Temporal,
            Family::Pronouns => MarkerGroup::Pronouns,
            _ => return None,
        })
    }

    pub fn needs_tags(self) -> bool {
        matches!(self, Family::BowPos | Family::Pos)
    }

    /// Name of the external resource this family needs, if any.
    pub fn resource(self) -> Option<&'static str> {
        match self {
            Family::Liwc => Some("liwc"),
            Family::Clusters => Some("clusters"),
            Family::Mpqa => Some("mpqa"),
            Family::Nrc => Some("nrc"),
            Family::Vader => Some("valence"),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature family {s:?}")))
    }
}

/// A family selection; `all` drops families whose resources are missing
/// instead of failing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureConfig {
    pub families: Vec<Family>,
    pub all: bool,
}

impl FeatureConfig {
    pub fn new(families: &[Family]) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::Config("no feature family selected".into()));
        }
        let set: BTreeSet<Family> = families.iter().copied().collect();
        Ok(FeatureConfig {
            families: set.into_iter().collect(),
            all: false,
        })
    }

    pub fn all() -> Self {
        FeatureConfig {
            families: Family::ALL.to_vec(),
            all: true,
        }
    }

    /// Parses a comma list of family names and the aliases `sent`, `cmp`,
    /// `unigrams` and `all`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut fams = Vec::new();
        let mut all = false;
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_lowercase().as_str() {
                "all" => all = true,
                "sent" | "sentiment" => fams.extend(Family::SENTIMENT),
                "cmp" | "complaint" => fams.extend(Family::COMPLAINT),
                "unigrams" => fams.push(Family::Bow),
                other => fams.push(other.parse()?),
            }
        }
        if all {
            return Ok(Self::all());
        }
        Self::new(&fams)
    }

    pub fn label(&self) -> String {
        if self.all {
            "all".into()
        } else {
            self.families.iter().map(|f| f.name()).collect::<Vec<_>>().join(",")
        }
    }
}

/// External resources shared by every featurizer.
#[derive(Clone, Debug, Default)]
pub struct Resources {
    pub liwc: Option<Lexicon>,
    pub sentiment: SentimentLexica,
    pub clusters: Option<ClusterMap>,
    pub markers: MarkerLexica,
}

impl Resources {
    pub fn has(&self, family: Family) -> bool {
        match family {
            Family::Liwc => self.liwc.is_some(),
            Family::Clusters => self.clusters.is_some(),
            Family::Mpqa => self.sentiment.mpqa.is_some(),
            Family::Nrc => self.sentiment.nrc.is_some(),
            Family::Vader => self.sentiment.valence.is_some(),
            _ => true,
        }
    }
}

/// Feature extractor fitted on a training corpus.
#[derive(Clone, Debug)]
pub struct Featurizer {
    families: Vec<Family>,
    skipped: Vec<Family>,
    vocab: Option<Vocab>,
    pos_vocab: Option<Vocab>,
    resources: Arc<Resources>,
    schema: FeatureSchema,
    fit_ids: BTreeSet<String>,
}

impl Featurizer {
    /// Resolves the active families and builds the corpus-dependent
    /// vocabularies from `train` only.
    pub fn fit(train: &Corpus, config: &FeatureConfig, resources: Arc<Resources>) -> Result<Self> {
        let mut families = Vec::new();
        let mut skipped = Vec::new();
        for &f in &config.families {
            if resources.has(f) {
                families.push(f);
            } else if config.all {
                skipped.push(f);
            } else {
                return Err(Error::Config(format!(
                    "feature family {f} needs a {} resource, which was not supplied",
                    f.resource().unwrap_or("?")
                )));
            }
        }
        if families.is_empty() {
            return Err(Error::Config("no feature family is available".into()));
        }
        if train.is_empty() {
            return Err(Error::Data("cannot fit features on an empty corpus".into()));
        }
        let vocab = families.contains(&Family::Bow).then(|| build_vocab(train)).transpose()?;
        let pos_vocab = families
            .contains(&Family::BowPos)
            .then(|| build_pos_vocab(train))
            .transpose()?;
        if families.contains(&Family::Pos) {
            for d in &train.documents {
                if d.tokens()?.iter().any(|t| t.pos.is_none()) {
                    return Err(Error::Contract(format!("document {} is not POS-tagged", d.id)));
                }
            }
        }
        let mut f = Featurizer {
            families,
            skipped,
            vocab,
            pos_vocab,
            resources,
            schema: FeatureSchema::new(Vec::new(), "fs"),
            fit_ids: train.documents.iter().map(|d| d.id.clone()).collect(),
        };
        let mut names = f.feature_names(train);
        // resource content changes values without changing names
        names.push(format!("#resources {}", f.resource_fingerprint()));
        let mut schema = FeatureSchema::new(names, "fs");
        schema.names.pop();
        f.schema = schema;
        Ok(f)
    }

    fn resource_fingerprint(&self) -> String {
        let r = &self.resources;
        let mut s = String::new();
        for lex in [&r.liwc, &r.sentiment.mpqa, &r.sentiment.nrc, &r.sentiment.valence].into_iter().flatten() {
            s.push_str(&format!("{lex:?}"));
        }
        if let Some(cm) = &r.clusters {
            s.push_str(&cm.to_text());
        }
        s.push_str(&format!("{:?}", r.markers));
        fingerprint(s.as_bytes())
    }

    fn feature_names(&self, train: &Corpus) -> Vec<String> {
        let mut names = Vec::new();
        for &f in &self.families {
            match f {
                Family::Bow => names.extend(self.vocab.iter().flat_map(|v| v.words()).map(|w| format!("bow:{w}"))),
                Family::BowPos => {
                    names.extend(self.pos_vocab.iter().flat_map(|v| v.words()).map(|w| format!("bowpos:{w}")))
                }
                Family::Pos => {
                    let mut tags: BTreeSet<String> = KNOWN_TAGS.iter().map(|t| t.to_string()).collect();
                    for d in &train.documents {
                        tags.extend(d.tokens.iter().flatten().filter_map(|t| t.pos.clone()));
                    }
                    names.extend(tags.iter().map(|t| format!("pos1:{t}")));
                    for a in &tags {
                        names.extend(tags.iter().map(|b| format!("pos2:{a}_{b}")));
                    }
                }
                Family::Liwc => names.extend(
                    self.resources
                        .liwc
                        .iter()
                        .flat_map(|l| l.categories())
                        .map(|c| format!("liwc:{c}")),
                ),
                Family::Clusters => {
                    let k = self.resources.clusters.as_ref().map_or(0, ClusterMap::k);
                    names.extend((0..k).map(|c| format!("cl:{c}")));
                }
                Family::Mpqa => names.extend(["sent:mpqa_pos".to_string(), "sent:mpqa_neg".to_string()]),
                Family::Nrc => {
                    names.extend(["pos", "neg", "neutral"].iter().map(|s| format!("sent:nrc_{s}")));
                    names.extend(NRC_EMOTIONS.iter().map(|s| format!("sent:nrc_{s}")));
                }
                Family::Vader => names.push("sent:rule_compound".into()),
                other => names.extend(marker_feature_names(other.marker_group().expect("marker family"))),
            }
        }
        names
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    /// Families of an `all` selection dropped for lack of resources.
    pub fn skipped(&self) -> &[Family] {
        &self.skipped
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn vocab(&self) -> Option<&Vocab> {
        self.vocab.as_ref()
    }

    /// Ids of the documents the vocabularies were built from.
    pub fn fit_ids(&self) -> &BTreeSet<String> {
        &self.fit_ids
    }

    /// Fails if any of `ids` contributed to the fitted vocabularies.
    pub fn check_disjoint<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for id in ids {
            if self.fit_ids.contains(id) {
                return Err(Error::Leakage(format!(
                    "evaluation document {id} was used to fit features (schema {})",
                    self.schema.id
                )));
            }
        }
        Ok(())
    }

    pub fn transform<T: Scalar>(&self, doc: &Document) -> Result<FeatureVector<T>> {
        let tokens = doc.tokens()?;
        let id = self.schema.id.as_str();
        let mut out = FeatureVector::new(id);
        let mut groups = Vec::new();
        for &f in &self.families {
            let part = match f {
                Family::Bow => bow_tfidf(tokens, self.vocab.as_ref().expect("bow vocab"), id),
                Family::BowPos => pos_augmented_unigrams(tokens, self.pos_vocab.as_ref().expect("bowpos vocab"), id)?,
                Family::Pos => pos_ngram_features(tokens, id)?,
                Family::Liwc => {
                    let lex = self.resources.liwc.as_ref().expect("liwc resource");
                    let profile = crate::lexicons::match_categories(tokens, lex);
                    let mut v = FeatureVector::new(id);
                    for c in lex.categories() {
                        v.set_f64(format!("liwc:{c}"), profile.fraction(c));
                    }
                    v
                }
                Family::Clusters => {
                    let cm = self.resources.clusters.as_ref().expect("cluster resource");
                    let mut v = FeatureVector::new(id);
                    for (k, x) in cluster_features(tokens, cm).into_iter().enumerate() {
                        v.set_f64(format!("cl:{k}"), x);
                    }
                    v
                }
                Family::Mpqa => mpqa_scores(tokens, self.resources.sentiment.mpqa.as_ref().expect("mpqa"), id)?,
                Family::Nrc => nrc_scores(tokens, self.resources.sentiment.nrc.as_ref().expect("nrc"), id)?,
                Family::Vader => {
                    let mut v = FeatureVector::new(id);
                    let lex = self.resources.sentiment.valence.as_ref().expect("valence");
                    v.set_f64("sent:rule_compound", rule_compound(tokens, lex));
                    v
                }
                other => {
                    groups.push(other.marker_group().expect("marker family"));
                    continue;
                }
            };
            out.extend(&part)?;
        }
        if !groups.is_empty() {
            let m = complaint_markers(tokens, &doc.clean_text, doc.post_date, &self.resources.markers);
            out.extend(&m.to_features(&groups, id))?;
        }
        if !out.all_finite() {
            return Err(Error::Contract(format!("non-finite feature value for document {}", doc.id)));
        }
        Ok(out)
    }

    /// Rows in corpus order; extraction runs in parallel.
    pub fn transform_corpus<T: Scalar>(&self, corpus: &Corpus) -> Result<Vec<FeatureVector<T>>> {
        corpus.documents.par_iter().map(|d| self.transform(d)).collect()
    }
}

/// Feature vector of one document under a fitted featurizer.
pub fn assemble<T: Scalar>(doc: &Document, featurizer: &Featurizer) -> Result<FeatureVector<T>> {
    featurizer.transform(doc)
}

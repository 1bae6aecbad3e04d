//! Averaged-perceptron part-of-speech tagger with a rule-only fallback.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::lexical::rule_tag;
use super::Token;
use crate::error::{Error, Result};

pub const TAGGER_HEADER: &str = "ppn-tagger v1";

/// Penn Treebank tags plus the Twitter-specific USR, URL, HT and RT.
pub const KNOWN_TAGS: [&str; 49] = [
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS",
    "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG",
    "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "$", "#", ".", ",", ":", "``", "''", "-LRB-",
    "-RRB-", "USR", "URL", "HT", "RT",
];

const RULE_TAGS: [&str; 4] = ["USR", "URL", "HT", "UH"];

/// Tagger parameters. A model without weights tags with the built-in
/// closed-class lexicon and suffix heuristics.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggerModel {
    /// feature → tag → averaged weight
    pub weights: BTreeMap<String, BTreeMap<String, f64>>,
    pub tagset: BTreeSet<String>,
    pub version: u32,
}

/// A sentence of `(word, tag)` pairs.
pub type TaggedSentence = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub epochs: usize,
    pub train_sentences: usize,
    pub heldout_sentences: usize,
    pub train_accuracy: f64,
    pub heldout_accuracy: Option<f64>,
}

impl TaggerModel {
    /// Model backed only by lexical rules.
    pub fn rule_only() -> Self {
        TaggerModel {
            weights: BTreeMap::new(),
            tagset: KNOWN_TAGS.iter().map(|t| (*t).to_owned()).collect(),
            version: 1,
        }
    }

    /// Placeholder for a model that was never loaded; tagging with it fails.
    pub fn unloaded() -> Self {
        TaggerModel {
            weights: BTreeMap::new(),
            tagset: BTreeSet::new(),
            version: 1,
        }
    }

    pub fn is_statistical(&self) -> bool {
        !self.weights.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{TAGGER_HEADER}");
        for (feat, tags) in &self.weights {
            for (tag, w) in tags {
                let _ = writeln!(s, "{feat}\t{tag}\t{w}");
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim_end() == TAGGER_HEADER => {}
            Some(h) => return Err(Error::ModelFormat(format!("unsupported tagger header {h:?}"))),
            None => return Err(Error::ModelFormat("empty tagger file".into())),
        }
        let mut weights: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        let mut tagset: BTreeSet<String> = RULE_TAGS.iter().map(|t| (*t).to_owned()).collect();
        for (n, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            let [feat, tag, w] = parts[..] else {
                return Err(Error::Format {
                    line: n + 2,
                    message: "expected feature<TAB>tag<TAB>weight".into(),
                });
            };
            let w: f64 = w.parse().map_err(|_| Error::Format {
                line: n + 2,
                message: format!("bad weight {w:?}"),
            })?;
            tagset.insert(tag.to_owned());
            weights.entry(feat.to_owned()).or_default().insert(tag.to_owned(), w);
        }
        Ok(TaggerModel {
            weights,
            tagset,
            version: 1,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    fn predict(&self, feats: &[String]) -> String {
        let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
        for f in feats {
            if let Some(tags) = self.weights.get(f) {
                for (tag, w) in tags {
                    *scores.entry(tag.as_str()).or_insert(0.0) += w;
                }
            }
        }
        // ties go to the lexicographically smallest tag
        let mut best: Option<(&str, f64)> = None;
        for (tag, s) in scores {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((tag, s));
            }
        }
        best.map(|(t, _)| t.to_owned()).unwrap_or_else(|| "NN".to_owned())
    }
}

fn normalize_word(w: &str) -> String {
    if w.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | ':' | '/' | '%')) && w.chars().any(|c| c.is_ascii_digit()) {
        "!DIGITS".to_owned()
    } else {
        w.to_lowercase()
    }
}

fn shape(w: &str) -> &'static str {
    let letters: Vec<char> = w.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.is_empty() {
        if w.chars().any(|c| c.is_ascii_digit()) {
            "digit"
        } else {
            "punct"
        }
    } else if letters.iter().all(|c| c.is_uppercase()) {
        "upper"
    } else if letters[0].is_uppercase() && w.starts_with(letters[0]) {
        "title"
    } else {
        "lower"
    }
}

fn affix(w: &str, n: usize, suffix: bool) -> String {
    let chars: Vec<char> = w.chars().collect();
    let n = n.min(chars.len());
    if suffix {
        chars[chars.len() - n..].iter().collect()
    } else {
        chars[..n].iter().collect()
    }
}

fn features(words: &[String], i: usize, prev: &str, prev2: &str) -> Vec<String> {
    let w = &words[i];
    let mut f = Vec::with_capacity(18);
    f.push("bias".to_owned());
    f.push(format!("w={w}"));
    for n in 1..=3 {
        f.push(format!("suf{n}={}", affix(w, n, true)));
        f.push(format!("pre{n}={}", affix(w, n, false)));
    }
    f.push(format!("shape={}", shape(w)));
    f.push(format!("t-1={prev}"));
    f.push(format!("t-2,t-1={prev2},{prev}"));
    f.push(format!("t-1,w={prev},{w}"));
    let at = |j: isize| -> &str {
        if j < 0 {
            "<s>"
        } else {
            words.get(j as usize).map_or("</s>", String::as_str)
        }
    };
    let i = i as isize;
    f.push(format!("w-1={}", at(i - 1)));
    f.push(format!("w+1={}", at(i + 1)));
    f.push(format!("w-2={}", at(i - 2)));
    f.push(format!("w+2={}", at(i + 2)));
    f
}

fn tag_words(words: &[String], raw: &[&str], model: &TaggerModel) -> Vec<String> {
    let norm: Vec<String> = words.iter().map(|w| normalize_word(w)).collect();
    let mut tags: Vec<String> = Vec::with_capacity(words.len());
    for i in 0..words.len() {
        let tag = if let Some(t) = rule_tag(raw[i]) {
            t.to_owned()
        } else if model.is_statistical() {
            let prev = if i >= 1 { tags[i - 1].as_str() } else { "<s>" };
            let prev2 = if i >= 2 { tags[i - 2].as_str() } else { "<s>" };
            model.predict(&features(&norm, i, prev, prev2))
        } else {
            let prev = if i >= 1 { Some(tags[i - 1].as_str()) } else { None };
            lexical_guess(raw[i], prev, i == 0).to_owned()
        };
        tags.push(tag);
    }
    tags
}

/// Tags every token; placeholders, hashtags and emoticons get their rule tag
/// regardless of the model.
pub fn pos_tag(tokens: &[Token], model: &TaggerModel) -> Result<Vec<Token>> {
    if model.tagset.is_empty() {
        return Err(Error::Config("tagger model is not loaded".into()));
    }
    let words: Vec<String> = tokens.iter().map(|t| t.surface.clone()).collect();
    let raw: Vec<&str> = tokens.iter().map(|t| t.surface.as_str()).collect();
    let tags = tag_words(&words, &raw, model);
    Ok(tokens
        .iter()
        .zip(tags)
        .map(|(t, tag)| Token {
            pos: Some(tag),
            ..t.clone()
        })
        .collect())
}

#[derive(Default)]
struct Param {
    w: f64,
    total: f64,
    stamp: u64,
}

struct Perceptron {
    params: HashMap<String, HashMap<String, Param>>,
    instances: u64,
}

impl Perceptron {
    fn score(&self, feats: &[String], tagset: &[String]) -> String {
        let mut best = (tagset[0].as_str(), f64::NEG_INFINITY);
        for tag in tagset {
            let s: f64 = feats
                .iter()
                .filter_map(|f| self.params.get(f).and_then(|m| m.get(tag)))
                .map(|p| p.w)
                .sum();
            if s > best.1 {
                best = (tag, s);
            }
        }
        best.0.to_owned()
    }

    fn update(&mut self, truth: &str, guess: &str, feats: &[String]) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        let now = self.instances;
        for f in feats {
            let per_tag = self.params.entry(f.clone()).or_default();
            for (tag, delta) in [(truth, 1.0), (guess, -1.0)] {
                let p = per_tag.entry(tag.to_owned()).or_default();
                p.total += (now - p.stamp) as f64 * p.w;
                p.stamp = now;
                p.w += delta;
            }
        }
    }

    fn averaged(self) -> BTreeMap<String, BTreeMap<String, f64>> {
        let n = self.instances.max(1);
        let mut out = BTreeMap::new();
        for (f, per_tag) in self.params {
            let mut tags = BTreeMap::new();
            for (tag, p) in per_tag {
                let total = p.total + (n - p.stamp) as f64 * p.w;
                let avg = total / n as f64;
                if avg != 0.0 {
                    tags.insert(tag, avg);
                }
            }
            if !tags.is_empty() {
                out.insert(f, tags);
            }
        }
        out
    }
}

/// Parses `token<TAB>tag` lines with blank lines between sentences.
pub fn parse_tagged_sentences(text: &str) -> Result<Vec<TaggedSentence>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let Some((word, tag)) = line.split_once('\t') else {
            return Err(Error::Format {
                line: n + 1,
                message: "expected token<TAB>tag".into(),
            });
        };
        let tag = tag.trim();
        if !KNOWN_TAGS.contains(&tag) {
            return Err(Error::Data(format!("line {}: unknown tag {tag:?}", n + 1)));
        }
        current.push((word.to_owned(), tag.to_owned()));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn read_tagged_corpus(path: impl AsRef<Path>) -> Result<Vec<TaggedSentence>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tagged_sentences(&text)
}

/// Token-level accuracy of `model` on gold sentences.
pub fn accuracy(model: &TaggerModel, sentences: &[TaggedSentence]) -> f64 {
    let mut correct = 0usize;
    let mut total = 0usize;
    for s in sentences {
        let words: Vec<String> = s.iter().map(|(w, _)| w.clone()).collect();
        let raw: Vec<&str> = words.iter().map(String::as_str).collect();
        let tags = tag_words(&words, &raw, model);
        correct += tags.iter().zip(s).filter(|(p, (_, g))| *p == g).count();
        total += s.len();
    }
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

/// Trains on in-memory sentences. With ten or more sentences every tenth one
/// is held out for the accuracy report.
pub fn train_pos_tagger_on(sentences: &[TaggedSentence], epochs: usize, seed: u64) -> Result<(TaggerModel, TrainReport)> {
    if sentences.is_empty() {
        return Err(Error::Data("empty tagged training corpus".into()));
    }
    let (train, heldout): (Vec<&TaggedSentence>, Vec<&TaggedSentence>) = if sentences.len() >= 10 {
        sentences.iter().enumerate().partition(|(i, _)| i % 10 != 9)
    } else {
        (sentences.iter().enumerate().collect(), Vec::new())
    }
    .map_pair(|v| v.into_iter().map(|(_, s)| s).collect());

    let mut tagset: BTreeSet<String> = RULE_TAGS.iter().map(|t| (*t).to_owned()).collect();
    for s in sentences {
        for (_, t) in s {
            tagset.insert(t.clone());
        }
    }
    let tag_list: Vec<String> = tagset.iter().cloned().collect();
    let mut model = Perceptron {
        params: HashMap::new(),
        instances: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    for _ in 0..epochs.max(1) {
        order.shuffle(&mut rng);
        for &si in &order {
            let s = train[si];
            let norm: Vec<String> = s.iter().map(|(w, _)| normalize_word(w)).collect();
            let mut prev = "<s>".to_owned();
            let mut prev2 = "<s>".to_owned();
            for (i, (word, gold)) in s.iter().enumerate() {
                let guess = if let Some(t) = rule_tag(word) {
                    t.to_owned()
                } else {
                    let feats = features(&norm, i, &prev, &prev2);
                    let guess = model.score(&feats, &tag_list);
                    model.update(gold, &guess, &feats);
                    guess
                };
                prev2 = std::mem::replace(&mut prev, guess);
            }
        }
    }
    let tagger = TaggerModel {
        weights: model.averaged(),
        tagset,
        version: 1,
    };
    let train_owned: Vec<TaggedSentence> = train.iter().map(|s| (*s).clone()).collect();
    let heldout_owned: Vec<TaggedSentence> = heldout.iter().map(|s| (*s).clone()).collect();
    let report = TrainReport {
        epochs: epochs.max(1),
        train_sentences: train_owned.len(),
        heldout_sentences: heldout_owned.len(),
        train_accuracy: accuracy(&tagger, &train_owned),
        heldout_accuracy: (!heldout_owned.is_empty()).then(|| accuracy(&tagger, &heldout_owned)),
    };
    Ok((tagger, report))
}

pub fn train_pos_tagger(tagged_corpus: impl AsRef<Path>, epochs: usize, seed: u64) -> Result<(TaggerModel, TrainReport)> {
    let sentences = read_tagged_corpus(tagged_corpus)?;
    train_pos_tagger_on(&sentences, epochs, seed)
}

trait MapPair<A> {
    fn map_pair<B>(self, f: impl Fn(A) -> B) -> (B, B);
}

impl<A> MapPair<A> for (A, A) {
    fn map_pair<B>(self, f: impl Fn(A) -> B) -> (B, B) {
        (f(self.0), f(self.1))
    }
}

const CLOSED_CLASS: &[(&str, &str)] = &[
    ("i", "PRP"), ("me", "PRP"), ("you", "PRP"), ("u", "PRP"), ("he", "PRP"), ("him", "PRP"),
    ("she", "PRP"), ("it", "PRP"), ("we", "PRP"), ("us", "PRP"), ("they", "PRP"), ("them", "PRP"),
    ("myself", "PRP"), ("yourself", "PRP"), ("himself", "PRP"), ("herself", "PRP"), ("itself", "PRP"),
    ("ourselves", "PRP"), ("themselves", "PRP"),
    ("my", "PRP$"), ("your", "PRP$"), ("ur", "PRP$"), ("his", "PRP$"), ("her", "PRP$"), ("its", "PRP$"),
    ("our", "PRP$"), ("their", "PRP$"),
    ("the", "DT"), ("a", "DT"), ("an", "DT"), ("this", "DT"), ("that", "DT"), ("these", "DT"),
    ("those", "DT"), ("every", "DT"), ("each", "DT"), ("no", "DT"), ("some", "DT"), ("any", "DT"),
    ("all", "DT"), ("another", "DT"),
    ("and", "CC"), ("or", "CC"), ("but", "CC"), ("nor", "CC"), ("yet", "CC"),
    ("in", "IN"), ("on", "IN"), ("at", "IN"), ("of", "IN"), ("for", "IN"), ("with", "IN"),
    ("from", "IN"), ("by", "IN"), ("about", "IN"), ("into", "IN"), ("over", "IN"), ("after", "IN"),
    ("before", "IN"), ("since", "IN"), ("until", "IN"), ("because", "IN"), ("if", "IN"),
    ("than", "IN"), ("through", "IN"), ("during", "IN"), ("without", "IN"), ("like", "IN"),
    ("so", "RB"), ("to", "TO"),
    ("can", "MD"), ("could", "MD"), ("will", "MD"), ("would", "MD"), ("should", "MD"),
    ("may", "MD"), ("might", "MD"), ("must", "MD"), ("shall", "MD"), ("can't", "MD"),
    ("won't", "MD"), ("cannot", "MD"), ("couldn't", "MD"), ("wouldn't", "MD"), ("shouldn't", "MD"),
    ("is", "VBZ"), ("has", "VBZ"), ("does", "VBZ"), ("isn't", "VBZ"), ("doesn't", "VBZ"),
    ("hasn't", "VBZ"), ("it's", "VBZ"), ("that's", "VBZ"), ("what's", "VBZ"),
    ("am", "VBP"), ("are", "VBP"), ("have", "VBP"), ("do", "VBP"), ("don't", "VBP"),
    ("aren't", "VBP"), ("haven't", "VBP"), ("i'm", "VBP"), ("you're", "VBP"), ("we're", "VBP"),
    ("they're", "VBP"), ("i've", "VBP"),
    ("was", "VBD"), ("were", "VBD"), ("had", "VBD"), ("did", "VBD"), ("didn't", "VBD"),
    ("wasn't", "VBD"), ("weren't", "VBD"), ("got", "VBD"), ("said", "VBD"), ("went", "VBD"),
    ("bought", "VBD"), ("came", "VBD"), ("sent", "VBD"), ("told", "VBD"), ("made", "VBD"),
    ("been", "VBN"), ("gone", "VBN"), ("done", "VBN"), ("taken", "VBN"), ("given", "VBN"),
    ("be", "VB"), ("get", "VB"), ("fix", "VB"), ("help", "VB"), ("let", "VB"),
    ("not", "RB"), ("n't", "RB"), ("never", "RB"), ("still", "RB"), ("just", "RB"), ("now", "RB"),
    ("again", "RB"), ("already", "RB"), ("very", "RB"), ("really", "RB"), ("too", "RB"),
    ("also", "RB"), ("here", "RB"), ("there", "RB"), ("ever", "RB"), ("even", "RB"), ("back", "RB"),
    ("why", "WRB"), ("when", "WRB"), ("where", "WRB"), ("how", "WRB"),
    ("what", "WP"), ("who", "WP"), ("whom", "WP"), ("which", "WDT"), ("whose", "WP$"),
    ("there's", "EX"),
    ("lol", "UH"), ("haha", "UH"), ("hahaha", "UH"), ("omg", "UH"), ("hi", "UH"), ("hello", "UH"),
    ("hey", "UH"), ("yes", "UH"), ("yeah", "UH"), ("ok", "UH"), ("okay", "UH"), ("please", "UH"),
    ("thanks", "UH"), ("wow", "UH"), ("oh", "UH"), ("ugh", "UH"), ("lmao", "UH"),
    ("one", "CD"), ("two", "CD"), ("three", "CD"), ("four", "CD"), ("five", "CD"), ("ten", "CD"),
];

const AUX_TAGS: [&str; 8] = ["VBP", "VBZ", "VBD", "VB", "VBN", "MD", "TO", "RB"];

/// Rule-only tagging from a closed-class word list and suffix heuristics.
fn lexical_guess(surface: &str, prev: Option<&str>, sentence_initial: bool) -> &'static str {
    let lower = surface.to_lowercase();
    if let Some((_, tag)) = CLOSED_CLASS.iter().find(|(w, _)| *w == lower) {
        return tag;
    }
    let first = surface.chars().next().unwrap_or(' ');
    if surface.chars().any(|c| c.is_ascii_digit()) && !surface.chars().any(char::is_alphabetic) {
        return "CD";
    }
    if !surface.chars().any(char::is_alphanumeric) {
        return match first {
            '$' => "$",
            '#' => "#",
            '.' | '!' | '?' => ".",
            ',' => ",",
            ':' | ';' | '-' | '…' => ":",
            '(' | '[' | '{' => "-LRB-",
            ')' | ']' | '}' => "-RRB-",
            '"' | '“' => "``",
            '\'' | '”' | '’' => "''",
            _ => "SYM",
        };
    }
    if lower.ends_with("'s") {
        return "POS";
    }
    if lower.len() > 4 && lower.ends_with("ing") {
        return "VBG";
    }
    if lower.len() > 3 && lower.ends_with("ed") {
        // past participle after auxiliaries, modals and pronoun subjects
        return match prev {
            Some(p) if AUX_TAGS.contains(&p) => "VBN",
            _ => "VBD",
        };
    }
    if lower.len() > 3 && lower.ends_with("ly") {
        return "RB";
    }
    if ["ous", "ful", "able", "ible", "ive", "less", "ish", "ic"].iter().any(|s| lower.len() > s.len() + 2 && lower.ends_with(s)) {
        return "JJ";
    }
    if first.is_uppercase() && !sentence_initial && !matches!(prev, Some("USR") | Some(".")) {
        return "NNP";
    }
    if lower.len() > 3 && lower.ends_with('s') && !lower.ends_with("ss") {
        return "NNS";
    }
    "NN"
}

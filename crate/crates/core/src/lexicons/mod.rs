//! Category dictionaries with prefix-wildcard patterns.
//!
//! File format (one category per line, repeated categories merge):
//!
//! ```text
//! % lexicon-name
//! NEGATE<TAB>not,no,can't,negat*
//! ```
//!
//! Sentiment lexicons add a third column holding the pattern's score:
//! `valence<TAB>good<TAB>1.9`. Dictionaries in the native LIWC `.dic` layout
//! (a `%`-delimited category table followed by `word<TAB>id…` rows) are
//! detected and accepted as well.

pub mod bundled;
mod trie;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use trie::PatternTrie;

use crate::error::{Error, Result};
use crate::textproc::Token;

#[derive(Clone, Debug, PartialEq)]
struct Pattern {
    /// lowercased words; a trailing `*` on the last word is stored in `wildcard`
    words: Vec<String>,
    wildcard: bool,
    category: usize,
    score: Option<f64>,
}

impl Pattern {
    fn word_matches(&self, k: usize, token: &str) -> bool {
        let w = &self.words[k];
        if self.wildcard && k + 1 == self.words.len() {
            token.starts_with(w.as_str())
        } else {
            token == w
        }
    }
}

/// Named categories of word patterns.
#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    pub name: String,
    categories: Vec<String>,
    patterns: Vec<Pattern>,
    trie: PatternTrie,
    /// ids of multi-word patterns
    phrases: Vec<usize>,
}

/// Per-category hit counts for one token sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoryProfile {
    pub token_count: usize,
    pub counts: BTreeMap<String, usize>,
}

impl CategoryProfile {
    pub fn count(&self, category: &str) -> usize {
        self.counts.get(category).copied().unwrap_or(0)
    }

    /// `count / token_count`, zero for an empty sequence.
    pub fn fraction(&self, category: &str) -> f64 {
        if self.token_count == 0 {
            0.0
        } else {
            self.count(category) as f64 / self.token_count as f64
        }
    }

    pub fn fractions(&self) -> BTreeMap<String, f64> {
        self.counts.keys().map(|c| (c.clone(), self.fraction(c))).collect()
    }
}

fn parse_pattern(raw: &str, line: usize) -> Result<Option<(Vec<String>, bool)>> {
    let p = raw.trim().to_lowercase();
    if p.is_empty() {
        return Ok(None);
    }
    let words: Vec<&str> = p.split_whitespace().collect();
    let last = words.len() - 1;
    let mut wildcard = false;
    let mut out = Vec::with_capacity(words.len());
    for (k, w) in words.iter().enumerate() {
        let stars = w.matches('*').count();
        if stars > 1 || (stars == 1 && (!w.ends_with('*') || k != last)) {
            return Err(Error::Format {
                line,
                message: format!("wildcard only allowed at the end of a pattern: {raw:?}"),
            });
        }
        if stars == 1 {
            wildcard = true;
            out.push(w.trim_end_matches('*').to_owned());
        } else {
            out.push((*w).to_owned());
        }
    }
    if out.len() == 1 && out[0].is_empty() && !wildcard {
        return Ok(None);
    }
    Ok(Some((out, wildcard)))
}

impl Lexicon {
    pub fn new(name: impl Into<String>) -> Self {
        Lexicon {
            name: name.into(),
            categories: Vec::new(),
            patterns: Vec::new(),
            trie: PatternTrie::default(),
            phrases: Vec::new(),
        }
    }

    /// Builds a lexicon from literal entries; used for the bundled lists.
    pub fn from_entries(name: &str, entries: &[(&str, &[&str])]) -> Self {
        let mut lex = Lexicon::new(name);
        for (cat, patterns) in entries {
            for p in *patterns {
                lex.add(cat, p, None, 0).expect("bundled pattern is well-formed");
            }
        }
        lex
    }

    fn category_id(&mut self, name: &str) -> usize {
        match self.categories.iter().position(|c| c == name) {
            Some(i) => i,
            None => {
                self.categories.push(name.to_owned());
                self.categories.len() - 1
            }
        }
    }

    /// Adds one pattern; duplicates within a category are collapsed.
    pub fn add(&mut self, category: &str, pattern: &str, score: Option<f64>, line: usize) -> Result<()> {
        let category = category.trim();
        if category.is_empty() {
            return Err(Error::Format {
                line,
                message: "empty category name".into(),
            });
        }
        let Some((words, wildcard)) = parse_pattern(pattern, line)? else {
            return Ok(());
        };
        let cat = self.category_id(category);
        if self
            .patterns
            .iter()
            .any(|p| p.category == cat && p.words == words && p.wildcard == wildcard)
        {
            return Ok(());
        }
        let id = self.patterns.len();
        if words.len() == 1 {
            self.trie.insert(&words[0], wildcard, id);
        } else {
            self.phrases.push(id);
        }
        self.patterns.push(Pattern {
            words,
            wildcard,
            category: cat,
            score,
        });
        Ok(())
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn pattern_count(&self, category: &str) -> usize {
        match self.categories.iter().position(|c| c == category) {
            Some(cat) => self.patterns.iter().filter(|p| p.category == cat).count(),
            None => 0,
        }
    }

    pub fn has_category(&self, category: &str) -> bool {
        self.categories.iter().any(|c| c == category)
    }

    /// Categories hit by a single lowercased word.
    pub fn word_categories(&self, lower: &str) -> BTreeSet<usize> {
        self.trie
            .matches(lower)
            .into_iter()
            .map(|id| self.patterns[id].category)
            .collect()
    }

    pub fn contains_word(&self, lower: &str, category: &str) -> bool {
        match self.categories.iter().position(|c| c == category) {
            Some(cat) => self.word_categories(lower).contains(&cat),
            None => false,
        }
    }

    /// Score of the most specific scored pattern matching `lower`: an exact
    /// match beats the longest prefix pattern.
    pub fn score(&self, lower: &str) -> Option<f64> {
        self.trie
            .matches(lower)
            .into_iter()
            .rev()
            .find_map(|id| self.patterns[id].score)
    }

    /// Categories hit at position `i`: single-word patterns on `words[i]` plus
    /// phrases starting at `i`.
    pub fn categories_at(&self, words: &[&str], i: usize) -> BTreeSet<usize> {
        let mut hits = self.word_categories(words[i]);
        for &id in &self.phrases {
            let p = &self.patterns[id];
            if i + p.words.len() <= words.len() && (0..p.words.len()).all(|k| p.word_matches(k, words[i + k])) {
                hits.insert(p.category);
            }
        }
        hits
    }

    /// Counts each (token, category) pair at most once.
    pub fn match_words(&self, words: &[&str]) -> CategoryProfile {
        let lowered: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
        let lw: Vec<&str> = lowered.iter().map(String::as_str).collect();
        let mut counts: BTreeMap<String, usize> = self.categories.iter().map(|c| (c.clone(), 0)).collect();
        for i in 0..lw.len() {
            for cat in self.categories_at(&lw, i) {
                *counts.get_mut(&self.categories[cat]).expect("known category") += 1;
            }
        }
        CategoryProfile {
            token_count: words.len(),
            counts,
        }
    }

    pub fn parse(text: &str) -> Result<Lexicon> {
        let first = text.lines().find(|l| !l.trim().is_empty());
        match first.map(str::trim) {
            Some("%") => parse_liwc_dic(text),
            Some(h) if h.starts_with('%') => parse_documented(text),
            _ => Err(Error::Format {
                line: 1,
                message: "lexicon must start with a `% name` header".into(),
            }),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::parse(&text)
    }
}

fn parse_documented(text: &str) -> Result<Lexicon> {
    let mut lex: Option<Lexicon> = None;
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some(l) = lex.as_mut() else {
            let name = trimmed.trim_start_matches('%').trim();
            lex = Some(Lexicon::new(name));
            continue;
        };
        let cols: Vec<&str> = line.split('\t').collect();
        match cols[..] {
            [cat, patterns] => {
                for p in patterns.split(',') {
                    l.add(cat, p, None, lineno)?;
                }
            }
            [cat, pattern, score] => {
                let s: f64 = score.trim().parse().map_err(|_| Error::Format {
                    line: lineno,
                    message: format!("bad score {score:?}"),
                })?;
                l.add(cat, pattern, Some(s), lineno)?;
            }
            _ => {
                return Err(Error::Format {
                    line: lineno,
                    message: "expected category<TAB>patterns[<TAB>score]".into(),
                })
            }
        }
    }
    lex.ok_or_else(|| Error::Format {
        line: 1,
        message: "missing header".into(),
    })
}

fn parse_liwc_dic(text: &str) -> Result<Lexicon> {
    let mut lex = Lexicon::new("liwc");
    let mut ids: HashMap<String, String> = HashMap::new();
    let mut section = 0;
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "%" {
            section += 1;
            continue;
        }
        let mut cols = trimmed.split('\t').map(str::trim).filter(|c| !c.is_empty());
        match section {
            1 => {
                let (Some(id), Some(name)) = (cols.next(), cols.next()) else {
                    return Err(Error::Format {
                        line: lineno,
                        message: "expected id<TAB>category".into(),
                    });
                };
                ids.insert(id.to_owned(), name.to_owned());
            }
            2 => {
                let Some(word) = cols.next() else { continue };
                for id in cols {
                    let cat = ids.get(id).ok_or_else(|| Error::Format {
                        line: lineno,
                        message: format!("unknown category id {id:?}"),
                    })?;
                    let cat = cat.clone();
                    lex.add(&cat, word, None, lineno)?;
                }
            }
            _ => {
                return Err(Error::Format {
                    line: lineno,
                    message: "content outside the % sections".into(),
                })
            }
        }
    }
    Ok(lex)
}

/// Profile of a token sequence against `lexicon` (case-insensitive).
pub fn match_categories(tokens: &[Token], lexicon: &Lexicon) -> CategoryProfile {
    let words: Vec<&str> = tokens.iter().map(|t| t.lower.as_str()).collect();
    lexicon.match_words(&words)
}

use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::temporal::{recognize_temporal, Granularity, TemporalExpression};
use super::FeatureVector;
use crate::corpus::{URL_PLACEHOLDER, USER_PLACEHOLDER};
use crate::lexicons::bundled::{self, DOWNGRADER_CATEGORIES, POLITENESS_CATEGORIES, PRONOUN_CATEGORIES, START_ANCHORED};
use crate::lexicons::Lexicon;
use crate::scalar::Scalar;
use crate::textproc::Token;

/// Dictionaries behind the downgrader, politeness and pronoun counts.
#[derive(Clone, Debug)]
pub struct MarkerLexica {
    pub downgraders: Lexicon,
    pub politeness: Lexicon,
    pub pronouns: Lexicon,
}

impl Default for MarkerLexica {
    fn default() -> Self {
        MarkerLexica {
            downgraders: bundled::downgraders(),
            politeness: bundled::politeness(),
            pronouns: bundled::pronoun_types(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Intensifiers {
    /// words of ≥2 letters, all upper case
    pub caps_word_frac: f64,
    pub initial_cap_frac: f64,
    /// upper-case letters among all letters of words
    pub caps_letter_frac: f64,
    /// runs of ≥2 `!`
    pub exclamation_runs: usize,
    /// runs of ≥2 `?`
    pub question_runs: usize,
    /// tokens with a letter repeated ≥3 times in a row
    pub elongated: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemporalStats {
    pub expressions: Vec<TemporalExpression>,
}

impl TemporalStats {
    pub fn min_days(&self) -> Option<i64> {
        self.expressions.iter().map(|e| e.days).min()
    }

    /// Bucket of the most recent expression.
    pub fn bucket(&self) -> Option<Granularity> {
        self.min_days().map(Granularity::of_days)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplaintMarkers {
    pub request: bool,
    pub intensifiers: Intensifiers,
    pub downgraders: BTreeMap<String, usize>,
    pub politeness: BTreeMap<String, usize>,
    /// `None` when the post date is unknown
    pub temporal: Option<TemporalStats>,
    pub pronouns: BTreeMap<String, f64>,
}

const REQUEST_MODALS: [&str; 12] = [
    "can you", "could you", "would you", "will you", "can u", "could u", "would u", "will u", "can someone",
    "could someone", "can anyone", "could anyone",
];
const PLEASE: [&str; 3] = ["please", "pls", "plz"];
const SECOND_PERSON: [&str; 5] = ["you", "your", "u", "ur", "yours"];

fn is_word(t: &Token) -> bool {
    t.surface != USER_PLACEHOLDER
        && t.surface != URL_PLACEHOLDER
        && !t.surface.starts_with('#')
        && !t.surface.starts_with('@')
        && t.surface.chars().any(char::is_alphabetic)
}

fn is_elongated(s: &str) -> bool {
    let chars: Vec<char> = s.to_lowercase().chars().collect();
    chars.windows(3).any(|w| w[0].is_alphabetic() && w[0] == w[1] && w[1] == w[2])
}

fn punct_run(t: &Token, c: char) -> bool {
    t.surface.chars().count() >= 2 && t.surface.chars().all(|x| x == c)
}

/// Direct request to the addressee: a modal request, "please" followed by a
/// word, or a question containing a second-person pronoun.
pub fn is_request(tokens: &[Token]) -> bool {
    let words: Vec<&str> = tokens.iter().map(|t| t.lower.as_str()).collect();
    let modal = words.windows(2).any(|w| REQUEST_MODALS.contains(&format!("{} {}", w[0], w[1]).as_str()));
    let please = tokens
        .windows(2)
        .any(|w| PLEASE.contains(&w[0].lower.as_str()) && is_word(&w[1]))
        || tokens
            .windows(2)
            .any(|w| is_word(&w[0]) && PLEASE.contains(&w[1].lower.as_str()));
    let question = words.iter().any(|w| w.contains('?')) && words.iter().any(|w| SECOND_PERSON.contains(w));
    modal || please || question
}

pub fn intensifiers(tokens: &[Token]) -> Intensifiers {
    let words: Vec<&Token> = tokens.iter().filter(|t| is_word(t)).collect();
    let n = words.len() as f64;
    let caps = words
        .iter()
        .filter(|t| {
            let letters: Vec<char> = t.surface.chars().filter(|c| c.is_alphabetic()).collect();
            letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
        })
        .count();
    let initial = words
        .iter()
        .filter(|t| t.surface.chars().next().is_some_and(char::is_uppercase))
        .count();
    let (upper, letters) = words.iter().flat_map(|t| t.surface.chars()).filter(|c| c.is_alphabetic()).fold(
        (0usize, 0usize),
        |(u, l), c| (u + c.is_uppercase() as usize, l + 1),
    );
    let frac = |a: usize, b: f64| if b > 0.0 { a as f64 / b } else { 0.0 };
    Intensifiers {
        caps_word_frac: frac(caps, n),
        initial_cap_frac: frac(initial, n),
        caps_letter_frac: frac(upper, letters as f64),
        exclamation_runs: tokens.iter().filter(|t| punct_run(t, '!')).count(),
        question_runs: tokens.iter().filter(|t| punct_run(t, '?')).count(),
        elongated: words.iter().filter(|t| is_elongated(&t.surface)).count(),
    }
}

fn category_counts(lex: &Lexicon, words: &[&str], categories: &[&str], start: Option<usize>) -> BTreeMap<String, usize> {
    let mut counts: BTreeMap<String, usize> = categories.iter().map(|c| (c.to_string(), 0)).collect();
    for i in 0..words.len() {
        for cat in lex.categories_at(words, i) {
            let name = &lex.categories()[cat];
            if START_ANCHORED.contains(&name.as_str()) && Some(i) != start {
                continue;
            }
            if let Some(c) = counts.get_mut(name) {
                *c += 1;
            }
        }
    }
    counts
}

/// Extracts every complaint-specific marker from a tokenized text.
pub fn complaint_markers(tokens: &[Token], text: &str, post_date: Option<NaiveDate>, lex: &MarkerLexica) -> ComplaintMarkers {
    let words: Vec<&str> = tokens.iter().map(|t| t.lower.as_str()).collect();
    // the first token after any leading addressee mentions
    let start = tokens.iter().position(|t| t.surface != USER_PLACEHOLDER && !t.surface.starts_with('@'));
    let profile = lex.pronouns.match_words(&words);
    let pronouns = PRONOUN_CATEGORIES
        .iter()
        .map(|c| (c.to_string(), profile.fraction(c)))
        .collect();
    ComplaintMarkers {
        request: is_request(tokens),
        intensifiers: intensifiers(tokens),
        downgraders: category_counts(&lex.downgraders, &words, &DOWNGRADER_CATEGORIES, None),
        politeness: category_counts(&lex.politeness, &words, &POLITENESS_CATEGORIES, start),
        temporal: post_date.map(|d| TemporalStats {
            expressions: recognize_temporal(text, d),
        }),
        pronouns,
    }
}

/// Marker subfamilies that can be selected separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MarkerGroup {
    Request,
    Intensifiers,
    Downgraders,
    Temporal,
    Pronouns,
}

impl ComplaintMarkers {
    /// `cmp:`-namespaced entries of the selected groups.
    pub fn to_features<T: Scalar>(&self, groups: &[MarkerGroup], schema: &str) -> FeatureVector<T> {
        let mut v = FeatureVector::new(schema);
        for g in groups {
            match g {
                MarkerGroup::Request => v.set_f64("cmp:request", self.request as u8 as f64),
                MarkerGroup::Intensifiers => {
                    let i = &self.intensifiers;
                    v.set_f64("cmp:caps_frac", i.caps_word_frac);
                    v.set_f64("cmp:initcap_frac", i.initial_cap_frac);
                    v.set_f64("cmp:capletter_frac", i.caps_letter_frac);
                    v.set_f64("cmp:excl_runs", i.exclamation_runs as f64);
                    v.set_f64("cmp:quest_runs", i.question_runs as f64);
                    v.set_f64("cmp:elongated", i.elongated as f64);
                }
                MarkerGroup::Downgraders => {
                    for (c, &n) in &self.downgraders {
                        v.set_f64(format!("cmp:dg_{c}"), n as f64);
                    }
                    for (c, &n) in &self.politeness {
                        v.set_f64(format!("cmp:pol_{c}"), n as f64);
                    }
                }
                MarkerGroup::Temporal => {
                    if let Some(t) = &self.temporal {
                        v.set_f64("cmp:temp_count", t.expressions.len() as f64);
                        if let (Some(d), Some(b)) = (t.min_days(), t.bucket()) {
                            v.set_f64("cmp:temp_min_days", d as f64);
                            v.set_f64(format!("cmp:temp_{}", b.name()), 1.0);
                        }
                    }
                }
                MarkerGroup::Pronouns => {
                    for (c, &f) in &self.pronouns {
                        v.set_f64(format!("cmp:pron_{c}"), f);
                    }
                }
            }
        }
        v
    }
}

/// Every name a marker group can emit, in a fixed order.
pub fn marker_feature_names(group: MarkerGroup) -> Vec<String> {
    match group {
        MarkerGroup::Request => vec!["cmp:request".into()],
        MarkerGroup::Intensifiers => ["caps_frac", "initcap_frac", "capletter_frac", "excl_runs", "quest_runs", "elongated"]
            .iter()
            .map(|s| format!("cmp:{s}"))
            .collect(),
        MarkerGroup::Downgraders => DOWNGRADER_CATEGORIES
            .iter()
            .map(|c| format!("cmp:dg_{c}"))
            .chain(POLITENESS_CATEGORIES.iter().map(|c| format!("cmp:pol_{c}")))
            .collect(),
        MarkerGroup::Temporal => ["count", "min_days"]
            .iter()
            .map(|s| s.to_string())
            .chain(Granularity::ALL.iter().map(|g| g.name().to_string()))
            .map(|s| format!("cmp:temp_{s}"))
            .collect(),
        MarkerGroup::Pronouns => PRONOUN_CATEGORIES.iter().map(|c| format!("cmp:pron_{c}")).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::tokenize;

    fn markers(text: &str, date: Option<NaiveDate>) -> ComplaintMarkers {
        complaint_markers(&tokenize(text), text, date, &MarkerLexica::default())
    }

    #[test]
    fn shouting() {
        let m = markers("WHY IS THIS NOT WORKING???", None);
        assert_eq!(m.intensifiers.caps_word_frac, 1.0);
        assert_eq!(m.intensifiers.question_runs, 1);
        assert_eq!(m.intensifiers.exclamation_runs, 0);
        assert_eq!(m.intensifiers.caps_letter_frac, 1.0);
    }

    #[test]
    fn polite_request() {
        let m = markers("could you fix this please", None);
        assert!(m.request);
        assert!(m.politeness["politeness_marker"] >= 1);
        assert_eq!(m.politeness["subjunctive_modal"], 1);
        assert!(!markers("the order arrived", None).request);
        assert!(markers("where is your driver?", None).request);
    }

    #[test]
    fn greeting_only_at_start() {
        let m = markers("<USER> hi there", None);
        assert_eq!(m.politeness["greeting"], 1);
        let m = markers("well hi there", None);
        assert_eq!(m.politeness["greeting"], 0);
        assert_eq!(m.politeness["direct_start"], 1);
    }

    #[test]
    fn temporal_absent_without_date() {
        let m = markers("I ordered a week ago", None);
        assert!(m.temporal.is_none());
        let f: FeatureVector<f64> = m.to_features(&[MarkerGroup::Temporal], "s");
        assert!(f.is_empty());
        let d = NaiveDate::from_ymd_opt(2018, 3, 14).unwrap();
        let m = markers("I ordered a week ago", Some(d));
        let t = m.temporal.as_ref().unwrap();
        assert_eq!(t.expressions.len(), 1);
        assert_eq!(t.min_days(), Some(7));
        let f: FeatureVector<f64> = m.to_features(&[MarkerGroup::Temporal], "s");
        assert_eq!(f.get("cmp:temp_week"), 1.0);
        assert_eq!(f.get("cmp:temp_min_days"), 7.0);
    }

    #[test]
    fn elongation_and_pronouns() {
        let m = markers("sooo slow my order", None);
        assert_eq!(m.intensifiers.elongated, 1);
        assert_eq!(m.pronouns["first"], 0.25);
        let names: Vec<String> = [
            MarkerGroup::Request,
            MarkerGroup::Intensifiers,
            MarkerGroup::Downgraders,
            MarkerGroup::Temporal,
            MarkerGroup::Pronouns,
        ]
        .iter()
        .flat_map(|&g| marker_feature_names(g))
        .collect();
        let f: FeatureVector<f64> = m.to_features(
            &[MarkerGroup::Request, MarkerGroup::Intensifiers, MarkerGroup::Downgraders, MarkerGroup::Pronouns],
            "s",
        );
        assert!(f.names().all(|n| names.iter().any(|x| x == n)));
    }
}

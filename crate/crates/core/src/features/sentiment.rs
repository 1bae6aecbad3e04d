use std::collections::HashSet;
use std::sync::OnceLock;

use super::FeatureVector;
use crate::error::{Error, Result};
use crate::lexicons::bundled::{BOOSTERS_DOWN, BOOSTERS_UP, NEGATIONS};
use crate::lexicons::Lexicon;
use crate::scalar::Scalar;
use crate::textproc::Token;

pub const NRC_EMOTIONS: [&str; 8] = ["anger", "disgust", "fear", "joy", "sadness", "surprise", "trust", "anticipation"];

/// Scaling step added or removed by a booster word.
pub const BOOSTER_STEP: f64 = 0.293;
/// Multiplier for an all-caps sentiment word.
pub const CAPS_EMPHASIS: f64 = 1.5;
/// Per-'!' magnitude boost, for at most [`MAX_EXCLAMATIONS`].
pub const EXCLAMATION_STEP: f64 = 0.05;
pub const MAX_EXCLAMATIONS: usize = 3;
/// Tokens before a sentiment word searched for negations and boosters.
pub const WINDOW: usize = 3;
/// Normalization constant in `s / sqrt(s² + ALPHA)`.
pub const ALPHA: f64 = 15.0;

/// Optional sentiment resources.
#[derive(Clone, Debug, Default)]
pub struct SentimentLexica {
    /// categories `positive`, `negative`
    pub mpqa: Option<Lexicon>,
    /// categories `positive`, `negative` and the eight emotions
    pub nrc: Option<Lexicon>,
    /// scored word list for the rule-based scorer
    pub valence: Option<Lexicon>,
}

fn category<'a>(lex: &'a Lexicon, want: &str) -> Option<&'a str> {
    lex.categories()
        .iter()
        .find(|c| c.eq_ignore_ascii_case(want))
        .map(String::as_str)
}

fn polarity_cats<'a>(lex: &'a Lexicon, which: &str) -> Result<(&'a str, &'a str)> {
    match (category(lex, "positive"), category(lex, "negative")) {
        (Some(p), Some(n)) => Ok((p, n)),
        _ => Err(Error::Config(format!(
            "{which} lexicon {:?} needs `positive` and `negative` categories",
            lex.name
        ))),
    }
}

/// `sent:mpqa_pos` / `sent:mpqa_neg`: fractions of tokens in each list.
pub fn mpqa_scores<T: Scalar>(tokens: &[Token], lex: &Lexicon, schema: &str) -> Result<FeatureVector<T>> {
    let (p, n) = polarity_cats(lex, "MPQA")?;
    let mut v = FeatureVector::new(schema);
    if tokens.is_empty() {
        return Ok(v);
    }
    let len = tokens.len() as f64;
    let count = |cat: &str| tokens.iter().filter(|t| lex.contains_word(&t.lower, cat)).count() as f64;
    v.set_f64("sent:mpqa_pos", count(p) / len);
    v.set_f64("sent:mpqa_neg", count(n) / len);
    Ok(v)
}

/// NRC polarity, neutral (neither polarity) and emotion proportions.
pub fn nrc_scores<T: Scalar>(tokens: &[Token], lex: &Lexicon, schema: &str) -> Result<FeatureVector<T>> {
    let (p, n) = polarity_cats(lex, "NRC")?;
    let mut v = FeatureVector::new(schema);
    if tokens.is_empty() {
        return Ok(v);
    }
    let len = tokens.len() as f64;
    let (mut pos, mut neg, mut neutral) = (0usize, 0usize, 0usize);
    for t in tokens {
        let ip = lex.contains_word(&t.lower, p);
        let ineg = lex.contains_word(&t.lower, n);
        pos += ip as usize;
        neg += ineg as usize;
        neutral += (!ip && !ineg) as usize;
    }
    v.set_f64("sent:nrc_pos", pos as f64 / len);
    v.set_f64("sent:nrc_neg", neg as f64 / len);
    v.set_f64("sent:nrc_neutral", neutral as f64 / len);
    for emo in NRC_EMOTIONS {
        if let Some(cat) = category(lex, emo) {
            let c = tokens.iter().filter(|t| lex.contains_word(&t.lower, cat)).count();
            v.set_f64(format!("sent:nrc_{emo}"), c as f64 / len);
        }
    }
    Ok(v)
}

fn word_set(words: &'static [&'static str], cell: &'static OnceLock<HashSet<&'static str>>) -> &'static HashSet<&'static str> {
    cell.get_or_init(|| words.iter().copied().collect())
}

fn is_shouted(surface: &str) -> bool {
    let letters: Vec<char> = surface.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
}

/// Compound polarity in (−1, 1): mean adjusted valence of the scored words,
/// pushed away from zero by trailing exclamation marks, then squashed.
pub fn rule_compound(tokens: &[Token], valence: &Lexicon) -> f64 {
    static NEG: OnceLock<HashSet<&str>> = OnceLock::new();
    static UP: OnceLock<HashSet<&str>> = OnceLock::new();
    static DOWN: OnceLock<HashSet<&str>> = OnceLock::new();
    let neg = word_set(&NEGATIONS, &NEG);
    let up = word_set(&BOOSTERS_UP, &UP);
    let down = word_set(&BOOSTERS_DOWN, &DOWN);

    let mut scores = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if up.contains(t.lower.as_str()) || down.contains(t.lower.as_str()) {
            continue;
        }
        let Some(mut v) = valence.score(&t.lower) else { continue };
        if v == 0.0 {
            continue;
        }
        if is_shouted(&t.surface) {
            v *= CAPS_EMPHASIS;
        }
        let window = &tokens[i.saturating_sub(WINDOW)..i];
        for w in window {
            if up.contains(w.lower.as_str()) {
                v += v.signum() * BOOSTER_STEP;
            } else if down.contains(w.lower.as_str()) {
                v -= v.signum() * BOOSTER_STEP;
            }
        }
        if window.iter().any(|w| neg.contains(w.lower.as_str()) || w.lower.ends_with("n't")) {
            v = -v;
        }
        scores.push(v);
    }
    if scores.is_empty() {
        return 0.0;
    }
    let mut s = scores.iter().sum::<f64>() / scores.len() as f64;
    let bangs = tokens
        .iter()
        .filter(|t| !t.surface.is_empty() && t.surface.chars().all(|c| c == '!'))
        .map(|t| t.surface.chars().count())
        .max()
        .unwrap_or(0);
    s += s.signum() * EXCLAMATION_STEP * bangs.min(MAX_EXCLAMATIONS) as f64;
    s / (s * s + ALPHA).sqrt()
}

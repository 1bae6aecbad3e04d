use std::collections::HashSet;
use std::path::Path;

use super::{anonymize, Corpus, Document, Domain, Label};
use crate::error::{Error, Result};

/// Hashtags used to harvest complaint-like posts.
pub const DEFAULT_TRIGGER_HASHTAGS: [&str; 7] = [
    "#appallingcustomercare",
    "#badbusiness",
    "#badcustomerserivice",
    "#badservice",
    "#lostbusiness",
    "#unhappycustomer",
    "#worstbrand",
];

/// Removes every whole-token occurrence of a trigger hashtag
/// (case-insensitive) and collapses the leftover whitespace.
pub fn remove_hashtags(text: &str, triggers: &HashSet<String>) -> String {
    text.split_whitespace()
        .filter(|tok| {
            let bare = tok.trim_end_matches(|c: char| c.is_ascii_punctuation() && c != '_');
            !triggers.contains(&bare.to_lowercase())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn normalize_triggers(trigger_hashtags: &[String]) -> HashSet<String> {
    trigger_hashtags
        .iter()
        .map(|h| {
            let h = h.trim().to_lowercase();
            if h.starts_with('#') {
                h
            } else {
                format!("#{h}")
            }
        })
        .collect()
}

/// Builds a labeled corpus from raw positive and negative texts.
///
/// Trigger hashtags are stripped before anonymization; documents whose
/// lowercased clean text was already seen are dropped, first occurrence wins.
pub fn ingest_distant_texts(
    positives: &[String],
    negatives: &[String],
    trigger_hashtags: &[String],
) -> Result<Corpus> {
    if trigger_hashtags.is_empty() {
        return Err(Error::Ingestion("trigger hashtag set is empty".into()));
    }
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Ingestion("distant positive and negative sets must be non-empty".into()));
    }
    let triggers = normalize_triggers(trigger_hashtags);
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for (prefix, label, texts) in [
        ("dpos", Label::Complaint, positives),
        ("dneg", Label::NotComplaint, negatives),
    ] {
        for (i, raw) in texts.iter().enumerate() {
            let stripped = remove_hashtags(raw, &triggers);
            let clean = anonymize(&stripped);
            if clean.trim().is_empty() || !seen.insert(clean.to_lowercase()) {
                continue;
            }
            let mut doc = Document::new(format!("{prefix}-{}", i + 1), stripped, Domain::Unknown, label);
            doc.clean_text = clean;
            docs.push(doc);
        }
    }
    if docs.is_empty() {
        return Err(Error::Ingestion("no distant documents left after cleaning".into()));
    }
    Corpus::new(docs, "distant")
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let lines: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();
    if lines.is_empty() {
        return Err(Error::Ingestion(format!("{} contains no texts", path.display())));
    }
    Ok(lines)
}

/// Reads one raw text per line from each file.
pub fn ingest_distant(
    positives: impl AsRef<Path>,
    negatives: impl AsRef<Path>,
    trigger_hashtags: &[String],
) -> Result<Corpus> {
    let pos = read_lines(positives.as_ref())?;
    let neg = read_lines(negatives.as_ref())?;
    ingest_distant_texts(&pos, &neg, trigger_hashtags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags() -> Vec<String> {
        DEFAULT_TRIGGER_HASHTAGS.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn strips_trigger_and_labels_positive() {
        let c = ingest_distant_texts(
            &["ignored again #badservice".into()],
            &["nice day".into()],
            &["#badservice".into()],
        )
        .unwrap();
        assert_eq!(c.documents[0].clean_text, "ignored again");
        assert_eq!(c.documents[0].label, Label::Complaint);
        assert_eq!(c.documents[1].label, Label::NotComplaint);
    }

    #[test]
    fn non_trigger_hashtags_survive() {
        let t: HashSet<String> = ["#badservice".to_string()].into_iter().collect();
        assert_eq!(remove_hashtags("#BadService! #fail ok", &t), "#fail ok");
    }

    #[test]
    fn duplicates_dropped() {
        let c = ingest_distant_texts(
            &["Late AGAIN #worstbrand".into(), "late again".into()],
            &["x".into()],
            &tags(),
        )
        .unwrap();
        assert_eq!(c.count_label(Label::Complaint), 1);
    }

    #[test]
    fn balanced_inputs_stay_balanced_without_duplicates() {
        let pos: Vec<String> = (0..5).map(|i| format!("bad {i} #badbusiness")).collect();
        let neg: Vec<String> = (0..5).map(|i| format!("fine {i}")).collect();
        let c = ingest_distant_texts(&pos, &neg, &tags()).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.count_label(Label::Complaint), c.count_label(Label::NotComplaint));
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(ingest_distant_texts(&[], &["x".into()], &tags()).is_err());
        assert!(ingest_distant_texts(&["x".into()], &["y".into()], &[]).is_err());
        let only_tags = ingest_distant_texts(&["#badservice".into()], &["#badservice".into()], &tags());
        assert!(matches!(only_tags, Err(Error::Ingestion(_))));
    }
}

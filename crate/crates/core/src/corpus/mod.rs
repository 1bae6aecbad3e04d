//! Labeled corpora: ingestion, anonymization, fold planning and distantly
//! supervised data.

mod anonymize;
mod distant;
mod folds;

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;

pub use anonymize::{anonymize, URL_PLACEHOLDER, USER_PLACEHOLDER};
pub use distant::{ingest_distant, ingest_distant_texts, remove_hashtags, DEFAULT_TRIGGER_HASHTAGS};
pub use folds::{plan_nested_folds, plan_stratified, FoldPlan};

use crate::error::{Error, Result};
use crate::textproc::{self, TaggerModel, Token};

/// Industry domain of the customer-support handle a text was addressed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    FoodBeverage,
    Apparel,
    Retail,
    Cars,
    Services,
    Software,
    Transport,
    Electronics,
    Other,
    Unknown,
}

impl Domain {
    pub const ALL: [Domain; 9] = [
        Domain::FoodBeverage,
        Domain::Apparel,
        Domain::Retail,
        Domain::Cars,
        Domain::Services,
        Domain::Software,
        Domain::Transport,
        Domain::Electronics,
        Domain::Other,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            Domain::FoodBeverage => "food_beverage",
            Domain::Apparel => "apparel",
            Domain::Retail => "retail",
            Domain::Cars => "cars",
            Domain::Services => "services",
            Domain::Software => "software",
            Domain::Transport => "transport",
            Domain::Electronics => "electronics",
            Domain::Other => "other",
            Domain::Unknown => "unknown",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Domain::FoodBeverage => "Food & Beverage",
            Domain::Apparel => "Apparel",
            Domain::Retail => "Retail",
            Domain::Cars => "Cars",
            Domain::Services => "Services",
            Domain::Software => "Software & Online Services",
            Domain::Transport => "Transport",
            Domain::Electronics => "Electronics",
            Domain::Other => "Other",
            Domain::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        let d = match norm.as_str() {
            "" | "unknown" | "na" => Domain::Unknown,
            "foodbeverage" | "food" | "fb" => Domain::FoodBeverage,
            "apparel" => Domain::Apparel,
            "retail" => Domain::Retail,
            "cars" | "car" => Domain::Cars,
            "services" | "service" => Domain::Services,
            "software" | "softwareonlineservices" => Domain::Software,
            "transport" => Domain::Transport,
            "electronics" => Domain::Electronics,
            "other" => Domain::Other,
            _ => return Err(format!("unknown domain {s:?}")),
        };
        Ok(d)
    }
}

/// Annotation outcome for one text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    NotComplaint,
    Complaint,
    Unlabeled,
}

impl Label {
    pub fn from_binary(b: u8) -> Label {
        if b == 0 {
            Label::NotComplaint
        } else {
            Label::Complaint
        }
    }

    pub fn binary(self) -> Option<u8> {
        match self {
            Label::NotComplaint => Some(0),
            Label::Complaint => Some(1),
            Label::Unlabeled => None,
        }
    }

    fn parse(s: &str) -> Option<Label> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "complaint" => Some(Label::Complaint),
            "0" | "not_complaint" | "notcomplaint" => Some(Label::NotComplaint),
            "" | "unlabeled" => Some(Label::Unlabeled),
            _ => None,
        }
    }

    fn as_field(self) -> &'static str {
        match self {
            Label::NotComplaint => "0",
            Label::Complaint => "1",
            Label::Unlabeled => "",
        }
    }
}

/// One labeled text.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    /// `raw_text` after [`anonymize`].
    pub clean_text: String,
    pub domain: Domain,
    pub label: Label,
    pub post_date: Option<NaiveDate>,
    /// Filled by [`Corpus::tokenize`].
    pub tokens: Option<Vec<Token>>,
    /// Externally supplied tags, one per token, from a `pos_tags` column.
    pub pos_tags: Option<Vec<String>>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, domain: Domain, label: Label) -> Self {
        let raw_text = text.into();
        Document {
            id: id.into(),
            clean_text: anonymize(&raw_text),
            raw_text,
            domain,
            label,
            post_date: None,
            tokens: None,
            pos_tags: None,
        }
    }

    pub fn with_date(mut self, date: NaiveDate) -> Self {
        self.post_date = Some(date);
        self
    }

    pub fn tokens(&self) -> Result<&[Token]> {
        self.tokens
            .as_deref()
            .ok_or_else(|| Error::Contract(format!("document {} is not tokenized", self.id)))
    }
}

/// Ordered collection of documents in load order.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub source_tag: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, source_tag: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::Integrity(format!("duplicate document id {:?}", d.id)));
            }
        }
        Ok(Corpus {
            documents,
            source_tag: source_tag.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Binary labels; fails if any document is unlabeled.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.documents
            .iter()
            .map(|d| {
                d.label
                    .binary()
                    .ok_or_else(|| Error::Data(format!("document {} is unlabeled", d.id)))
            })
            .collect()
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.documents.iter().filter(|d| d.label == label).count()
    }

    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
            source_tag: self.source_tag.clone(),
        }
    }

    /// Domains present, in canonical order.
    pub fn domains(&self) -> Vec<Domain> {
        let mut ds: Vec<Domain> = self.documents.iter().map(|d| d.domain).collect();
        ds.sort();
        ds.dedup();
        ds
    }

    /// Tokenizes every document's clean text.
    pub fn tokenize(&mut self) {
        for d in &mut self.documents {
            d.tokens = Some(textproc::tokenize(&d.clean_text));
        }
    }

    /// Tags every document; supplied `pos_tags` columns take precedence when
    /// their length matches the token count.
    pub fn tag(&mut self, model: &TaggerModel) -> Result<()> {
        for d in &mut self.documents {
            let tokens = match d.tokens.take() {
                Some(t) => t,
                None => textproc::tokenize(&d.clean_text),
            };
            let tagged = match &d.pos_tags {
                Some(tags) if tags.len() == tokens.len() => tokens
                    .into_iter()
                    .zip(tags)
                    .map(|(mut t, tag)| {
                        t.pos = Some(tag.clone());
                        t
                    })
                    .collect(),
                _ => textproc::pos_tag(&tokens, model)?,
            };
            d.tokens = Some(tagged);
        }
        Ok(())
    }
}

const REQUIRED_COLUMNS: [&str; 4] = ["id", "text", "domain", "label"];

/// Loads a tab-separated corpus with header `id, text, domain, label[, date][, pos_tags]`.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file, "annotated")
}

pub fn read_corpus<R: Read>(reader: R, source_tag: &str) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = col(name).ok_or_else(|| Error::Schema(format!("missing required column {name:?}")))?;
    }
    let [id_col, text_col, domain_col, label_col] = idx;
    let date_col = col("date");
    let tags_col = col("pos_tags");

    let mut docs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        // header is line 1
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Row {
            row,
            message: e.to_string(),
        })?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let label_str = field(label_col);
        let label = Label::parse(label_str).ok_or_else(|| Error::Row {
            row,
            message: format!("malformed label {label_str:?}"),
        })?;
        let domain = field(domain_col).parse::<Domain>().map_err(|message| Error::Row { row, message })?;
        let mut doc = Document::new(field(id_col), field(text_col), domain, label);
        if let Some(c) = date_col {
            let raw = field(c);
            if !raw.trim().is_empty() {
                doc.post_date = Some(parse_date(raw).ok_or_else(|| Error::Row {
                    row,
                    message: format!("unparseable date {raw:?}"),
                })?);
            }
        }
        if let Some(c) = tags_col {
            let raw = field(c).trim();
            if !raw.is_empty() {
                doc.pos_tags = Some(raw.split(' ').map(str::to_owned).collect());
            }
        }
        docs.push(doc);
    }
    Corpus::new(docs, source_tag)
}

/// Accepts `YYYY-MM-DD`, an ISO timestamp, or the Twitter API
/// `Wed Oct 10 20:19:24 +0000 2018` form.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if let Some(head) = s.get(..10) {
        if let Ok(d) = NaiveDate::parse_from_str(head, "%Y-%m-%d") {
            return Some(d);
        }
    }
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() == 6 {
        let joined = format!("{} {} {}", parts[1], parts[2], parts[5]);
        return NaiveDate::parse_from_str(&joined, "%b %d %Y").ok();
    }
    None
}

/// Writes the corpus in the same format [`read_corpus`] consumes.
pub fn write_corpus<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let with_dates = corpus.documents.iter().any(|d| d.post_date.is_some());
    let with_tags = corpus.documents.iter().any(|d| d.pos_tags.is_some());
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .from_writer(writer);
    let mut header = vec!["id", "text", "domain", "label"];
    if with_dates {
        header.push("date");
    }
    if with_tags {
        header.push("pos_tags");
    }
    let csv_err = |e: csv::Error| Error::Data(format!("corpus write failed: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for d in &corpus.documents {
        let mut rec = vec![
            d.id.clone(),
            d.raw_text.clone(),
            d.domain.slug().to_owned(),
            d.label.as_field().to_owned(),
        ];
        if with_dates {
            rec.push(d.post_date.map(|x| x.format("%Y-%m-%d").to_string()).unwrap_or_default());
        }
        if with_tags {
            rec.push(d.pos_tags.as_ref().map(|t| t.join(" ")).unwrap_or_default());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<corpus writer>", e))?;
    Ok(())
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_corpus(corpus, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "id\ttext\tdomain\tlabel\n\
        a\t@FC_Help hi, I ordered a necklace\tapparel\t1\n\
        b\tlove this\tretail\t0\n\
        c\tstill broken http://x.co\tcars\t1\n";

    #[test]
    fn loads_three_rows() {
        let c = read_corpus(SMALL.as_bytes(), "annotated").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.count_label(Label::Complaint), 2);
        assert_eq!(c.documents[0].clean_text, "<USER> hi, I ordered a necklace");
        assert_eq!(c.documents[2].clean_text, "still broken <URL>");
        assert_eq!(c.documents[1].domain, Domain::Retail);
    }

    #[test]
    fn malformed_label_names_row() {
        let bad = "id\ttext\tdomain\tlabel\na\tx\tcars\t1\nb\ty\tcars\tmaybe\n";
        let err = read_corpus(bad.as_bytes(), "t").unwrap_err();
        match err {
            Error::Row { row, message } => {
                assert_eq!(row, 3);
                assert!(message.contains("maybe"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_schema_error() {
        let bad = "id\ttext\tlabel\na\tx\t1\n";
        assert!(matches!(read_corpus(bad.as_bytes(), "t"), Err(Error::Schema(_))));
    }

    #[test]
    fn duplicate_id_is_integrity_error() {
        let bad = "id\ttext\tdomain\tlabel\na\tx\tcars\t1\na\ty\tcars\t0\n";
        assert!(matches!(read_corpus(bad.as_bytes(), "t"), Err(Error::Integrity(_))));
    }

    #[test]
    fn round_trip_with_quotes_dates_and_tags() {
        let mut docs = vec![
            Document::new("1", "tab\there \"quoted\"\nnewline", Domain::Other, Label::Complaint),
            Document::new("2", "plain", Domain::Unknown, Label::Unlabeled),
        ];
        docs[0].post_date = NaiveDate::from_ymd_opt(2018, 3, 5);
        docs[1].pos_tags = Some(vec!["NN".into()]);
        let c = Corpus::new(docs, "annotated").unwrap();
        let mut buf = Vec::new();
        write_corpus(&c, &mut buf).unwrap();
        let back = read_corpus(buf.as_slice(), "annotated").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parses_twitter_dates() {
        assert_eq!(
            parse_date("Wed Oct 10 20:19:24 +0000 2018"),
            NaiveDate::from_ymd_opt(2018, 10, 10)
        );
        assert_eq!(parse_date("2018-03-05T10:00:00"), NaiveDate::from_ymd_opt(2018, 3, 5));
        assert_eq!(parse_date("yesterday"), None);
    }

    #[test]
    fn domain_parsing_accepts_display_names() {
        assert_eq!("Food & Beverage".parse::<Domain>().unwrap(), Domain::FoodBeverage);
        assert_eq!("Software & Online Services".parse::<Domain>().unwrap(), Domain::Software);
        assert!("toys".parse::<Domain>().is_err());
    }
}

//! Social-media aware tokenization and part-of-speech tagging.

mod lexical;
mod tagger;
mod tokenize;

pub use lexical::{is_emoticon, rule_tag, EMOTICONS};
pub use tagger::{
    accuracy, parse_tagged_sentences, pos_tag, read_tagged_corpus, train_pos_tagger,
    train_pos_tagger_on, TaggedSentence, TaggerModel, TrainReport, KNOWN_TAGS, TAGGER_HEADER,
};
pub use tokenize::tokenize;

use crate::corpus::{URL_PLACEHOLDER, USER_PLACEHOLDER};

/// One token of a document's clean text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    pub pos: Option<String>,
    /// Byte range into the clean text.
    pub span: (usize, usize),
}

impl Token {
    pub fn new(surface: &str, span: (usize, usize)) -> Self {
        Token {
            surface: surface.to_owned(),
            // placeholders are kept verbatim
            lower: if surface == USER_PLACEHOLDER || surface == URL_PLACEHOLDER {
                surface.to_owned()
            } else {
                surface.to_lowercase()
            },
            pos: None,
            span,
        }
    }

    pub fn tag(&self) -> Option<&str> {
        self.pos.as_deref()
    }
}

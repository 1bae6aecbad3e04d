//! Built-in word lists for downgraders, politeness markers, pronoun types and
//! the rule-based sentiment scorer.

use super::Lexicon;

pub const DOWNGRADER_CATEGORIES: [&str; 5] = ["play_down", "understater", "disarmer", "downtoner", "hedge"];

pub const POLITENESS_CATEGORIES: [&str; 8] = [
    "apology",
    "greeting",
    "direct_question",
    "direct_start",
    "indicative_modal",
    "subjunctive_modal",
    "politeness_marker",
    "politeness_maxim",
];

/// Politeness categories that only count at the start of the text.
pub const START_ANCHORED: [&str; 3] = ["greeting", "direct_question", "direct_start"];

pub const PRONOUN_CATEGORIES: [&str; 5] = ["first", "second", "third", "demonstrative", "indefinite"];

pub fn downgraders() -> Lexicon {
    Lexicon::from_entries(
        "downgraders",
        &[
            ("play_down", &["i wondered if", "i was wondering", "i wonder if", "wondering if", "i wondered whether"]),
            ("understater", &["one little", "a little", "a bit", "a tad", "a tiny", "slightly", "minor"]),
            ("disarmer", &["but", "however", "although", "though", "i know", "i understand", "i realize"]),
            ("downtoner", &["just", "perhaps", "maybe", "possibly", "simply", "probably", "rather"]),
            (
                "hedge",
                &["somewhat", "kind of", "sort of", "kinda", "sorta", "i think", "i guess", "i suppose", "seems", "apparently", "more or less"],
            ),
        ],
    )
}

pub fn politeness() -> Lexicon {
    Lexicon::from_entries(
        "politeness",
        &[
            ("apology", &["sorry", "apologize", "apologise", "apologies", "my bad", "excuse me", "pardon", "forgive me"]),
            (
                "greeting",
                &["hi", "hello", "hey", "dear", "good morning", "good afternoon", "good evening", "greetings", "hiya", "howdy"],
            ),
            ("direct_question", &["what", "why", "where", "when", "who", "how", "which"]),
            ("direct_start", &["so", "then", "and", "but", "or", "well"]),
            ("indicative_modal", &["can you", "will you", "can u", "will u", "can someone", "can anyone"]),
            ("subjunctive_modal", &["could you", "would you", "could u", "would u", "could someone", "would it be possible"]),
            ("politeness_marker", &["please", "pls", "plz", "kindly"]),
            (
                "politeness_maxim",
                &["i must say", "i have to say", "let me say", "i must admit", "i have to admit", "to be honest", "tbh", "with all due respect"],
            ),
        ],
    )
}

pub fn pronoun_types() -> Lexicon {
    Lexicon::from_entries(
        "pronouns",
        &[
            (
                "first",
                &["i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "i'm", "i've", "i'd", "i'll", "im", "ive", "we're", "we've"],
            ),
            (
                "second",
                &["you", "your", "yours", "yourself", "yourselves", "u", "ur", "you're", "you've", "you'll", "you'd", "ya", "y'all"],
            ),
            (
                "third",
                &[
                    "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself", "they", "them", "their",
                    "theirs", "themselves", "he's", "she's", "it's", "they're",
                ],
            ),
            ("demonstrative", &["this", "that", "these", "those"]),
            (
                "indefinite",
                &[
                    "everybody", "everyone", "everything", "somebody", "someone", "something", "anybody", "anyone", "anything",
                    "nobody", "nothing", "none", "each", "either", "neither", "another", "whoever", "whatever",
                ],
            ),
        ],
    )
}

pub const NEGATIONS: [&str; 31] = [
    "not", "no", "never", "nothing", "nobody", "none", "neither", "nor", "without", "cannot", "can't", "don't",
    "doesn't", "didn't", "won't", "wouldn't", "isn't", "aren't", "wasn't", "weren't", "haven't", "hasn't",
    "hadn't", "couldn't", "shouldn't", "ain't", "dont", "cant", "wont", "isnt", "n't",
];

pub const BOOSTERS_UP: [&str; 18] = [
    "very", "really", "so", "extremely", "absolutely", "totally", "completely", "incredibly", "super", "too",
    "most", "highly", "utterly", "entirely", "truly", "especially", "seriously", "fucking",
];

pub const BOOSTERS_DOWN: [&str; 10] = [
    "slightly", "somewhat", "barely", "hardly", "kinda", "sorta", "marginally", "partly", "less", "scarcely",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories_present() {
        let d = downgraders();
        for c in DOWNGRADER_CATEGORIES {
            assert!(d.has_category(c));
        }
        let p = politeness();
        for c in POLITENESS_CATEGORIES {
            assert!(p.has_category(c));
        }
        let pr = pronoun_types();
        for c in PRONOUN_CATEGORIES {
            assert!(pr.has_category(c));
        }
    }

    #[test]
    fn examples_match() {
        let p = politeness().match_words(&["could", "you", "fix", "this", "please"]);
        assert_eq!(p.count("subjunctive_modal"), 1);
        assert_eq!(p.count("politeness_marker"), 1);
        let d = downgraders().match_words(&["i", "wondered", "if", "it", "was", "just", "one", "little", "thing"]);
        assert_eq!(d.count("play_down"), 1);
        assert_eq!(d.count("downtoner"), 1);
        assert_eq!(d.count("understater"), 1);
    }
}

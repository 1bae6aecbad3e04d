use std::sync::OnceLock;

use regex::Regex;

pub const USER_PLACEHOLDER: &str = "<USER>";
pub const URL_PLACEHOLDER: &str = "<URL>";

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").expect("valid url regex"))
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@[A-Za-z0-9_]+").expect("valid mention regex"))
}

/// Replaces URLs with `<URL>` and @-handles with `<USER>`, leaving every
/// other character in place.
///
/// URLs are replaced first so handles embedded in a URL path disappear with
/// the URL.
pub fn anonymize(text: &str) -> String {
    let without_urls = url_re().replace_all(text, URL_PLACEHOLDER);
    mention_re()
        .replace_all(&without_urls, USER_PLACEHOLDER)
        .into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn replaces_leading_handle() {
        assert_eq!(
            anonymize("@FC_Help hi, I ordered"),
            "<USER> hi, I ordered"
        );
    }

    #[test]
    fn replaces_url_forms() {
        assert_eq!(anonymize("see http://a.co/x now"), "see <URL> now");
        assert_eq!(anonymize("go HTTPS://Foo.com/@bar"), "go <URL>");
        assert_eq!(anonymize("www.example.org is down"), "<URL> is down");
    }

    #[test]
    fn identity_without_markup() {
        assert_eq!(anonymize("no mentions here"), "no mentions here");
        assert_eq!(anonymize(""), "");
    }

    #[test]
    fn adjacent_handles() {
        assert_eq!(anonymize("@a@b"), "<USER><USER>");
    }

    proptest! {
        #[test]
        fn idempotent(s in "[ a-zA-Z0-9_@:/.#<>w]{0,40}") {
            let once = anonymize(&s);
            prop_assert_eq!(anonymize(&once), once.clone());
            prop_assert!(!mention_re().is_match(&once));
            prop_assert!(!url_re().is_match(&once));
        }
    }
}

use crate::corpus::{URL_PLACEHOLDER, USER_PLACEHOLDER};

/// Western emoticons recognized as single tokens, longest match first at
/// tokenization time.
pub const EMOTICONS: [&str; 52] = [
    ":)", ":-)", ":))", ":-))", ":(", ":-(", ":((", ":-((", ":D", ":-D", ";)", ";-)", ";(", ";D",
    ";P", ":P", ":-P", ":p", ":-p", ":o", ":O", ":-O", ":/", ":-/", ":\\", ":|", ":-|", ":'(",
    ":')", ":*", ":-*", ":3", ":>", ":<", ":]", ":[", ":$", ":@", "=)", "=(", "=D", "=P", "=/",
    "<3", "</3", "(:", "):", "^^", "^_^", "-_-", ">:(", ">:)",
];

pub fn is_emoticon(s: &str) -> bool {
    EMOTICONS.contains(&s)
}

/// Tags assigned by deterministic lexical rules before any statistical model.
pub fn rule_tag(surface: &str) -> Option<&'static str> {
    if surface == USER_PLACEHOLDER {
        return Some("USR");
    }
    if surface == URL_PLACEHOLDER {
        return Some("URL");
    }
    let mut chars = surface.chars();
    match chars.next() {
        Some('@') if surface.len() > 1 && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') => Some("USR"),
        Some('#') if surface.len() > 1 => Some("HT"),
        _ if is_emoticon(surface) => Some("UH"),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_tags() {
        assert_eq!(rule_tag("<USER>"), Some("USR"));
        assert_eq!(rule_tag("<URL>"), Some("URL"));
        assert_eq!(rule_tag("#fail"), Some("HT"));
        assert_eq!(rule_tag(":("), Some("UH"));
        assert_eq!(rule_tag("#"), None);
        assert_eq!(rule_tag("word"), None);
    }

    #[test]
    fn emoticons_are_distinct_and_non_alphanumeric_led() {
        let mut v = EMOTICONS.to_vec();
        v.sort_unstable();
        v.dedup();
        assert_eq!(v.len(), EMOTICONS.len());
        assert!(EMOTICONS.iter().all(|e| !e.chars().next().unwrap().is_alphanumeric()));
    }
}

use super::lexical::EMOTICONS;
use super::Token;
use crate::corpus::{URL_PLACEHOLDER, USER_PLACEHOLDER};

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '’' | '-')
}

/// Length in bytes of a word: word chars with internal apostrophes or hyphens.
fn word_len(s: &str) -> usize {
    let mut end = 0;
    let mut chars = s.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if is_word_char(c) {
            end = i + c.len_utf8();
        } else if is_joiner(c) && end == i {
            match chars.peek() {
                Some(&(_, next)) if is_word_char(next) => {}
                _ => break,
            }
        } else {
            break;
        }
    }
    end
}

/// Length of a number such as `7%`, `2018`, `3/5/2018` or `10:30`; zero if
/// the digits run straight into letters.
fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let digits = |from: usize| b[from..].iter().take_while(|c| c.is_ascii_digit()).count();
    let mut end = digits(0);
    if end == 0 {
        return 0;
    }
    while end + 1 < b.len() && matches!(b[end], b'.' | b',' | b':' | b'/') && b[end + 1].is_ascii_digit() {
        end += 1 + digits(end + 1);
    }
    if end < b.len() && b[end] == b'%' {
        end += 1;
    }
    match s[end..].chars().next() {
        Some(c) if is_word_char(c) => 0,
        _ => end,
    }
}

fn emoticon_len(s: &str) -> usize {
    EMOTICONS
        .iter()
        .filter(|e| s.starts_with(*e))
        .filter(|e| !s[e.len()..].chars().next().is_some_and(char::is_alphanumeric))
        .map(|e| e.len())
        .max()
        .unwrap_or(0)
}

fn tagged_len(s: &str, sigil: char) -> usize {
    let mut it = s.char_indices();
    match it.next() {
        Some((_, c)) if c == sigil => {}
        _ => return 0,
    }
    let end = it
        .take_while(|&(_, c)| is_word_char(c))
        .last()
        .map(|(i, c)| i + c.len_utf8());
    end.unwrap_or(0)
}

fn next_token_len(s: &str) -> usize {
    for ph in [USER_PLACEHOLDER, URL_PLACEHOLDER] {
        if s.starts_with(ph) {
            return ph.len();
        }
    }
    let first = s.chars().next().expect("non-empty remainder");
    if !first.is_alphanumeric() {
        let n = emoticon_len(s);
        if n > 0 {
            return n;
        }
    }
    if first == '#' || first == '@' {
        let n = tagged_len(s, first);
        if n > 0 {
            return n;
        }
    }
    if first.is_ascii_digit() {
        let n = number_len(s);
        if n > 0 {
            return n;
        }
    }
    if is_word_char(first) {
        return word_len(s);
    }
    if first.is_ascii_punctuation() || first.is_ascii_graphic() || is_unicode_punct(first) {
        return s.chars().take_while(|&c| c == first).map(char::len_utf8).sum();
    }
    first.len_utf8()
}

fn is_unicode_punct(c: char) -> bool {
    matches!(c, '…' | '“' | '”' | '‘' | '’' | '–' | '—' | '¡' | '¿')
}

/// Splits anonymized text into tokens.
///
/// Placeholders, emoticons, hashtags, numbers with `%`, contractions and runs
/// of a repeated punctuation character are kept whole. Every non-whitespace
/// character belongs to exactly one token.
pub fn tokenize(clean_text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chunk_start = None;
    let flush = |start: usize, end: usize, tokens: &mut Vec<Token>| {
        let mut pos = start;
        while pos < end {
            let len = next_token_len(&clean_text[pos..end]);
            tokens.push(Token::new(&clean_text[pos..pos + len], (pos, pos + len)));
            pos += len;
        }
    };
    for (i, c) in clean_text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = chunk_start.take() {
                flush(s, i, &mut tokens);
            }
        } else if chunk_start.is_none() {
            chunk_start = Some(i);
        }
    }
    if let Some(s) = chunk_start {
        flush(s, clean_text.len(), &mut tokens);
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn table_one_tweet() {
        let toks = surfaces("Shame you're introducing a man tax of 7% in 2018 :(");
        assert_eq!(
            toks,
            ["Shame", "you're", "introducing", "a", "man", "tax", "of", "7%", "in", "2018", ":("]
        );
    }

    #[test]
    fn placeholder_and_punctuation_run() {
        assert_eq!(surfaces("<USER> why???"), ["<USER>", "why", "???"]);
        assert_eq!(surfaces("<USER>,<URL>!!"), ["<USER>", ",", "<URL>", "!!"]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \t\n").is_empty());
    }

    #[test]
    fn contractions_hashtags_and_numbers() {
        assert_eq!(surfaces("can't won't #fail"), ["can't", "won't", "#fail"]);
        assert_eq!(surfaces("on 3/5/2018 at 10:30."), ["on", "3/5/2018", "at", "10:30", "."]);
        assert_eq!(surfaces("paid $50 for 4g"), ["paid", "$", "50", "for", "4g"]);
        assert_eq!(surfaces("'quoted' e-mail"), ["'", "quoted", "'", "e-mail"]);
        assert_eq!(surfaces("why:( <3"), ["why", ":(", "<3"]);
        assert_eq!(surfaces("?!"), ["?", "!"]);
    }

    #[test]
    fn lowercase_field() {
        let t = tokenize("WHY Not");
        assert_eq!(t[0].lower, "why");
        assert_eq!(t[1].lower, "not");
    }

    proptest! {
        #[test]
        fn partition_of_non_whitespace(s in "[ a-zA-Z0-9'#@:;()<>!?.,/%$^_\\-éü😀\t]{0,60}") {
            let toks = tokenize(&s);
            let mut last_end = 0;
            let mut covered = 0usize;
            for t in &toks {
                prop_assert!(t.span.0 >= last_end);
                prop_assert!(t.span.1 > t.span.0);
                prop_assert_eq!(&s[t.span.0..t.span.1], t.surface.as_str());
                prop_assert!(!t.surface.chars().any(char::is_whitespace));
                covered += t.surface.chars().count();
                last_end = t.span.1;
            }
            let non_ws = s.chars().filter(|c| !c.is_whitespace()).count();
            prop_assert_eq!(covered, non_ws);
        }
    }
}

//! Rule-based recognizer for time expressions, resolved to days elapsed
//! before the post date.

use std::sync::OnceLock;

use chrono::{Datelike, NaiveDate, Weekday};
use regex::{Captures, Regex};

/// Granularity bucket of a resolved expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Granularity {
    Day,
    Week,
    Month,
    Year,
}

impl Granularity {
    pub const ALL: [Granularity; 4] = [Granularity::Day, Granularity::Week, Granularity::Month, Granularity::Year];

    pub fn of_days(days: i64) -> Self {
        match days {
            d if d <= 1 => Granularity::Day,
            d if d <= 7 => Granularity::Week,
            d if d <= 31 => Granularity::Month,
            _ => Granularity::Year,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Granularity::Day => "day",
            Granularity::Week => "week",
            Granularity::Month => "month",
            Granularity::Year => "year",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalExpression {
    /// byte span in the input text
    pub span: (usize, usize),
    pub days: i64,
    pub granularity: Granularity,
}

const NUM: &str = r"\d+|an?|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|(?:a\s+)?couple(?:\s+of)?|(?:a\s+)?few|several";
const UNIT: &str = r"minute|min|hour|hr|day|week|wk|month|year|yr";
const WEEKDAY: &str = r"monday|tuesday|wednesday|thursday|friday|saturday|sunday";

fn pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        let src = format!(
            r"(?ix)
            \b(?P<iso_y>\d{{4}})-(?P<iso_m>\d{{1,2}})-(?P<iso_d>\d{{1,2}})\b
            | \b(?P<us_m>\d{{1,2}})/(?P<us_d>\d{{1,2}})(?:/(?P<us_y>\d{{2}}|\d{{4}}))?\b
            | \bfor\s+(?:the\s+(?:last|past)\s+)?(?P<for_n>{NUM})\s+(?P<for_u>{UNIT})s?\b
            | \b(?:the\s+)?(?:last|past)\s+(?P<past_n>{NUM})\s+(?P<past_u>{UNIT})s?\b
            | \b(?P<ago_n>{NUM})\s+(?P<ago_u>{UNIT})s?\s+ago\b
            | \blast\s+(?P<last>night|week|month|year|{WEEKDAY})\b
            | \b(?P<rel>yesterday|today|tonight|this\s+morning)\b
            | \b(?P<wd>{WEEKDAY})\b
            "
        );
        Regex::new(&src).expect("temporal pattern compiles")
    })
}

fn number(s: &str) -> Option<i64> {
    let s = s.to_lowercase();
    let s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if let Ok(n) = s.parse() {
        return Some(n);
    }
    Some(match s.as_str() {
        "a" | "an" | "one" => 1,
        "two" | "couple" | "a couple" | "couple of" | "a couple of" => 2,
        "three" | "few" | "a few" | "several" => 3,
        "four" => 4,
        "five" => 5,
        "six" => 6,
        "seven" => 7,
        "eight" => 8,
        "nine" => 9,
        "ten" => 10,
        "eleven" => 11,
        "twelve" => 12,
        _ => return None,
    })
}

fn unit_days(u: &str) -> i64 {
    match u.to_lowercase().as_str() {
        "week" | "wk" => 7,
        "month" => 30,
        "year" | "yr" => 365,
        "day" => 1,
        _ => 0,
    }
}

fn weekday(s: &str) -> Option<Weekday> {
    s.to_lowercase().parse().ok()
}

/// Days back from `post` to the most recent `wd` (0 when it is the same day).
fn days_since(post: NaiveDate, wd: Weekday) -> i64 {
    let p = post.weekday().num_days_from_monday() as i64;
    let w = wd.num_days_from_monday() as i64;
    (p - w).rem_euclid(7)
}

fn resolve(c: &Captures, post: NaiveDate) -> Option<i64> {
    let g = |name: &str| c.name(name).map(|m| m.as_str());
    let date_days = |y: i32, m: u32, d: u32| NaiveDate::from_ymd_opt(y, m, d).map(|date| (post - date).num_days());
    if let (Some(y), Some(m), Some(d)) = (g("iso_y"), g("iso_m"), g("iso_d")) {
        return date_days(y.parse().ok()?, m.parse().ok()?, d.parse().ok()?);
    }
    if let (Some(m), Some(d)) = (g("us_m"), g("us_d")) {
        let (m, d): (u32, u32) = (m.parse().ok()?, d.parse().ok()?);
        return match g("us_y") {
            Some(y) => {
                let y: i32 = y.parse().ok()?;
                let y = if y < 100 { 2000 + y } else { y };
                date_days(y, m, d)
            }
            // no year: the most recent such date not after the post
            None => match date_days(post.year(), m, d)? {
                n if n >= 0 => Some(n),
                _ => date_days(post.year() - 1, m, d),
            },
        };
    }
    for (n, u) in [("for_n", "for_u"), ("past_n", "past_u"), ("ago_n", "ago_u")] {
        if let (Some(n), Some(u)) = (g(n), g(u)) {
            return Some(number(n)? * unit_days(u));
        }
    }
    if let Some(l) = g("last") {
        return Some(match l.to_lowercase().as_str() {
            "night" => 1,
            "week" => 7,
            "month" => 30,
            "year" => 365,
            other => match days_since(post, weekday(other)?) {
                0 => 7,
                n => n,
            },
        });
    }
    if let Some(r) = g("rel") {
        return Some(if r.eq_ignore_ascii_case("yesterday") { 1 } else { 0 });
    }
    g("wd").and_then(weekday).map(|wd| days_since(post, wd))
}

/// Time expressions in `text` that resolve to a non-negative number of days
/// before `post`. Expressions pointing to the future are dropped.
pub fn recognize_temporal(text: &str, post: NaiveDate) -> Vec<TemporalExpression> {
    pattern()
        .captures_iter(text)
        .filter_map(|c| {
            let m = c.get(0).expect("whole match");
            let days = resolve(&c, post)?;
            (days >= 0).then(|| TemporalExpression {
                span: (m.start(), m.end()),
                days,
                granularity: Granularity::of_days(days),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn days(text: &str) -> Vec<(i64, Granularity)> {
        // 2018-03-14 was a Wednesday
        recognize_temporal(text, d(2018, 3, 14))
            .into_iter()
            .map(|e| (e.days, e.granularity))
            .collect()
    }

    #[test]
    fn week_ago() {
        assert_eq!(days("I ordered a week ago"), vec![(7, Granularity::Week)]);
    }

    #[test]
    fn rule_table() {
        assert_eq!(days("since yesterday"), vec![(1, Granularity::Day)]);
        assert_eq!(days("3 days ago and today"), vec![(3, Granularity::Week), (0, Granularity::Day)]);
        assert_eq!(days("waiting for 2 weeks"), vec![(14, Granularity::Month)]);
        assert_eq!(days("for the past three months"), vec![(90, Granularity::Year)]);
        assert_eq!(days("last month"), vec![(30, Granularity::Month)]);
        assert_eq!(days("ordered on Monday"), vec![(2, Granularity::Week)]);
        assert_eq!(days("last Wednesday"), vec![(7, Granularity::Week)]);
        assert_eq!(days("bought 2018-03-01"), vec![(13, Granularity::Month)]);
        assert_eq!(days("bought 3/5/2018"), vec![(9, Granularity::Month)]);
        assert_eq!(days("bought 12/25"), vec![(79, Granularity::Year)]);
        assert_eq!(days("open 24/7"), vec![]);
        assert_eq!(days("due 2019-01-01"), vec![]);
        assert_eq!(days("no time here"), vec![]);
    }
}

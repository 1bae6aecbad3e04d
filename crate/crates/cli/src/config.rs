//! Line-oriented `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use complaint_core::Error;

pub const KNOWN_KEYS: [&str; 36] = [
    "alpha",
    "batch_size",
    "clusters",
    "corpus",
    "distant",
    "distant_neg",
    "distant_pos",
    "dropout",
    "embed_dim",
    "embeddings",
    "epochs",
    "family",
    "features",
    "folds",
    "hashtags",
    "hidden",
    "inner",
    "jobs",
    "k",
    "liwc",
    "lr",
    "max_words",
    "mode",
    "model",
    "mpqa",
    "nrc",
    "out",
    "plan",
    "rho",
    "save_plan",
    "seed",
    "tagged",
    "tagger",
    "threshold",
    "top",
    "valence",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn user_error(msg: String) -> anyhow::Error {
    anyhow!(Error::Config(msg))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| user_error(format!("config line {}: expected key = value", i + 1)))?;
            let k = k.trim();
            if !KNOWN_KEYS.contains(&k) {
                bail!(Error::Config(format!("config line {}: unknown key {k:?}", i + 1)));
            }
            if values.insert(k.to_string(), v.trim().to_string()).is_some() {
                bail!(Error::Config(format!("config line {}: duplicate key {k:?}", i + 1)));
            }
        }
        Ok(RunConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path, e))
            .with_context(|| "reading run configuration")?;
        Self::parse(&text)
    }

    /// Flag values take precedence over file values.
    pub fn overlay<'a>(&mut self, flags: impl IntoIterator<Item = (&'a str, Option<String>)>) {
        for (k, v) in flags {
            debug_assert!(KNOWN_KEYS.contains(&k), "{k}");
            if let Some(v) = v {
                self.values.insert(k.to_string(), v);
            }
        }
    }

    pub fn set_default(&mut self, key: &str, value: impl ToString) {
        self.values.entry(key.to_string()).or_insert_with(|| value.to_string());
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.str(key).ok_or_else(|| user_error(format!("missing required setting {key:?} (flag --{})", key.replace('_', "-"))))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.str(key)
            .map(|v| v.parse::<T>().map_err(|e| user_error(format!("invalid value {v:?} for {key}: {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// The resolved configuration, itself a valid config file.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_overlay() {
        let mut c = RunConfig::parse("# run\nfeatures = bow\nseed = 7\n").unwrap();
        c.overlay([("seed", Some("9".to_string())), ("model", None)]);
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(9));
        assert_eq!(c.str("features"), Some("bow"));
        assert_eq!(c.str("model"), None);
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("seed 7").is_err());
        assert!(RunConfig::parse("seed = 1\nseed = 2").is_err());
    }
}

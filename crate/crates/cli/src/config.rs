//! `key = value` run configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{read_file, CliError, CliResult};

/// Every key a config file may set. Keys use the long flag spelling.
pub const KNOWN_KEYS: &[&str] = &[
    "average-seconds",
    "bands",
    "clusters",
    "color-by",
    "components",
    "cycle-cutoff",
    "dims",
    "gamma",
    "hop",
    "iterations",
    "kernel",
    "label-col",
    "label-cols",
    "landmarks",
    "learning-rate",
    "method",
    "normal-where",
    "perplexity",
    "rate",
    "seed",
    "standardize",
    "threshold",
    "window",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::usage(format!("config line {}: expected `key = value`", n + 1)));
            };
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("config line {}: unknown key '{key}'", n + 1)));
            }
            let value = v.trim();
            if value.is_empty() {
                return Err(CliError::usage(format!("config line {}: empty value for '{key}'", n + 1)));
            }
            if values.insert(key.clone(), value.to_string()).is_some() {
                return Err(CliError::usage(format!("config line {}: duplicate key '{key}'", n + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::parse(&read_file(path)?).map_err(|e| e.context(path.display()))
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse_value(key, v).map(Some),
        }
    }

    /// Flag value if given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    /// Like [`Config::pick`] with no default.
    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| CliError::usage(format!("config key '{key}': cannot parse '{v}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let c = Config::parse("# run\nperplexity = 50  # wider neighbourhoods\n\n seed=7\nlearning_rate = 100\n").unwrap();
        assert_eq!(c.get::<f64>("perplexity").unwrap(), Some(50.0));
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(c.get::<f64>("learning-rate").unwrap(), Some(100.0));
        assert_eq!(c.get::<f64>("gamma").unwrap(), None);
    }

    #[test]
    fn flags_win() {
        let c = Config::parse("seed = 7").unwrap();
        assert_eq!(c.pick(Some(3u64), "seed", 0).unwrap(), 3);
        assert_eq!(c.pick(None, "seed", 0u64).unwrap(), 7);
        assert_eq!(c.pick(None, "window", 4096usize).unwrap(), 4096);
    }

    #[test]
    fn rejects_bad_files() {
        for bad in ["perplexity", "bogus = 1", "seed = 1\nseed = 2", "seed ="] {
            assert!(Config::parse(bad).is_err(), "{bad}");
        }
        let c = Config::parse("seed = many").unwrap();
        assert!(c.get::<u64>("seed").is_err());
    }
}

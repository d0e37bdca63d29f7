//! `key = value` configuration text.
//!
//! Blank lines and lines starting with `#` are ignored; a trailing `# ...`
//! after a value is a comment. Keys are case-sensitive and unique.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{FrameError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| FrameError::Parse {
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(FrameError::Parse {
                    line: i + 1,
                    message: "empty key".into(),
                });
            }
            let value = value.trim().trim_matches('"');
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(FrameError::Parse {
                    line: i + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Config { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| FrameError::io(path, e))?;
        Config::parse(&text)
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    /// Entries of `other` replace ours.
    pub fn merge(&mut self, other: Config) {
        self.entries.extend(other.entries);
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| FrameError::Config(format!("invalid value `{v}` for `{key}`"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| FrameError::Config(format!("missing required key `{key}`")))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Fails on any key outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(FrameError::Config(format!(
                "unknown key `{k}` (expected one of: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

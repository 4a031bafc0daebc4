//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment line. Lists are
//! comma-separated and ranges are written `lo..hi` (inclusive).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config line {line}: {key} set twice")]
    Duplicate { line: usize, key: String },
    #[error("unknown config field {0:?}")]
    UnknownField(String),
    #[error("config field {field}: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_owned(),
            message: message.into(),
        }
    }
}

/// Parsed assignments. Fields are consumed with the `take_*` helpers;
/// [`Config::finish`] rejects anything left over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1 });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1 });
            }
            if entries
                .insert(key.to_owned(), value.trim().to_owned())
                .is_some()
            {
                return Err(ConfigError::Duplicate {
                    line: i + 1,
                    key: key.to_owned(),
                });
            }
        }
        Ok(Config { entries })
    }

    pub fn take<T: FromStr>(&mut self, key: &str, slot: &mut T) -> Result<(), ConfigError>
    where
        T::Err: Display,
    {
        if let Some(raw) = self.entries.remove(key) {
            *slot = raw
                .parse()
                .map_err(|e: T::Err| ConfigError::invalid(key, e.to_string()))?;
        }
        Ok(())
    }

    pub fn take_range(&mut self, key: &str, slot: &mut (usize, usize)) -> Result<(), ConfigError> {
        if let Some(raw) = self.entries.remove(key) {
            let parsed = raw
                .split_once("..")
                .and_then(|(lo, hi)| Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?)));
            match parsed {
                Some((lo, hi)) if lo <= hi => *slot = (lo, hi),
                _ => return Err(ConfigError::invalid(key, format!("bad range {raw:?}"))),
            }
        }
        Ok(())
    }

    pub fn take_list(&mut self, key: &str, slot: &mut Vec<String>) -> Result<(), ConfigError> {
        if let Some(raw) = self.entries.remove(key) {
            *slot = raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect();
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_keys().next() {
            Some(key) => Err(ConfigError::UnknownField(key)),
            None => Ok(()),
        }
    }
}

/// Renders assignments in the format [`Config::parse`] reads.
#[derive(Default)]
pub struct ConfigWriter {
    out: String,
}

impl ConfigWriter {
    pub fn field(mut self, key: &str, value: impl Display) -> Self {
        self.out.push_str(&format!("{key} = {value}\n"));
        self
    }

    pub fn range(self, key: &str, (lo, hi): (usize, usize)) -> Self {
        self.field(key, format!("{lo}..{hi}"))
    }

    pub fn list(self, key: &str, items: &[String]) -> Self {
        self.field(key, items.join(","))
    }

    pub fn finish(self) -> String {
        self.out
    }
}

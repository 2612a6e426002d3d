//! Plain-text `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the long
//! CLI flag names without dashes (`mesh-type`, `k`, `N`, `epsilon`, ...).
//! A key may repeat, and a value may hold a comma-separated list.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, Vec<String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1))
            })?;
            let key = key.trim().trim_start_matches('-').to_string();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            let entry = values.entry(key).or_default();
            entry.extend(
                value
                    .split(',')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(String::from),
            );
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> &[String] {
        self.values.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All values of `key`, parsed.
    pub fn list<T>(&self, key: &str) -> Result<Vec<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .iter()
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Config(format!("{key}: cannot parse `{v}`: {e}")))
            })
            .collect()
    }

    /// The last value of `key`, parsed.
    pub fn single<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.list::<T>(key)?.pop())
    }
}

/// CLI values take precedence; the config file fills in what was not given.
pub fn merge_list<T>(cli: Vec<T>, file: &ConfigFile, key: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if cli.is_empty() {
        file.list(key)
    } else {
        Ok(cli)
    }
}

pub fn merge_single<T>(cli: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    match cli {
        Some(v) => Ok(Some(v)),
        None => file.single(key),
    }
}

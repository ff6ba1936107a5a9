//! Flat `key = value` run files. Keys are long flag names without dashes
//! prefix; values use flag syntax. Lines starting with `#` are comments.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use super::CliError;

#[derive(Debug, Default)]
pub struct RunFile {
    entries: BTreeMap<String, String>,
    consulted: RefCell<BTreeSet<String>>,
}

impl RunFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::parameter(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::parameter(format!("config line {}: expected key = value", n + 1)))?;
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::parameter(format!("config key '{key}' given twice")));
            }
        }
        Ok(Self {
            entries,
            consulted: RefCell::default(),
        })
    }

    /// `flag` if given on the command line, else the run-file value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.consulted.borrow_mut().insert(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::parameter(format!("config key '{key}': {e}"))),
        }
    }

    pub fn pick_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    /// Fails on keys that the command never asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let consulted = self.consulted.borrow();
        match self.entries.keys().find(|k| !consulted.contains(*k)) {
            Some(k) => Err(CliError::parameter(format!("config key '{k}' is not used by this command"))),
            None => Ok(()),
        }
    }
}

/// Comma-separated list of values; an empty string is an empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<T>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

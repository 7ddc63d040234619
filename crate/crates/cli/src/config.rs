//! `key = value` configuration files. Flags override file values, which
//! override built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            values.insert(key.trim().replace('-', "_"), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value if given, else the parsed config entry, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }

    /// Boolean switches: a set flag wins, otherwise `true`/`false` from the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

//! Optional `key = value` configuration file. Flags given on the command
//! line take precedence over values from the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

/// Keys accepted in a config file.
pub const KEYS: [&str; 10] = ["z", "digits", "n", "stride", "cache_dir", "offline", "threads", "csv", "svg", "oeis"];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, (usize, String)>,
    source: PathBuf,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// Blank lines and lines starting with `#` are ignored. Keys are
    /// case-insensitive; `N` and `n` are the same key.
    pub fn parse(text: &str, source: &Path) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| CliError::Config { path: source.to_path_buf(), line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let key = key.trim().to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if values.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(ConfigFile { values, source: source.to_path_buf() })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, raw)) = self.values.get(key) else { return Ok(None) };
        raw.parse().map(Some).map_err(|e| CliError::Config {
            path: self.source.clone(),
            line: *line,
            msg: format!("bad value for `{key}`: {e}"),
        })
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        let Some((line, raw)) = self.values.get(key) else { return Ok(false) };
        match raw.to_ascii_lowercase().as_str() {
            "1" | "true" | "yes" | "on" => Ok(true),
            "0" | "false" | "no" | "off" => Ok(false),
            _ => Err(CliError::Config { path: self.source.clone(), line: *line, msg: format!("`{key}` expects true or false") }),
        }
    }
}

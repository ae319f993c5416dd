//! Plain-text key-value config files for reproducible sweep recipes.
//!
//! Format: one `key = value` per line, `#` starts a comment. Keys use the
//! canonical flag names without the leading dashes (`q0`, `eta-ab`, ...).
//! Command-line flags override file values; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config(format!(
                    "line {}: empty key or value",
                    lineno + 1
                )));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!("duplicate config key '{key}'")));
            }
        }
        Ok(Self { entries })
    }

    /// Rejects any key not accepted by the current subcommand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown config key '{key}' (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("config key '{key}': '{v}' is not a number")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("config key '{key}': '{v}' is not a count")))
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.entries
            .get(key)
            .map(|v| match v.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::Config(format!(
                    "config key '{key}': '{other}' is not a boolean"
                ))),
            })
            .transpose()
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Flag value if given, else config value, else the default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let cfg = ConfigFile::parse("# recipe\nq0 = 0.4\neta-ab=0.5  # inline\n\n").unwrap();
        assert_eq!(cfg.get_f64("q0").unwrap(), Some(0.4));
        assert_eq!(cfg.get_f64("eta-ab").unwrap(), Some(0.5));
        assert!(cfg.check_keys(&["q0", "eta-ab"]).is_ok());
        assert!(cfg.check_keys(&["q0"]).is_err());
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(ConfigFile::parse("q0 = 0.4\nq0 = 0.5\n").is_err());
        assert!(ConfigFile::parse("just a line\n").is_err());
        let cfg = ConfigFile::parse("steps = many\n").unwrap();
        assert!(cfg.get_usize("steps").is_err());
    }
}

//! `key=value` configuration files. Blank lines and `#` comments are ignored;
//! unknown keys and non-positive limits are rejected.

use std::fmt;

use msens_core::{Error, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub limits: Limits,
    pub seed: u64,
    pub verbosity: u8,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            limits: Limits::default(),
            seed: 0,
            verbosity: 1,
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_dense={} max_bitmask_n={} enumeration_budget={} seed={} verbosity={}",
            self.limits.max_dense,
            self.limits.max_bitmask_n,
            self.limits.enumeration_budget,
            self.seed,
            self.verbosity
        )
    }
}

fn parse_err(line: usize, column: usize, message: String) -> Error {
    Error::Parse {
        line,
        column,
        message,
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut config = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let col = raw.len() - raw.trim_start().len() + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                parse_err(i + 1, col, format!("expected key=value, found '{line}'"))
            })?;
            config
                .set(key.trim(), value.trim())
                .map_err(|msg| parse_err(i + 1, col, msg))?;
        }
        Ok(config)
    }

    /// Applies one setting; the error is a message without position.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn positive<T: std::str::FromStr + PartialOrd + Default>(
            key: &str,
            value: &str,
        ) -> std::result::Result<T, String> {
            match value.parse::<T>() {
                Ok(v) if v > T::default() => Ok(v),
                _ => Err(format!("{key} must be a positive integer, got '{value}'")),
            }
        }
        match key {
            "max_dense" => self.limits.max_dense = positive(key, value)?,
            "max_bitmask_n" => self.limits.max_bitmask_n = positive(key, value)?,
            "enumeration_budget" => self.limits.enumeration_budget = positive(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| format!("seed must be an unsigned integer, got '{value}'"))?
            }
            "verbosity" => {
                self.verbosity = value
                    .parse()
                    .map_err(|_| format!("verbosity must be 0..=255, got '{value}'"))?
            }
            other => return Err(format!("unknown config key '{other}'")),
        }
        Ok(())
    }
}

//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # paper setup, slower adaptation
//! t_end = 60
//! phi = 1.5
//! centers = -0.5, -0.1, -0.05, 0, 0.05, 0.1, 0.5
//! ```
//!
//! Keys not present keep their defaults.

use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

use crate::error::Error;
use crate::sim::SimConfig;

/// Every recognised key, in manifest order.
pub const KEYS: [&str; 15] = [
    "t_end",
    "plant_rate",
    "control_rate",
    "x0",
    "mu",
    "b",
    "m",
    "delta_l",
    "delta_r",
    "lambda",
    "kappa",
    "phi",
    "centers",
    "log_dhat",
    "seedless",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config key `{key}`: {reason}")]
    Key { key: String, reason: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

impl ConfigError {
    fn key(key: &str, reason: impl Display) -> Self {
        Self::Key {
            key: key.to_string(),
            reason: reason.to_string(),
        }
    }

    /// Offending key, when there is one.
    pub fn offending_key(&self) -> Option<&str> {
        match self {
            Self::Key { key, .. } => Some(key),
            _ => None,
        }
    }
}

fn number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|e| ConfigError::key(key, format!("`{value}` is not a number ({e})")))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}

fn flag(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(ConfigError::key(key, format!("`{other}` is not a boolean"))),
    }
}

fn rate(key: &str, value: &str) -> Result<u32, ConfigError> {
    value
        .trim()
        .parse::<u32>()
        .map_err(|e| ConfigError::key(key, format!("`{value}` is not a positive integer ({e})")))
}

/// Sets one key on `cfg`. Values are checked for syntax only; see [`validate`].
pub fn set(cfg: &mut SimConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "t_end" => cfg.t_end = number(key, value)?,
        "plant_rate" => cfg.plant_rate = rate(key, value)?,
        "control_rate" => cfg.control_rate = rate(key, value)?,
        "x0" => cfg.x0 = list(key, value)?,
        "mu" => cfg.mu = number(key, value)?,
        "b" => cfg.b = number(key, value)?,
        "m" => cfg.m = number(key, value)?,
        "delta_l" => cfg.delta_l = number(key, value)?,
        "delta_r" => cfg.delta_r = number(key, value)?,
        "lambda" => cfg.lambda = number(key, value)?,
        "kappa" => cfg.kappa = number(key, value)?,
        "phi" => cfg.phi = number(key, value)?,
        "centers" => cfg.centers = list(key, value)?,
        "log_dhat" => cfg.log_dhat = flag(key, value)?,
        // reserved: runs carry no randomness
        "seedless" => {
            flag(key, value)?;
        }
        _ => return Err(ConfigError::key(key, "unknown key")),
    }
    Ok(())
}

/// Semantic validation, reporting the key at fault.
pub fn validate(cfg: &SimConfig) -> Result<(), ConfigError> {
    cfg.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => ConfigError::key(name, reason),
        other => ConfigError::key("config", other),
    })
}

/// Parses config text over the defaults. The result is not yet validated.
pub fn parse(text: &str) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: i + 1 })?;
        set(&mut cfg, key.trim(), value.trim())?;
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<SimConfig, ConfigError> {
    parse(&std::fs::read_to_string(path)?)
}

/// Shortest representation that parses back to the same value.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

fn format_list(values: &[f64]) -> String {
    values.iter().map(|v| format_value(*v)).collect::<Vec<_>>().join(", ")
}

/// Every key with its resolved value, in [`KEYS`] order.
pub fn echo(cfg: &SimConfig) -> Vec<(&'static str, String)> {
    KEYS.iter()
        .map(|&k| {
            let v = match k {
                "t_end" => format_value(cfg.t_end),
                "plant_rate" => cfg.plant_rate.to_string(),
                "control_rate" => cfg.control_rate.to_string(),
                "x0" => format_list(&cfg.x0),
                "mu" => format_value(cfg.mu),
                "b" => format_value(cfg.b),
                "m" => format_value(cfg.m),
                "delta_l" => format_value(cfg.delta_l),
                "delta_r" => format_value(cfg.delta_r),
                "lambda" => format_value(cfg.lambda),
                "kappa" => format_value(cfg.kappa),
                "phi" => format_value(cfg.phi),
                "centers" => format_list(&cfg.centers),
                "log_dhat" => cfg.log_dhat.to_string(),
                "seedless" => "true".to_string(),
                _ => unreachable!(),
            };
            (k, v)
        })
        .collect()
}

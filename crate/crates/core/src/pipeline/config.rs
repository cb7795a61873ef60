//! Run configuration. The file format is UTF-8 `key = value` lines with `#`
//! comments:
//!
//! | key           | value                                  | default     |
//! |---------------|----------------------------------------|-------------|
//! | seed          | unsigned 64-bit integer                | 0           |
//! | grid          | `WxH`                                  | 4x4         |
//! | iterations    | positive integer                       | 1000        |
//! | alpha         | learning rate in [0,1]                 | 0.2         |
//! | radius        | neighborhood radius, grid units        | 1.2         |
//! | decay         | `constant` or `linear`                 | constant    |
//! | mode          | `translation` or `rigid`               | translation |
//! | register      | `true` / `false`                       | true        |
//! | normalize     | `true` / `false`                       | true        |
//! | anchor        | `last` or a 0-based entry index        | last        |
//! | year_fix      | `as-printed` or `relabel-1990`         | as-printed  |
//! | decimal_comma | accept ',' decimals in covariate files | true        |

use std::path::PathBuf;

use thiserror::Error;

use crate::imaging::TransformMode;
use crate::som::{DecayMode, TrainingParams};
use crate::stats::YearFix;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value for {key}: {message}")]
    Value { line: usize, key: String, message: String },
    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorPolicy {
    #[default]
    Last,
    Index(usize),
}

impl AnchorPolicy {
    pub fn resolve(self, len: usize) -> Option<usize> {
        match self {
            AnchorPolicy::Last => len.checked_sub(1),
            AnchorPolicy::Index(i) => (i < len).then_some(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub som: TrainingParams,
    pub grid: (usize, usize),
    pub mode: TransformMode,
    pub register: bool,
    pub normalize: bool,
    pub anchor: AnchorPolicy,
    pub year_fix: YearFix,
    pub decimal_comma: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            som: TrainingParams::default(),
            grid: (4, 4),
            mode: TransformMode::Translation,
            register: true,
            normalize: true,
            anchor: AnchorPolicy::Last,
            year_fix: YearFix::AsPrinted,
            decimal_comma: true,
        }
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("'{v}' is not a valid number"))
        }
        fn flag(v: &str) -> Result<bool, String> {
            match v {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(format!("'{v}' is not a boolean")),
            }
        }
        match key {
            "seed" => self.som.seed = num(value)?,
            "grid" => self.grid = parse_grid_dims(value)?,
            "iterations" => self.som.iterations = num(value)?,
            "alpha" => self.som.learning_rate = num(value)?,
            "radius" => self.som.neighborhood_radius = num(value)?,
            "decay" => self.som.decay = value.parse::<DecayMode>()?,
            "mode" => self.mode = value.parse()?,
            "register" => self.register = flag(value)?,
            "normalize" => self.normalize = flag(value)?,
            "anchor" => {
                self.anchor = match value {
                    "last" => AnchorPolicy::Last,
                    v => AnchorPolicy::Index(num(v)?),
                }
            }
            "year_fix" => self.year_fix = value.parse()?,
            "decimal_comma" => self.decimal_comma = flag(value)?,
            _ => return Err(UNKNOWN_KEY.to_owned()),
        }
        self.som.validate().map_err(|e| e.to_string())
    }
}

const UNKNOWN_KEY: &str = "\0unknown";

/// Parses `WxH` (also accepts `W×H` and `W,H`).
pub fn parse_grid_dims(text: &str) -> Result<(usize, usize), String> {
    let (w, h) = text
        .split_once(['x', 'X', '×', ','])
        .ok_or_else(|| format!("'{text}' is not WxH"))?;
    let dim = |s: &str| {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| format!("'{text}' is not WxH with positive sides"))
    };
    Ok((dim(w)?, dim(h)?))
}

/// Parses a config file on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        config.set(key, value).map_err(|message| {
            if message == UNKNOWN_KEY {
                ConfigError::UnknownKey {
                    line,
                    key: key.to_owned(),
                }
            } else {
                ConfigError::Value {
                    line,
                    key: key.to_owned(),
                    message,
                }
            }
        })?;
    }
    Ok(config)
}

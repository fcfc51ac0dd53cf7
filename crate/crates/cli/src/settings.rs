//! Flag / config-file / default resolution.
//!
//! Every knob follows the same precedence: an explicit command-line flag
//! wins, then a `key=value` line from the optional config file, then the
//! per-command default.  Config files keep the exact flag names as keys
//! (`convention`, `theta`, `epsilon`, `format`, `out`, `in1`, `in2`),
//! allow blank lines and `#` comments, and reject unknown keys so typos
//! fail loudly instead of silently falling back to defaults.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use homsim::Convention;

use crate::CliError;

/// Serialization target for a command's primary output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!(
                "unknown format `{other}` (expected csv, json, or text)"
            )),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "text",
        })
    }
}

impl Format {
    /// File extension for grid files written under this format.
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

/// Flags shared by every subcommand, still unresolved (None = not given).
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Scattering-matrix convention: complex-symmetric, asymmetric, or
    /// real-rotation.
    #[arg(long, global = true)]
    pub convention: Option<String>,

    /// Mixing angle in radians, in [0, pi]; pi/2 is the balanced 50:50
    /// splitter.
    #[arg(long, global = true)]
    pub theta: Option<f64>,

    /// Tail-mass bound used when truncating coherent/thermal inputs.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    /// Output format: csv, json, or text (per-command defaults vary).
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Output file (or directory for figure1); standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Optional key=value config file supplying defaults for the flags
    /// above plus in1/in2.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Per-command defaults that the shared resolution fills in last.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub epsilon: f64,
    pub format: Format,
}

pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub convention: Convention,
    pub theta: f64,
    pub epsilon: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub in1: Option<String>,
    pub in2: Option<String>,
}

const CONFIG_KEYS: [&str; 7] = [
    "convention",
    "theta",
    "epsilon",
    "format",
    "out",
    "in1",
    "in2",
];

fn parse_config(text: &str, origin: &str) -> Result<HashMap<String, String>, CliError> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{origin}:{}: expected key=value, found `{line}`",
                idx + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "{origin}:{}: unknown config key `{key}` (known: {})",
                idx + 1,
                CONFIG_KEYS.join(", ")
            )));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "{origin}:{}: duplicate config key `{key}`",
                idx + 1
            )));
        }
    }
    Ok(map)
}

fn parse_f64(value: &str, what: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("{what}: `{value}` is not a number")))
}

impl Settings {
    /// Resolve flags against the optional config file and the command's
    /// defaults.
    pub fn resolve(common: &CommonArgs, defaults: Defaults) -> Result<Self, CliError> {
        let config = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("reading {}", path.display()), e))?;
                parse_config(&text, &path.display().to_string())?
            }
            None => HashMap::new(),
        };

        let convention = match common
            .convention
            .clone()
            .or_else(|| config.get("convention").cloned())
        {
            Some(name) => name
                .parse::<Convention>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            None => Convention::ComplexSymmetric,
        };

        let theta = match common.theta {
            Some(t) => t,
            None => match config.get("theta") {
                Some(v) => parse_f64(v, "config theta")?,
                None => FRAC_PI_2,
            },
        };

        let epsilon = match common.epsilon {
            Some(e) => e,
            None => match config.get("epsilon") {
                Some(v) => parse_f64(v, "config epsilon")?,
                None => defaults.epsilon,
            },
        };

        let format = match common
            .format
            .clone()
            .or_else(|| config.get("format").cloned())
        {
            Some(name) => name.parse::<Format>().map_err(CliError::Usage)?,
            None => defaults.format,
        };

        let out = common
            .out
            .clone()
            .or_else(|| config.get("out").map(PathBuf::from));

        Ok(Settings {
            convention,
            theta,
            epsilon,
            format,
            out,
            in1: config.get("in1").cloned(),
            in2: config.get("in2").cloned(),
        })
    }
}

/// Parse a comma-separated list with a single uniform error shape.
pub fn parse_list<T: FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| CliError::Usage(format!("{what}: `{s}` is not valid")))
        })
        .collect()
}

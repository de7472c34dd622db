//! `key=value` defaults file. Blank lines and `#` comments are ignored;
//! command-line flags always win over file values.

use std::path::Path;

use crate::args::{parse_pair, Format};
use crate::error::CliError;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Config {
    pub prior: Option<(f64, f64)>,
    pub preset: Option<usize>,
    pub lot_size: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: String| format!("line {}: {msg}", lineno + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| v.parse::<u64>().map_err(|e| at(format!("{key}: {e}")));
            match key {
                "prior" => cfg.prior = Some(parse_pair(value).map_err(at)?),
                "preset" => cfg.preset = Some(int(value)? as usize),
                "lot_size" => cfg.lot_size = Some(int(value)?),
                "trials" => cfg.trials = Some(int(value)?),
                "seed" => cfg.seed = Some(int(value)?),
                "format" => {
                    cfg.format = Some(match value {
                        "csv" => Format::Csv,
                        "text" => Format::Text,
                        "json" => Format::Json,
                        other => return Err(at(format!("unknown format {other:?}"))),
                    })
                }
                other => return Err(at(format!("unknown key {other:?}"))),
            }
        }
        if cfg.prior.is_some() && cfg.preset.is_some() {
            return Err("set either prior or preset, not both".into());
        }
        Ok(cfg)
    }
}

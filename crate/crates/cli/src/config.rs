//! TOML configuration: one table per subcommand, keys spelled like the
//! long flags (`out-bank = "bank.csv"`). Flags given on the command line
//! replace the same key from the file.

use std::fs;
use std::path::Path;

use pco_core::scoring::EstimatorKind;
use pco_core::{ModelKind, QuadratureGrid};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default)]
pub struct Config {
    table: toml::Table,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::validation(e.to_string()))?;
        for (k, v) in &table {
            if !v.is_table() {
                return Err(CliError::validation(format!("top-level key `{k}` must be a [section]")));
            }
        }
        Ok(Config { table })
    }

    /// Combine section `name` with the flags in `cli`, flags winning.
    pub fn merge<T: Serialize + DeserializeOwned>(&self, name: &str, cli: &T) -> CliResult<T> {
        let mut merged = match self.table.get(name) {
            Some(toml::Value::Table(t)) => t.clone(),
            _ => toml::Table::new(),
        };
        let flags = toml::Table::try_from(cli).map_err(|e| CliError::validation(e.to_string()))?;
        merged.extend(flags);
        let value: T = merged
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| CliError::validation(format!("[{name}]: {}", e.message())))?;
        // every key that was read comes back out; anything else was ignored
        let known = toml::Table::try_from(&value).map_err(|e| CliError::validation(e.to_string()))?;
        if let Some(k) = merged.keys().find(|k| !known.contains_key(*k)) {
            return Err(CliError::validation(format!("[{name}]: unknown key `{k}`")));
        }
        Ok(value)
    }
}

/// The value of a key every run of `section` must supply.
pub fn need<T: Clone>(value: &Option<T>, section: &str, key: &str) -> CliResult<T> {
    value
        .clone()
        .ok_or_else(|| CliError::validation(format!("missing required key `{key}` in [{section}] (config file or --{key})")))
}

/// `1pl`, `rasch` (slope 1), `rasch:<slope>`, `2pl` or `3pl`.
pub fn parse_model(s: &str) -> CliResult<ModelKind> {
    let lower = s.trim().to_ascii_lowercase();
    let model = match lower.as_str() {
        "1pl" => ModelKind::OnePL,
        "rasch" => ModelKind::Rasch { discrimination: 1.0 },
        "2pl" => ModelKind::TwoPL,
        "3pl" => ModelKind::ThreePL,
        other => match other.strip_prefix("rasch:").map(str::parse::<f64>) {
            Some(Ok(a)) => ModelKind::Rasch { discrimination: a },
            _ => return Err(CliError::validation(format!("unknown model `{s}` (expected 1pl, rasch, rasch:<a>, 2pl, 3pl)"))),
        },
    };
    model.validate()?;
    Ok(model)
}

pub fn parse_estimator(s: &str) -> CliResult<EstimatorKind> {
    EstimatorKind::parse(s.trim())
        .ok_or_else(|| CliError::validation(format!("unknown estimator `{s}` (expected mle, eap, map, wle, median)")))
}

/// Comma-separated list such as `"-4,4"` or `"10,20,30"`.
pub fn parse_list<T: std::str::FromStr>(s: &str, key: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| CliError::validation(format!("`{key}`: cannot parse `{x}`"))))
        .collect()
}

pub fn parse_range(s: &str, key: &str) -> CliResult<(f64, f64)> {
    match parse_list::<f64>(s, key)?.as_slice() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(CliError::validation(format!("`{key}` must be `lo,hi` with lo < hi"))),
    }
}

/// Standard-normal quadrature with the given size and range.
pub fn grid(points: Option<usize>, range: Option<&str>) -> CliResult<QuadratureGrid> {
    let points = points.unwrap_or(QuadratureGrid::DEFAULT_POINTS);
    let (lo, hi) = match range {
        Some(r) => parse_range(r, "grid-range")?,
        None => QuadratureGrid::DEFAULT_RANGE,
    };
    Ok(QuadratureGrid::standard_normal(points, lo, hi)?)
}

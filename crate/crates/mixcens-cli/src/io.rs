//! Input parsing, report serialization and provenance.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::AppError;

/// Read a numeric column from a text file, or the built-in dataset.
///
/// One value per line; comma-delimited rows are split and `column`
/// (1-based) selected. A non-numeric first line is treated as a header;
/// any later unparsable row is an error naming the line.
pub fn read_data(input: &str, column: usize) -> Result<Vec<f64>, AppError> {
    if let Some(name) = input.strip_prefix("builtin:") {
        return match name {
            "precipitation" => Ok(mixcens::data::PRECIPITATION.to_vec()),
            other => Err(AppError::Usage(format!(
                "unknown built-in dataset '{other}'; available: precipitation"
            ))),
        };
    }
    if column == 0 {
        return Err(AppError::Usage("--column is 1-based".into()));
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| AppError::Data(format!("cannot read '{input}': {e}")))?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let field = if trimmed.contains(',') {
            trimmed.split(',').nth(column - 1).map(str::trim).ok_or_else(|| {
                AppError::Data(format!("line {line_no}: no column {column} in '{trimmed}'"))
            })?
        } else {
            trimmed
        };
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if idx == 0 => continue, // optional header
            Err(_) => {
                return Err(AppError::Data(format!(
                    "line {line_no}: cannot parse '{field}' as a number"
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(AppError::Data(format!("no numeric data found in '{input}'")));
    }
    Ok(values)
}

/// Seed resolution: explicit flag, then the MIXCENS_SEED environment
/// variable, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, AppError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("MIXCENS_SEED") {
        Ok(text) => text.parse::<u64>().map_err(|_| {
            AppError::Usage(format!("MIXCENS_SEED must be an unsigned integer, got '{text}'"))
        }),
        Err(_) => Ok(0),
    }
}

/// Run metadata carried in every machine-readable report.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    /// Short SHA-256 of the resolved configuration JSON.
    pub config_hash: String,
    pub version: String,
}

impl Provenance {
    pub fn new<C: Serialize>(seed: Option<u64>, config: &C) -> Self {
        let canonical = serde_json::to_string(config).unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hash = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            let _ = write!(hash, "{byte:02x}");
        }
        Self { seed, config_hash: hash, version: env!("CARGO_PKG_VERSION").to_string() }
    }
}

/// Serialize a report as pretty JSON, with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, AppError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Data(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), AppError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| AppError::Data(format!("cannot create '{}': {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| AppError::Data(format!("cannot write '{}': {e}", path.display())))
}

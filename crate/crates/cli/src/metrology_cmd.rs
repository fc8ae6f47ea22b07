//! The `metrology` subcommand: shot-noise comparison of rotation sensors.

use crate::config::ConfigError;
use crate::CliError;
use polgyro_core::metrology::{comparison_table, reference_configs, ComparisonTable, GyroConfig};
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GyroFile {
    gyro: Vec<GyroConfig>,
}

/// Reads `[[gyro]]` tables from TOML text.
pub fn parse_gyros(text: &str) -> Result<Vec<GyroConfig>, ConfigError> {
    let file: GyroFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if file.gyro.is_empty() {
        return Err(ConfigError::Invalid { field: "gyro".into(), message: "no sensors listed".into() });
    }
    Ok(file.gyro)
}

pub fn load_gyros(path: Option<&Path>) -> Result<Vec<GyroConfig>, ConfigError> {
    match path {
        None => Ok(reference_configs()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read { path: p.into(), source })?;
            parse_gyros(&text).map_err(|e| match e {
                ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", p.display())),
                other => other,
            })
        }
    }
}

pub fn table(gyros: &[GyroConfig]) -> Result<ComparisonTable, ConfigError> {
    comparison_table(gyros).map_err(|e| ConfigError::Invalid { field: "gyro".into(), message: e.to_string() })
}

/// Sagnac phase of each sensor at rotation rate `omega` (rad/s).
pub fn phases_at(gyros: &[GyroConfig], omega: f64) -> Result<String, ConfigError> {
    let mut out = format!("phase at omega = {omega:e} rad/s\n");
    for g in gyros {
        let phi = g.phase(omega).map_err(|e| ConfigError::Invalid { field: "gyro".into(), message: e.to_string() })?;
        let _ = writeln!(out, "  {:<24} {phi:.6e} rad", g.label());
    }
    Ok(out)
}

pub fn run(path: Option<&Path>, csv: Option<&Path>, omega: Option<f64>) -> Result<String, CliError> {
    let gyros = load_gyros(path)?;
    let t = table(&gyros)?;
    if let Some(csv) = csv {
        std::fs::write(csv, t.to_csv()).map_err(CliError::io(format!("writing {}", csv.display())))?;
    }
    let mut text = t.to_text();
    if let Some(omega) = omega {
        text.push('\n');
        text.push_str(&phases_at(&gyros, omega)?);
    }
    Ok(text)
}

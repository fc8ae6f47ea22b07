//! The `analyze` subcommand: diagnostics of saved PGYR snapshots.

use crate::config::AnalysisConfig;
use crate::runner::{analyze_field, FieldAnalysis};
use crate::CliError;
use polgyro_core::snapshot;
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct SnapshotReport {
    pub path: PathBuf,
    pub nx: usize,
    pub ny: usize,
    #[serde(flatten)]
    pub analysis: FieldAnalysis,
}

pub fn analyze_snapshot(path: &Path, cfg: &AnalysisConfig) -> Result<SnapshotReport, CliError> {
    let field = snapshot::load(path).map_err(|e| CliError::Input { path: path.into(), message: e.to_string() })?;
    let grid = *field.grid();
    Ok(SnapshotReport { path: path.into(), nx: grid.nx(), ny: grid.ny(), analysis: analyze_field(&field, cfg)? })
}

/// One `[[snapshot]]` table per input, as TOML.
pub fn run(paths: &[PathBuf], cfg: &AnalysisConfig) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Reports {
        snapshot: Vec<SnapshotReport>,
    }
    let snapshot = paths.iter().map(|p| analyze_snapshot(p, cfg)).collect::<Result<Vec<_>, _>>()?;
    Ok(toml::to_string(&Reports { snapshot }).expect("reports serialize"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use polgyro_core::field::{Boundary, ComplexField, GridSpec};

    #[test]
    fn reports_lobes_of_a_dipole() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(64, 64, 16.0, 16.0, Boundary::DirichletZero).unwrap();
        let f = ComplexField::from_fn(grid, |x, y| {
            let r2 = x * x + y * y;
            Complex64::new(x * (-r2 / 8.0).exp(), 0.0)
        });
        let path = dir.path().join("d.pgyr");
        snapshot::save(&f, &path).unwrap();
        let cfg = AnalysisConfig { radius: Some(2.0), ..AnalysisConfig::default() };
        let report = analyze_snapshot(&path, &cfg).unwrap();
        let lobes = report.analysis.lobes.unwrap();
        assert_eq!(lobes.count, 2);
        assert!(lobes.contrast > 0.99);
        assert!((lobes.interlobe_phases[0] - std::f64::consts::PI).abs() < 1e-6);
        let text = run(&[path], &cfg).unwrap();
        assert!(text.contains("[[snapshot]]"), "{text}");
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let err = analyze_snapshot(Path::new("/nonexistent.pgyr"), &AnalysisConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}

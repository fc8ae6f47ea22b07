//! Executes one [`RunConfig`] and writes its artefacts:
//!
//! ```text
//! <out>/config.toml          resolved configuration
//! <out>/observables.csv      recorded observables
//! <out>/summary.toml         final analysis and run status
//! <out>/snapshots/*.pgyr     recorded fields (if enabled)
//! <out>/final.pgyr           final field, or last_good.pgyr after a blow-up
//!                            (neither for t_end = 0)
//! <out>/{initial,final}_{density,phase}.pgm
//! ```

use crate::config::{AnalysisConfig, RunConfig};
use crate::image;
use crate::CliError;
use polgyro_core::analysis::{
    angular_profile, interlobe_phases, lobe_stats, momentum_populations, phase_winding, ring_radius,
    steady_state_reached, ObservableSeries, Observer,
};
use polgyro_core::field::{field_norm, ComplexField};
use polgyro_core::snapshot;
use polgyro_core::solver::{evolve, resolved_dt, SimState, SolverConfig, SolverError};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LobeSummary {
    pub radius: f64,
    pub count: usize,
    pub contrast: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub interlobe_phases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumSummary {
    pub k: Vec<f64>,
    pub populations: Vec<f64>,
}

/// Static diagnostics of a single field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldAnalysis {
    pub t: f64,
    pub norm: f64,
    pub peak_density: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lobes: Option<LobeSummary>,
    /// Phase winding on the lobe circle; absent when the circle crosses a
    /// density node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum: Option<MomentumSummary>,
}

pub fn analyze_field(field: &ComplexField, cfg: &AnalysisConfig) -> Result<FieldAnalysis, CliError> {
    let numerical = |e: polgyro_core::analysis::AnalysisError| CliError::Numerical(format!("analysis: {e}"));
    let (lobes, winding) = if cfg.lobes {
        let radius = cfg.radius.unwrap_or_else(|| ring_radius(field));
        let profile = angular_profile(field, radius, cfg.bins).map_err(numerical)?;
        let stats = lobe_stats(&profile);
        let phases = interlobe_phases(field, radius, cfg.bins).unwrap_or_default();
        let winding = phase_winding(field, (0.0, 0.0), radius, 4 * cfg.bins).ok();
        (Some(LobeSummary { radius, count: stats.count, contrast: stats.contrast, interlobe_phases: phases }), winding)
    } else {
        (None, None)
    };
    let momentum = if cfg.momenta.is_empty() {
        None
    } else {
        let populations = momentum_populations(field, &cfg.momenta).map_err(numerical)?;
        Some(MomentumSummary { k: cfg.momenta.clone(), populations })
    };
    Ok(FieldAnalysis { t: field.t, norm: field_norm(field), peak_density: field.peak_density(), lobes, winding, momentum })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    BlowUp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub status: RunStatus,
    pub steps: u64,
    pub dt: f64,
    pub records: usize,
    pub steady_observable: String,
    pub steady_state: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub final_state: FieldAnalysis,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Summary,
    pub series: ObservableSeries,
    pub field: ComplexField,
    pub dir: PathBuf,
}

/// Solver settings with `output.record_interval` turned into a step count.
pub fn effective_solver(cfg: &RunConfig, state: &SimState) -> SolverConfig {
    let mut solver = cfg.solver;
    if let Some(interval) = cfg.output.record_interval {
        let dt = resolved_dt(state, &solver);
        solver.snapshot_every = ((interval / dt).round() as u64).max(1);
    }
    solver
}

pub fn build_state(cfg: &RunConfig) -> Result<SimState, CliError> {
    cfg.validate()?;
    let grid = cfg.grid_spec()?;
    let params = cfg.sim_params()?;
    let landscape = cfg.landscape(&grid)?;
    let field = cfg.initial_field(&grid, &landscape, &params)?;
    Ok(SimState::new(field, params, landscape)?)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(CliError::io(format!("writing {}", path.display())))
}

fn write_images(dir: &Path, prefix: &str, field: &ComplexField) -> Result<(), CliError> {
    let density = dir.join(format!("{prefix}_density.pgm"));
    image::save_density(&density, field).map_err(CliError::io(format!("writing {}", density.display())))?;
    let phase = dir.join(format!("{prefix}_phase.pgm"));
    image::save_phase(&phase, field).map_err(CliError::io(format!("writing {}", phase.display())))
}

/// Runs `cfg` and writes everything into `dir`. A blow-up still leaves the
/// recorded series, `last_good.pgyr` and a summary behind before the
/// numerical error is returned.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let mut state = build_state(cfg)?;
    let solver = effective_solver(cfg, &state);
    let dt = resolved_dt(&state, &solver);
    fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    write(&dir.join("config.toml"), cfg.to_toml_string())?;
    if cfg.output.images {
        write_images(dir, "initial", &state.field)?;
    }
    let snap_dir = dir.join("snapshots");
    if cfg.output.snapshots {
        fs::create_dir_all(&snap_dir).map_err(CliError::io(format!("creating {}", snap_dir.display())))?;
    }

    let names: Vec<String> = cfg.observers.iter().map(Observer::name).collect();
    let mut series = ObservableSeries::new(names);
    let mut records = 0u64;
    let mut io_error: Option<CliError> = None;
    log::info!("{}: dt = {dt:.3e}, recording every {} steps", cfg.name, solver.snapshot_every);
    let result = evolve(&mut state, &solver, &[], &mut |s: &SimState| {
        let values = cfg.observers.iter().map(|o| o.observe(&s.field)).collect();
        series.push(s.field.t, values).expect("observer count is fixed");
        if cfg.output.snapshots && records.is_multiple_of(cfg.output.snapshot_stride) && io_error.is_none() {
            let path = snap_dir.join(format!("snap_{records:05}.pgyr"));
            if let Err(e) = snapshot::save(&s.field, &path) {
                io_error = Some(CliError::Io { context: format!("writing {}", path.display()), source: e });
            }
        }
        log::debug!("t = {:.3} norm = {:.6e}", s.field.t, field_norm(&s.field));
        records += 1;
    });
    if let Some(e) = io_error {
        return Err(e);
    }
    write(&dir.join("observables.csv"), series.to_csv())?;

    let steady = series
        .column(&cfg.analysis.steady_observable)
        .is_some_and(|c| steady_state_reached(&c, cfg.analysis.steady_window, cfg.analysis.steady_eps));
    let (status, field, message) = match result {
        Ok(_) => (RunStatus::Completed, state.field.clone(), None),
        Err(SolverError::BlowUp { step, t, last_good }) => {
            let msg = format!("non-finite field at step {step} (t = {t})");
            (RunStatus::BlowUp, *last_good, Some(msg))
        }
        Err(other) => return Err(other.into()),
    };
    // a zero-length run leaves only the initial-state artefacts
    let evolved = cfg.solver.t_end > 0.0;
    let final_name = if status == RunStatus::Completed { "final.pgyr" } else { "last_good.pgyr" };
    let final_path = dir.join(final_name);
    if evolved || status == RunStatus::BlowUp {
        snapshot::save(&field, &final_path).map_err(CliError::io(format!("writing {}", final_path.display())))?;
    }
    let final_state = match status {
        RunStatus::Completed => analyze_field(&field, &cfg.analysis)?,
        // lobe diagnostics of a diverging state are not meaningful
        RunStatus::BlowUp => analyze_field(&field, &AnalysisConfig { lobes: false, momenta: vec![], ..cfg.analysis.clone() })?,
    };
    if cfg.output.images && evolved {
        write_images(dir, "final", &field)?;
    }
    let summary = Summary {
        name: cfg.name.clone(),
        status,
        steps: state.step_count,
        dt,
        records: series.len(),
        steady_observable: cfg.analysis.steady_observable.clone(),
        steady_state: steady,
        message: message.clone(),
        final_state,
    };
    write(&dir.join("summary.toml"), toml::to_string(&summary).expect("summaries serialize"))?;
    if let Some(msg) = message {
        return Err(CliError::Numerical(format!("{}: {msg}; last finite state in {}", cfg.name, final_path.display())));
    }
    Ok(RunOutcome { summary, series, field, dir: dir.to_path_buf() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GridConfig, SeedConfig};
    use polgyro_core::field::Boundary;
    use polgyro_core::landscape::PumpSpec;

    fn small() -> RunConfig {
        let mut cfg = RunConfig {
            grid: GridConfig { nx: 32, ny: 32, lx: 16.0, ly: 16.0, boundary: Boundary::DirichletZero },
            ..RunConfig::default()
        };
        cfg.solver.t_end = 0.5;
        cfg.output.record_interval = Some(0.1);
        cfg
    }

    #[test]
    fn writes_artefacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&small(), dir.path()).unwrap();
        for f in ["config.toml", "observables.csv", "summary.toml", "final.pgyr", "final_density.pgm", "initial_phase.pgm"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        assert_eq!(out.summary.status, RunStatus::Completed);
        assert!((out.field.t - 0.5).abs() < 1e-12);
        assert_eq!(out.series.len(), 6);
        let snaps = fs::read_dir(dir.path().join("snapshots")).unwrap().count();
        assert_eq!(snaps, 6);
        let back = RunConfig::load(&dir.path().join("config.toml")).unwrap();
        assert_eq!(back, small());
    }

    #[test]
    fn zero_duration_run_keeps_the_seed() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small();
        cfg.solver.t_end = 0.0;
        let initial = build_state(&cfg).unwrap().field;
        let out = run(&cfg, dir.path()).unwrap();
        assert_eq!(out.field.values(), initial.values());
        assert_eq!(out.summary.steps, 0);
        assert_eq!(out.series.len(), 1);
        assert!(dir.path().join("snapshots/snap_00000.pgyr").exists());
        assert!(dir.path().join("initial_density.pgm").exists());
        assert!(!dir.path().join("final.pgyr").exists());
        assert!(!dir.path().join("final_density.pgm").exists());
    }

    #[test]
    fn blow_up_leaves_last_good_state() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small();
        cfg.solver.dt = Some(5.0);
        cfg.solver.t_end = 500.0;
        cfg.solver.allow_unstable_dt = true;
        cfg.pump = PumpSpec::Uniform { p0: 2.0 };
        cfg.seed = SeedConfig::Uniform { amplitude: 1.0 };
        let err = run(&cfg, dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(dir.path().join("last_good.pgyr").exists());
        let summary = fs::read_to_string(dir.path().join("summary.toml")).unwrap();
        assert!(summary.contains("status = \"blow-up\""), "{summary}");
    }

    #[test]
    fn unstable_dt_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small();
        cfg.solver.dt = Some(5.0);
        assert_eq!(run(&cfg, dir.path()).unwrap_err().exit_code(), 1);
    }
}

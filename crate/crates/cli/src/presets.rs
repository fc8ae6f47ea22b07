//! Named experiment recipes for the vortex-superposition gyroscope study.

use crate::config::{AnalysisConfig, GridConfig, MomentumComponent, OutputConfig, ParamsConfig, RunConfig, SeedConfig};
use polgyro_core::analysis::Observable;
use polgyro_core::field::{Boundary, UnitSystem};
use polgyro_core::landscape::{DisorderSpec, PotentialSpec, PumpSpec, KAGOME_P};
use polgyro_core::solver::SolverConfig;
use std::f64::consts::TAU;

pub const PRESET_NAMES: [&str; 9] = [
    "fig-flat",
    "fig-flat-meV",
    "fig-disorder",
    "fig-disorder-meV",
    "fig-ring-l1",
    "fig-ring-l5",
    "fig-metastable-uniform",
    "fig-metastable-periodic",
    "fig-kagome",
];

/// Effective polariton mass in electron masses.
pub const POLARITON_MASS_RATIO: f64 = 5e-5;

/// Disorder used by the disordered presets.
pub const DISORDER_RMS: f64 = 0.5;
pub const DISORDER_CORR_LEN: f64 = 2.0;

/// Kagome lattice strength (meV) and wavenumber of the Kagome preset.
pub const KAGOME_V0: f64 = 0.25;
pub const KAGOME_K0: f64 = 4.0;

/// Wavenumber of the metastable presets, `2 pi / 10`.
pub const METASTABLE_K0: f64 = TAU / 10.0;

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig-flat" => "l=1 superposition, Gaussian pump, flat potential (g = gamma = eta = 1)",
        "fig-flat-meV" => "as fig-flat with g = 0.05, gamma = 1, eta = 0.1 in meV units",
        "fig-disorder" => "as fig-flat on a Gaussian-correlated disordered potential",
        "fig-disorder-meV" => "as fig-flat-meV on a Gaussian-correlated disordered potential",
        "fig-ring-l1" => "l=+/-1 counter-propagating currents in a Mexican-hat ring",
        "fig-ring-l5" => "l=+/-5 counter-propagating currents in a Mexican-hat ring",
        "fig-metastable-uniform" => "k = 0, +/-k0 mixture under uniform pumping",
        "fig-metastable-periodic" => "k = 0, +/-k0 mixture under cos^2 pumping and a cos(2 k0 x) potential",
        "fig-kagome" => "l=1 superposition in a Kagome lattice, meV parameters",
        _ => return None,
    })
}

fn lobe_observers() -> Vec<Observable> {
    vec![
        Observable::Norm,
        Observable::PeakDensity,
        Observable::LobeContrast { radius: None },
        Observable::LobeCount { radius: None },
    ]
}

fn lobe_analysis(radius: Option<f64>) -> AnalysisConfig {
    AnalysisConfig { radius, steady_observable: "lobe_contrast".into(), ..AnalysisConfig::default() }
}

fn output(name: &str) -> OutputConfig {
    OutputConfig { dir: format!("out/{name}").into(), record_interval: Some(1.0), ..OutputConfig::default() }
}

fn mev() -> (UnitSystem, ParamsConfig) {
    (UnitSystem::PhysicalMev { mass_ratio: POLARITON_MASS_RATIO }, ParamsConfig { g: 0.05, gamma: 1.0, eta: 0.1 })
}

/// The vortex-superposition experiment on a 32 x 32 box with hard walls.
fn superposition(name: &str, mev_units: bool, potential: PotentialSpec) -> RunConfig {
    let (units, params) = if mev_units {
        mev()
    } else {
        (UnitSystem::Dimensionless { length_scale: 1e-6, mass_ratio: POLARITON_MASS_RATIO }, ParamsConfig::default())
    };
    RunConfig {
        name: name.into(),
        grid: GridConfig::default(),
        units,
        params,
        potential,
        pump: PumpSpec::Gaussian { p0: 2.0, r0: 5.35 },
        seed: SeedConfig::VortexSuperposition { l: 1, waist: 4.0, wavenumber: 1.0 },
        solver: SolverConfig { t_end: 10.0, ..SolverConfig::default() },
        observers: lobe_observers(),
        analysis: lobe_analysis(None),
        output: output(name),
    }
}

fn ring(name: &str, l: i32) -> RunConfig {
    let (v0, r_min) = (1.0, 5.0);
    RunConfig {
        name: name.into(),
        grid: GridConfig { nx: 256, ny: 256, lx: 4.0 * r_min, ly: 4.0 * r_min, boundary: Boundary::DirichletZero },
        potential: PotentialSpec::MexicanHat { v0, r_min },
        pump: PumpSpec::Ring { p0: 2.0, l, v0, r_min },
        seed: SeedConfig::RingSuperposition { l, v0, r_min },
        solver: SolverConfig { t_end: 10.0, ..SolverConfig::default() },
        observers: vec![
            Observable::Norm,
            Observable::PeakDensity,
            Observable::LobeContrast { radius: Some(r_min) },
            Observable::LobeCount { radius: Some(r_min) },
        ],
        analysis: lobe_analysis(Some(r_min)),
        output: output(name),
        ..RunConfig::default()
    }
}

fn metastable(name: &str, periodic: bool) -> RunConfig {
    let k0 = METASTABLE_K0;
    let (potential, pump) = if periodic {
        (PotentialSpec::Periodic { v0: 1.0, k0 }, PumpSpec::Periodic { p0: 2.0, k0, eta: 1.0, gamma: 1.0 })
    } else {
        (PotentialSpec::Flat, PumpSpec::Uniform { p0: 2.0 })
    };
    let xi = 1.0 / 3f64.sqrt();
    RunConfig {
        name: name.into(),
        grid: GridConfig { nx: 128, ny: 16, lx: 40.0, ly: 5.0, boundary: Boundary::Periodic },
        potential,
        pump,
        seed: SeedConfig::MomentumMixture {
            components: [0.0, k0, -k0].iter().map(|&k| MomentumComponent { k, re: xi, im: 0.0 }).collect(),
        },
        solver: SolverConfig { t_end: 50.0, ..SolverConfig::default() },
        observers: vec![
            Observable::Norm,
            Observable::MomentumPopulation { k: 0.0 },
            Observable::MomentumPopulation { k: k0 },
            Observable::MomentumPopulation { k: -k0 },
        ],
        analysis: AnalysisConfig { lobes: false, momenta: vec![0.0, k0, -k0], ..AnalysisConfig::default() },
        output: output(name),
        ..RunConfig::default()
    }
}

pub fn preset(name: &str) -> Option<RunConfig> {
    let disorder = PotentialSpec::Disorder(DisorderSpec { rms: DISORDER_RMS, corr_len: DISORDER_CORR_LEN, seed: 1 });
    Some(match name {
        "fig-flat" => superposition(name, false, PotentialSpec::Flat),
        "fig-flat-meV" => superposition(name, true, PotentialSpec::Flat),
        "fig-disorder" => superposition(name, false, disorder),
        "fig-disorder-meV" => superposition(name, true, disorder),
        "fig-ring-l1" => ring(name, 1),
        "fig-ring-l5" => ring(name, 5),
        "fig-metastable-uniform" => metastable(name, false),
        "fig-metastable-periodic" => metastable(name, true),
        "fig-kagome" => superposition(name, true, PotentialSpec::Kagome { v0: KAGOME_V0, k0: KAGOME_K0, p: KAGOME_P }),
        _ => return None,
    })
}

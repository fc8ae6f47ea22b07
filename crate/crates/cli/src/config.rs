//! Run configuration: TOML schema, defaults, dotted-path overrides and
//! semantic validation.

use num_complex::Complex64;
use polgyro_core::analysis::Observable;
use polgyro_core::field::{Boundary, ComplexField, GridSpec, SimParams, UnitSystem};
use polgyro_core::landscape::{Landscape, PotentialSpec, PumpSpec};
use polgyro_core::oam::{mach_zehnder, sample_superposition, LgParams};
use polgyro_core::snapshot;
use polgyro_core::solver::{
    enforce_walls, seed_momentum_mixture, seed_ring_superposition, seed_vortex_superposition, SolverConfig,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("bad override `{0}`: expected key.path=value")]
    BadOverride(String),
    #[error("unknown preset `{0}` (see `polgyro presets`)")]
    UnknownPreset(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

fn invalid(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub boundary: Boundary,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { nx: 256, ny: 256, lx: 32.0, ly: 32.0, boundary: Boundary::DirichletZero }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub g: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self { g: 1.0, gamma: 1.0, eta: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumComponent {
    pub k: f64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn one() -> f64 {
    1.0
}

fn default_l() -> i32 {
    1
}

fn default_waist() -> f64 {
    4.0
}

fn default_split() -> [f64; 2] {
    [0.5, 0.5]
}

/// Initial condensate wavefunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeedConfig {
    /// Equilibrium-scaled `u_l + u_{-l}` Laguerre-Gauss pair.
    VortexSuperposition {
        #[serde(default = "default_l")]
        l: i32,
        #[serde(default = "default_waist")]
        waist: f64,
        #[serde(default = "one")]
        wavenumber: f64,
    },
    /// `(psi_l + psi_{-l}) / sqrt 2` on the Mexican-hat channel.
    RingSuperposition { l: i32, v0: f64, r_min: f64 },
    /// Plane waves along x.
    MomentumMixture { components: Vec<MomentumComponent> },
    /// Output of a Mach-Zehnder with a Dove prism in one arm.
    MachZehnder {
        #[serde(default = "default_l")]
        l: i32,
        #[serde(default)]
        p: u32,
        #[serde(default = "default_split")]
        split: [f64; 2],
        #[serde(default)]
        phase: f64,
        #[serde(default = "default_waist")]
        waist: f64,
        #[serde(default = "one")]
        wavenumber: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Uniform { amplitude: f64 },
    /// A PGYR file on the same grid.
    Snapshot { path: PathBuf },
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig::VortexSuperposition { l: 1, waist: default_waist(), wavenumber: 1.0 }
    }
}

fn default_bins() -> usize {
    360
}

fn default_steady_observable() -> String {
    "norm".into()
}

fn default_steady_window() -> usize {
    2
}

fn default_steady_eps() -> f64 {
    1e-3
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Lobe statistics on the final state.
    #[serde(default = "yes")]
    pub lobes: bool,
    /// Profile radius; unset picks the brightest ring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Observable column the steady-state flag is judged on.
    #[serde(default = "default_steady_observable")]
    pub steady_observable: String,
    #[serde(default = "default_steady_window")]
    pub steady_window: usize,
    #[serde(default = "default_steady_eps")]
    pub steady_eps: f64,
    /// x-wavenumbers whose populations are reported.
    #[serde(default)]
    pub momenta: Vec<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            lobes: true,
            radius: None,
            bins: default_bins(),
            steady_observable: default_steady_observable(),
            steady_window: default_steady_window(),
            steady_eps: default_steady_eps(),
            momenta: Vec::new(),
        }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_stride() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// Time between recorded samples; overrides `solver.snapshot_every`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_interval: Option<f64>,
    #[serde(default = "yes")]
    pub snapshots: bool,
    /// Write a PGYR file every this many records.
    #[serde(default = "default_stride")]
    pub snapshot_stride: u64,
    #[serde(default = "yes")]
    pub images: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_out_dir(), record_interval: None, snapshots: true, snapshot_stride: 1, images: true }
    }
}

fn default_name() -> String {
    "run".into()
}

fn default_pump() -> PumpSpec {
    PumpSpec::Gaussian { p0: 2.0, r0: 5.35 }
}

fn default_potential() -> PotentialSpec {
    PotentialSpec::Flat
}

fn default_observers() -> Vec<Observable> {
    vec![Observable::Norm, Observable::PeakDensity]
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default = "default_potential")]
    pub potential: PotentialSpec,
    #[serde(default = "default_pump")]
    pub pump: PumpSpec,
    #[serde(default)]
    pub seed: SeedConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_observers")]
    pub observers: Vec<Observable>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: default_name(),
            grid: GridConfig::default(),
            units: UnitSystem::default(),
            params: ParamsConfig::default(),
            potential: default_potential(),
            pump: default_pump(),
            seed: SeedConfig::default(),
            solver: SolverConfig::default(),
            observers: default_observers(),
            analysis: AnalysisConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            ConfigError::Parse(msg) => ConfigError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    /// Applies `a.b.c=value` assignments. Values are read as TOML literals,
    /// falling back to plain strings; numeric path segments index arrays.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self, ConfigError> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut root = toml::Value::try_from(self).expect("run configs always serialize");
        for item in overrides {
            let (path, raw) = item.split_once('=').ok_or_else(|| ConfigError::BadOverride(item.clone()))?;
            let path = path.trim();
            if path.is_empty() {
                return Err(ConfigError::BadOverride(item.clone()));
            }
            set_path(&mut root, path, parse_literal(raw.trim())).map_err(|m| invalid(path, m))?;
        }
        Self::from_toml_str(&toml::to_string(&root).expect("tables serialize"))
    }

    /// Sets the disorder seed, if the potential has one.
    pub fn set_random_seed(&mut self, seed: u64) -> bool {
        match &mut self.potential {
            PotentialSpec::Disorder(spec) => {
                spec.seed = seed;
                true
            }
            _ => false,
        }
    }

    pub fn grid_spec(&self) -> Result<GridSpec, ConfigError> {
        let g = &self.grid;
        GridSpec::new(g.nx, g.ny, g.lx, g.ly, g.boundary).map_err(|e| invalid("grid", e))
    }

    pub fn sim_params(&self) -> Result<SimParams, ConfigError> {
        let p = &self.params;
        SimParams::new(p.g, p.gamma, p.eta, self.units).map_err(|e| invalid("params", e))
    }

    pub fn landscape(&self, grid: &GridSpec) -> Result<Landscape, ConfigError> {
        let potential = self.potential.sample(grid).map_err(|e| invalid("potential", e))?;
        let pump = self.pump.sample(grid).map_err(|e| invalid("pump", e))?;
        Landscape::new(potential, pump, self.name.clone()).map_err(|e| invalid("pump", e))
    }

    pub fn initial_field(&self, grid: &GridSpec, landscape: &Landscape, params: &SimParams) -> Result<ComplexField, ConfigError> {
        let field = match &self.seed {
            SeedConfig::VortexSuperposition { l, waist, wavenumber } => {
                let lg = LgParams::from_waist(*waist, *wavenumber).map_err(|e| invalid("seed", e))?;
                seed_vortex_superposition(*l, grid, landscape, params, &lg).map_err(|e| invalid("seed", e))?
            }
            SeedConfig::RingSuperposition { l, v0, r_min } => {
                seed_ring_superposition(*l, *v0, *r_min, grid).map_err(|e| invalid("seed", e))?
            }
            SeedConfig::MomentumMixture { components } => {
                let xi: Vec<(f64, Complex64)> = components.iter().map(|c| (c.k, Complex64::new(c.re, c.im))).collect();
                seed_momentum_mixture(&xi, grid).map_err(|e| invalid("seed.components", e))?
            }
            SeedConfig::MachZehnder { l, p, split, phase, waist, wavenumber, amplitude } => {
                let lg = LgParams::from_waist(*waist, *wavenumber).map_err(|e| invalid("seed", e))?;
                let spec = mach_zehnder(*l, *p, (split[0], split[1]), *phase).map_err(|e| invalid("seed", e))?;
                let mut f = sample_superposition(&spec, &lg, 0.0, grid);
                f.scale(Complex64::new(*amplitude, 0.0));
                f
            }
            SeedConfig::Uniform { amplitude } => ComplexField::from_fn(*grid, |_, _| Complex64::new(*amplitude, 0.0)),
            SeedConfig::Snapshot { path } => {
                let f = snapshot::load(path).map_err(|e| invalid("seed.path", format!("{}: {e}", path.display())))?;
                if f.grid() != grid {
                    return Err(invalid("seed.path", "snapshot grid differs from [grid]"));
                }
                f
            }
        };
        let mut field = field;
        field.t = 0.0;
        enforce_walls(&mut field);
        if !field.is_finite() {
            return Err(invalid("seed", "initial field is not finite"));
        }
        Ok(field)
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid("name", "must be non-empty and contain no path separators"));
        }
        let grid = self.grid_spec()?;
        let params = self.sim_params()?;
        self.solver.validate().map_err(|e| invalid("solver", e))?;
        if let Some(dt) = self.output.record_interval {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("output.record_interval", "must be positive"));
            }
        }
        if self.output.snapshot_stride == 0 {
            return Err(invalid("output.snapshot_stride", "must be at least 1"));
        }
        if self.analysis.bins < 8 {
            return Err(invalid("analysis.bins", "need at least 8 bins"));
        }
        if self.analysis.steady_window == 0 || !(self.analysis.steady_eps > 0.0) {
            return Err(invalid("analysis", "steady_window must be >= 1 and steady_eps > 0"));
        }
        if !self.analysis.momenta.is_empty() && grid.boundary() != Boundary::Periodic {
            return Err(invalid("analysis.momenta", "momentum populations need a periodic grid"));
        }
        let names: Vec<String> = self.observers.iter().map(polgyro_core::analysis::Observer::name).collect();
        if !names.contains(&self.analysis.steady_observable) {
            return Err(invalid(
                "analysis.steady_observable",
                format!("`{}` is not among the observers ({})", self.analysis.steady_observable, names.join(", ")),
            ));
        }
        let landscape = self.landscape(&grid)?;
        if let SeedConfig::Snapshot { .. } = self.seed {
            // checked when the run starts; the file may be produced later in a pipeline
        } else {
            self.initial_field(&grid, &landscape, &params)?;
        }
        Ok(())
    }
}

fn parse_literal(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_path(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<(), String> {
    let parts: Vec<&str> = path.split('.').collect();
    let (last, head) = parts.split_last().expect("split yields at least one part");
    let mut current = root;
    for key in head {
        current = match current {
            toml::Value::Table(t) => t.entry(key.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new())),
            toml::Value::Array(a) => array_slot(a, key)?,
            _ => return Err(format!("cannot descend into `{key}`")),
        };
    }
    match current {
        toml::Value::Table(t) => {
            t.insert(last.to_string(), value);
        }
        toml::Value::Array(a) => *array_slot(a, last)? = value,
        _ => return Err(format!("cannot set `{last}` on a plain value")),
    }
    Ok(())
}

fn array_slot<'a>(a: &'a mut [toml::Value], key: &str) -> Result<&'a mut toml::Value, String> {
    let i: usize = key.parse().map_err(|_| format!("`{key}` is not an array index"))?;
    let len = a.len();
    a.get_mut(i).ok_or_else(|| format!("index {i} out of range (length {len})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig {
            seed: SeedConfig::MomentumMixture { components: vec![MomentumComponent { k: 0.5, re: 1.0, im: -0.5 }] },
            ..RunConfig::default()
        };
        c.observers.push(Observable::LobeContrast { radius: Some(3.0) });
        c.analysis.momenta = vec![0.0, 1.5];
        let back = RunConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_errors_name_the_line_and_key() {
        let err = RunConfig::from_toml_str("[grid]\nnx = \"many\"\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("nx"), "{err}");
        let err = RunConfig::from_toml_str("[grid]\nnxx = 4\n").unwrap_err().to_string();
        assert!(err.contains("nxx"), "{err}");
    }

    #[test]
    fn overrides() {
        let c = RunConfig::default();
        let o = c
            .with_overrides(&[
                "grid.nx=64".into(),
                "params.g=0.5".into(),
                "name=custom".into(),
                "pump.kind=uniform".into(),
                "observers.1.kind=norm".into(),
            ])
            .unwrap();
        assert_eq!(o.grid.nx, 64);
        assert_eq!(o.params.g, 0.5);
        assert_eq!(o.name, "custom");
        assert_eq!(o.pump, PumpSpec::Uniform { p0: 2.0 });
        assert_eq!(o.observers[1], Observable::Norm);
        assert!(matches!(c.with_overrides(&["nonsense".into()]), Err(ConfigError::BadOverride(_))));
        assert!(matches!(c.with_overrides(&["grid.nx=big".into()]), Err(ConfigError::Parse(_))));
        assert!(matches!(c.with_overrides(&["observers.9.kind=norm".into()]), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn validation_names_fields() {
        let mut c = RunConfig::default();
        c.grid.nx = 4;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "grid"));
        let mut c = RunConfig::default();
        c.analysis.steady_observable = "lobe_contrast".into();
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "analysis.steady_observable"));
        let mut c = RunConfig::default();
        c.analysis.momenta = vec![0.0];
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "analysis.momenta"));
        let mut c = RunConfig::default();
        c.params.eta = 0.0;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "seed"));
    }

    #[test]
    fn random_seed_only_touches_disorder() {
        let mut c = RunConfig::default();
        assert!(!c.set_random_seed(3));
        c.potential = PotentialSpec::Disorder(polgyro_core::landscape::DisorderSpec { rms: 0.5, corr_len: 2.0, seed: 1 });
        assert!(c.set_random_seed(3));
        assert!(matches!(c.potential, PotentialSpec::Disorder(s) if s.seed == 3));
    }
}

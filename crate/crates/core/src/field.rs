//! Uniform 2D grids, complex and real fields sampled on them, unit systems
//! and the elementary reductions every other module builds on.
//!
//! Sample `(i, j)` sits at `(x_i, y_j) = (-lx/2 + i*dx, -ly/2 + j*dy)`, so for
//! even counts the origin is a grid point. Values are stored row-major:
//! `values[j * nx + i]`, i.e. one row per `y_j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Smallest accepted sample count along either axis.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("{axis} count {count} is below the minimum of {MIN_POINTS}")]
    TooFewPoints { axis: char, count: usize },
    #[error("{axis} extent must be positive and finite, got {value}")]
    BadExtent { axis: char, value: f64 },
    #[error("field has {got} values but the grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    DirichletZero,
}

impl Boundary {
    pub fn code(self) -> u8 {
        match self {
            Boundary::Periodic => 0,
            Boundary::DirichletZero => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Boundary::Periodic),
            1 => Some(Boundary::DirichletZero),
            _ => None,
        }
    }
}

/// Uniform rectangular grid centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    boundary: Boundary,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, boundary: Boundary) -> Result<Self, FieldError> {
        if nx < MIN_POINTS {
            return Err(FieldError::TooFewPoints { axis: 'x', count: nx });
        }
        if ny < MIN_POINTS {
            return Err(FieldError::TooFewPoints { axis: 'y', count: ny });
        }
        if !(lx > 0.0 && lx.is_finite()) {
            return Err(FieldError::BadExtent { axis: 'x', value: lx });
        }
        if !(ly > 0.0 && ly.is_finite()) {
            return Err(FieldError::BadExtent { axis: 'y', value: ly });
        }
        Ok(Self { nx, ny, lx, ly, boundary })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Area of one cell, the midpoint-rule weight.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.lx + i as f64 * self.dx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        -0.5 * self.ly + j as f64 * self.dy()
    }

    /// Coordinates of flat index `k`.
    #[inline]
    pub fn coords(&self, k: usize) -> (f64, f64) {
        (self.x(k % self.nx), self.y(k / self.nx))
    }

    /// Grid point closest to `(x, y)`, or `None` outside the sampled box.
    pub fn nearest_index(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = ((x + 0.5 * self.lx) / self.dx()).round();
        let fj = ((y + 0.5 * self.ly) / self.dy()).round();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    /// Iterator over `(x, y)` of every sample in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |k| self.coords(k))
    }
}

/// Pairwise (cascade) summation. The split points depend only on the slice
/// length, so results do not depend on how the caller was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Pairwise sum of `f(v)` over a slice, without allocating the mapped copy.
pub fn pairwise_sum_by<T, F: Fn(&T) -> f64 + Copy>(values: &[T], f: F) -> f64 {
    const BLOCK: usize = 64;
    if values.len() <= BLOCK {
        values.iter().map(f).sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum_by(&values[..mid], f) + pairwise_sum_by(&values[mid..], f)
    }
}

/// Complex order parameter on a grid at simulation time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
    pub t: f64,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>, t: f64) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(FieldError::NonFinite { index });
        }
        Ok(Self { grid, values, t })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], t: 0.0 }
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = grid.points().map(|(x, y)| f(x, y)).collect();
        Self { grid, values, t: 0.0 }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&mut self, factor: Complex64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    pub fn peak_density(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max)
    }

    /// Relative L2 distance `||self - other|| / ||other||`.
    pub fn relative_l2(&self, other: &ComplexField) -> Result<f64, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch);
        }
        let diff: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).collect();
        let reference = pairwise_sum_by(&other.values, |v| v.norm_sqr());
        Ok((pairwise_sum(&diff) / reference).sqrt())
    }
}

/// Real scalar samples (densities, phases, potentials, pumps).
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.points().map(|(x, y)| f(x, y)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Midpoint-rule integral.
    pub fn integral(&self) -> f64 {
        pairwise_sum(&self.values) * self.grid.cell_area()
    }

    pub fn add_constant(&mut self, c: f64) {
        for v in &mut self.values {
            *v += c;
        }
    }
}

/// `sum |psi|^2 dx dy` with pairwise summation.
pub fn field_norm(f: &ComplexField) -> f64 {
    pairwise_sum_by(f.values(), |v| v.norm_sqr()) * f.grid().cell_area()
}

/// Principal argument in `(-pi, pi]`; an exact zero maps to 0.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Element-wise `|psi|^2` and `arg psi`.
pub fn density_and_phase(f: &ComplexField) -> (RealField, RealField) {
    let grid = *f.grid();
    let density = f.values().iter().map(|v| v.norm_sqr()).collect();
    let phase = f.values().iter().map(|&v| principal_arg(v)).collect();
    (RealField { grid, values: density }, RealField { grid, values: phase })
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const MEV: f64 = 1.602_176_634e-22;

/// How the dimensionless equation maps onto SI units. In both cases the
/// kinetic term of the equation of motion is the bare `-laplacian`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UnitSystem {
    /// Lengths in units of `length_scale` (metres); time unit `2 m a^2 / hbar`.
    Dimensionless { length_scale: f64, mass_ratio: f64 },
    /// Energies in meV, time in `hbar / meV`; the length unit follows from the mass.
    PhysicalMev { mass_ratio: f64 },
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem::Dimensionless { length_scale: 1e-6, mass_ratio: 5e-5 }
    }
}

impl UnitSystem {
    fn mass(&self) -> f64 {
        match *self {
            UnitSystem::Dimensionless { mass_ratio, .. } | UnitSystem::PhysicalMev { mass_ratio } => {
                mass_ratio * ELECTRON_MASS
            }
        }
    }

    /// Length unit in metres.
    pub fn length_unit(&self) -> f64 {
        match *self {
            UnitSystem::Dimensionless { length_scale, .. } => length_scale,
            UnitSystem::PhysicalMev { .. } => HBAR / (2.0 * self.mass() * MEV).sqrt(),
        }
    }

    /// Time unit in seconds.
    pub fn time_unit(&self) -> f64 {
        match *self {
            UnitSystem::Dimensionless { length_scale, .. } => 2.0 * self.mass() * length_scale * length_scale / HBAR,
            UnitSystem::PhysicalMev { .. } => HBAR / MEV,
        }
    }

    /// Energy unit in joules.
    pub fn energy_unit(&self) -> f64 {
        HBAR / self.time_unit()
    }

    pub fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            UnitSystem::Dimensionless { length_scale, mass_ratio } => length_scale > 0.0 && mass_ratio > 0.0,
            UnitSystem::PhysicalMev { mass_ratio } => mass_ratio > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err("unit scales must be positive".into())
        }
    }
}

/// Coefficients of the open-dissipative equation in simulation units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub g: f64,
    pub gamma: f64,
    pub eta: f64,
    #[serde(default)]
    pub units: UnitSystem,
}

impl SimParams {
    pub fn new(g: f64, gamma: f64, eta: f64, units: UnitSystem) -> Result<Self, String> {
        let p = Self { g, gamma, eta, units };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.g.is_finite() {
            return Err("g must be finite".into());
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(format!("eta must be >= 0, got {}", self.eta));
        }
        self.units.validate()
    }
}

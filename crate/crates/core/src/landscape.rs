//! External potentials and pump profiles.
//!
//! Analytic profiles implement [`Sampler`]; disorder is generated directly
//! on a grid. [`PotentialSpec`] and [`PumpSpec`] are the serialisable
//! descriptions used by run configurations, and [`Landscape`] is the pair
//! of sampled fields the solver consumes.

use crate::field::{pairwise_sum, Boundary, GridSpec, RealField};
use crate::spectral::{fft2, wavenumber};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandscapeError {
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("correlation length {corr_len} must exceed the grid spacing {spacing}")]
    CorrelationTooShort { corr_len: f64, spacing: f64 },
    #[error("pump is negative ({value}) at index {index}")]
    NegativePump { index: usize, value: f64 },
    #[error("non-finite landscape value at index {index}")]
    NonFinite { index: usize },
    #[error("potential and pump are sampled on different grids")]
    GridMismatch,
}

fn positive(name: &'static str, value: f64) -> Result<f64, LandscapeError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(LandscapeError::NotPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, LandscapeError> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(LandscapeError::Negative { name, value })
    }
}

/// A real function of position.
pub trait Sampler {
    fn value(&self, x: f64, y: f64) -> f64;

    fn sample(&self, grid: &GridSpec) -> RealField {
        RealField::from_fn(*grid, |x, y| self.value(x, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flat;

impl Sampler for Flat {
    fn value(&self, _x: f64, _y: f64) -> f64 {
        0.0
    }
}

pub fn potential_flat() -> Flat {
    Flat
}

/// `V0 (r^4 / r_min^4 - 2 r^2 / r_min^2)`, a channel of depth `V0` at `r_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MexicanHat {
    v0: f64,
    r_min: f64,
}

pub fn potential_mexican_hat(v0: f64, r_min: f64) -> Result<MexicanHat, LandscapeError> {
    Ok(MexicanHat { v0: positive("V0", v0)?, r_min: positive("r_min", r_min)? })
}

impl Sampler for MexicanHat {
    fn value(&self, x: f64, y: f64) -> f64 {
        let s = (x * x + y * y) / (self.r_min * self.r_min);
        self.v0 * (s * s - 2.0 * s)
    }
}

/// Lowest-order Fourier form of a Kagome lattice:
/// `V0 |f1(x) e^{i k0 b1.x} + e^{i k0 b2.x} + e^{i k0 b3.x}|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kagome {
    v0: f64,
    k0: f64,
    b1: (f64, f64),
    b2: (f64, f64),
    b3: (f64, f64),
    f1_scale: f64,
}

pub const KAGOME_P: f64 = 1.5;

pub fn potential_kagome(v0: f64, k0: f64, p: f64) -> Result<Kagome, LandscapeError> {
    let v0 = positive("V0", v0)?;
    let k0 = positive("k0", k0)?;
    let p = positive("p", p)?;
    let s = 1.0 / (1.0 + 4.0 * p / 3.0);
    let half_root3 = 3f64.sqrt() / 2.0;
    Ok(Kagome {
        v0,
        k0,
        b1: (s, 0.0),
        b2: (-0.5 * s, -half_root3),
        b3: (-0.5 * s, half_root3),
        f1_scale: k0 * p * s,
    })
}

impl Sampler for Kagome {
    fn value(&self, x: f64, y: f64) -> f64 {
        let wave = |b: (f64, f64)| Complex64::from_polar(1.0, self.k0 * (b.0 * x + b.1 * y));
        let theta = self.f1_scale * x;
        let f1 = Complex64::from_polar(theta.cos(), theta);
        self.v0 * (f1 * wave(self.b1) + wave(self.b2) + wave(self.b3)).norm_sqr()
    }
}

/// `V0 cos(2 k0 x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPotential {
    v0: f64,
    k0: f64,
}

pub fn potential_periodic_1d(v0: f64, k0: f64) -> Result<PeriodicPotential, LandscapeError> {
    Ok(PeriodicPotential { v0: positive("V0", v0)?, k0: positive("k0", k0)? })
}

impl Sampler for PeriodicPotential {
    fn value(&self, x: f64, _y: f64) -> f64 {
        self.v0 * (2.0 * self.k0 * x).cos()
    }
}

/// Statistics of a Gaussian random potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub rms: f64,
    pub corr_len: f64,
    pub seed: u64,
}

/// Mean-zero Gaussian random field with Gaussian correlations
/// `C(r) ~ exp(-r^2 / (2 corr_len^2))`, rescaled to the exact sample RMS.
///
/// White noise from a ChaCha8 stream seeded with `spec.seed` is filtered in
/// Fourier space by `exp(-k^2 corr_len^2 / 4)`. The result depends only on
/// `(spec, grid)`.
pub fn potential_disorder(spec: &DisorderSpec, grid: &GridSpec) -> Result<RealField, LandscapeError> {
    non_negative("rms", spec.rms)?;
    let spacing = grid.dx().max(grid.dy());
    if !(spec.corr_len > spacing) {
        return Err(LandscapeError::CorrelationTooShort { corr_len: spec.corr_len, spacing });
    }
    if spec.rms == 0.0 {
        return Ok(RealField::zeros(*grid));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut data: Vec<Complex64> =
        (0..grid.len()).map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0)).collect();
    fft2(&mut data, nx, ny, FftDirection::Forward);
    let ell_sq = spec.corr_len * spec.corr_len;
    for j in 0..ny {
        let ky = wavenumber(j, ny, grid.ly());
        for i in 0..nx {
            let kx = wavenumber(i, nx, grid.lx());
            data[j * nx + i] *= (-0.25 * (kx * kx + ky * ky) * ell_sq).exp();
        }
    }
    fft2(&mut data, nx, ny, FftDirection::Inverse);
    let mut values: Vec<f64> = data.iter().map(|c| c.re).collect();
    let mean = pairwise_sum(&values) / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= mean);
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    let rms = (pairwise_sum(&squares) / values.len() as f64).sqrt();
    let scale = spec.rms / rms;
    values.iter_mut().for_each(|v| *v *= scale);
    RealField::new(*grid, values).map_err(|_| LandscapeError::NonFinite { index: 0 })
}

/// `P0 exp(-(r / r0)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPump {
    p0: f64,
    r0: f64,
}

pub fn pump_gaussian(p0: f64, r0: f64) -> Result<GaussianPump, LandscapeError> {
    Ok(GaussianPump { p0: non_negative("P0", p0)?, r0: positive("r0", r0)? })
}

impl Sampler for GaussianPump {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.p0 * (-(x * x + y * y) / (self.r0 * self.r0)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformPump {
    p0: f64,
}

pub fn pump_uniform(p0: f64) -> Result<UniformPump, LandscapeError> {
    Ok(UniformPump { p0: non_negative("P0", p0)? })
}

impl Sampler for UniformPump {
    fn value(&self, _x: f64, _y: f64) -> f64 {
        self.p0
    }
}

/// `P0 eta cos^2(k0 x) + gamma`, matching the density of a `+-k0` standing wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPump {
    p0: f64,
    k0: f64,
    eta: f64,
    gamma: f64,
}

pub fn pump_periodic(p0: f64, k0: f64, eta: f64, gamma: f64) -> Result<PeriodicPump, LandscapeError> {
    Ok(PeriodicPump {
        p0: non_negative("P0", p0)?,
        k0: positive("k0", k0)?,
        eta: non_negative("eta", eta)?,
        gamma: non_negative("gamma", gamma)?,
    })
}

impl Sampler for PeriodicPump {
    fn value(&self, x: f64, _y: f64) -> f64 {
        let c = (self.k0 * x).cos();
        self.p0 * self.eta * c * c + self.gamma
    }
}

/// Approximate channel state of the Mexican-hat ring:
/// `exp[-(sqrt(V0) / r_min) (r - r_min)^2] e^{-i l phi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingWavefunction {
    pub l: i32,
    v0: f64,
    r_min: f64,
}

impl RingWavefunction {
    pub fn new(l: i32, v0: f64, r_min: f64) -> Result<Self, LandscapeError> {
        Ok(Self { l, v0: positive("V0", v0)?, r_min: positive("r_min", r_min)? })
    }

    pub fn envelope(&self, r: f64) -> f64 {
        let d = r - self.r_min;
        (-self.v0.sqrt() / self.r_min * d * d).exp()
    }

    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        let r = x.hypot(y);
        Complex64::from_polar(self.envelope(r), -(self.l as f64) * y.atan2(x))
    }
}

/// `P0 |psi_l(r, phi)|^2` for the ring channel state; independent of `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingPump {
    p0: f64,
    wavefunction: RingWavefunction,
}

pub fn pump_ring(p0: f64, l: i32, v0: f64, r_min: f64) -> Result<RingPump, LandscapeError> {
    Ok(RingPump { p0: non_negative("P0", p0)?, wavefunction: RingWavefunction::new(l, v0, r_min)? })
}

impl Sampler for RingPump {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.p0 * self.wavefunction.envelope(x.hypot(y)).powi(2)
    }
}

/// Warns when a profile of spatial period `period` along x does not tile a
/// periodic domain.
fn check_commensurate(grid: &GridSpec, period: f64, what: &str) {
    if grid.boundary() != Boundary::Periodic {
        return;
    }
    let cells = grid.lx() / period;
    if (cells - cells.round()).abs() > 1e-9 {
        log::warn!("{what}: domain length {} holds {cells:.4} periods; the periodic wrap will be discontinuous", grid.lx());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    Flat,
    Disorder(DisorderSpec),
    MexicanHat { v0: f64, r_min: f64 },
    Kagome { v0: f64, k0: f64, #[serde(default = "default_kagome_p")] p: f64 },
    Periodic { v0: f64, k0: f64 },
}

fn default_kagome_p() -> f64 {
    KAGOME_P
}

impl PotentialSpec {
    pub fn sample(&self, grid: &GridSpec) -> Result<RealField, LandscapeError> {
        Ok(match *self {
            PotentialSpec::Flat => potential_flat().sample(grid),
            PotentialSpec::Disorder(spec) => potential_disorder(&spec, grid)?,
            PotentialSpec::MexicanHat { v0, r_min } => potential_mexican_hat(v0, r_min)?.sample(grid),
            PotentialSpec::Kagome { v0, k0, p } => potential_kagome(v0, k0, p)?.sample(grid),
            PotentialSpec::Periodic { v0, k0 } => {
                check_commensurate(grid, PI / k0, "periodic potential");
                potential_periodic_1d(v0, k0)?.sample(grid)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PumpSpec {
    Gaussian { p0: f64, r0: f64 },
    Uniform { p0: f64 },
    Periodic { p0: f64, k0: f64, eta: f64, gamma: f64 },
    Ring { p0: f64, #[serde(default = "default_ring_l")] l: i32, v0: f64, r_min: f64 },
}

fn default_ring_l() -> i32 {
    1
}

impl PumpSpec {
    pub fn sample(&self, grid: &GridSpec) -> Result<RealField, LandscapeError> {
        Ok(match *self {
            PumpSpec::Gaussian { p0, r0 } => pump_gaussian(p0, r0)?.sample(grid),
            PumpSpec::Uniform { p0 } => pump_uniform(p0)?.sample(grid),
            PumpSpec::Periodic { p0, k0, eta, gamma } => {
                check_commensurate(grid, PI / k0, "periodic pump");
                pump_periodic(p0, k0, eta, gamma)?.sample(grid)
            }
            PumpSpec::Ring { p0, l, v0, r_min } => pump_ring(p0, l, v0, r_min)?.sample(grid),
        })
    }
}

/// Sampled external potential and pump on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    potential: RealField,
    pump: RealField,
    pub label: String,
}

impl Landscape {
    pub fn new(potential: RealField, pump: RealField, label: impl Into<String>) -> Result<Self, LandscapeError> {
        if potential.grid() != pump.grid() {
            return Err(LandscapeError::GridMismatch);
        }
        for (index, &v) in potential.values().iter().enumerate() {
            if !v.is_finite() {
                return Err(LandscapeError::NonFinite { index });
            }
        }
        for (index, &value) in pump.values().iter().enumerate() {
            if !value.is_finite() {
                return Err(LandscapeError::NonFinite { index });
            }
            if value < 0.0 {
                return Err(LandscapeError::NegativePump { index, value });
            }
        }
        Ok(Self { potential, pump, label: label.into() })
    }

    pub fn from_specs(potential: &PotentialSpec, pump: &PumpSpec, grid: &GridSpec) -> Result<Self, LandscapeError> {
        let label = format!("{potential:?} / {pump:?}");
        Self::new(potential.sample(grid)?, pump.sample(grid)?, label)
    }

    pub fn grid(&self) -> &GridSpec {
        self.potential.grid()
    }

    pub fn potential(&self) -> &RealField {
        &self.potential
    }

    pub fn pump(&self) -> &RealField {
        &self.pump
    }

    /// Same landscape with `V -> V + c`.
    pub fn shifted_potential(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.potential.add_constant(c);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Boundary;

    fn grid() -> GridSpec {
        GridSpec::new(64, 64, 32.0, 32.0, Boundary::Periodic).unwrap()
    }

    #[test]
    fn flat_is_zero() {
        let v = potential_flat().sample(&grid());
        assert!(v.values().iter().all(|&x| x == 0.0));
        assert_eq!(v.integral(), 0.0);
    }

    #[test]
    fn mexican_hat_values() {
        let h = potential_mexican_hat(1.5, 5.0).unwrap();
        assert!((h.value(5.0, 0.0) + 1.5).abs() < 1e-15);
        assert!((h.value(0.0, -5.0) + 1.5).abs() < 1e-15);
        assert_eq!(h.value(0.0, 0.0), 0.0);
        let r = 2f64.sqrt() * 5.0;
        assert!(h.value(r, 0.0).abs() < 1e-14);
        assert!(potential_mexican_hat(0.0, 5.0).is_err());
    }

    #[test]
    fn kagome_origin_and_positivity() {
        let k = potential_kagome(0.7, 1.3, KAGOME_P).unwrap();
        assert!((k.value(0.0, 0.0) - 9.0 * 0.7).abs() < 1e-13);
        let v = k.sample(&grid());
        assert!(v.min() >= 0.0);
        assert!(v.max() <= 9.0 * 0.7 + 1e-12);
    }

    #[test]
    fn kagome_is_mirror_symmetric() {
        let k = potential_kagome(1.0, 2.1, KAGOME_P).unwrap();
        for &(x, y) in &[(0.3, 1.7), (-2.2, 0.4), (5.0, -3.3)] {
            let v = k.value(x, y);
            assert!((k.value(-x, y) - v).abs() < 1e-12);
            assert!((k.value(x, -y) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn kagome_lattice_translations() {
        let k0 = 1.7;
        let k = potential_kagome(2.0, k0, KAGOME_P).unwrap();
        let a = 2.0 * PI / k0;
        let r1 = (a, -a / 3f64.sqrt());
        let r2 = (0.0, 2.0 * a / 3f64.sqrt());
        let g = GridSpec::new(32, 32, 12.0, 12.0, Boundary::Periodic).unwrap();
        for (x, y) in g.points() {
            let v = k.value(x, y);
            for (n1, n2) in [(1.0, 0.0), (0.0, 1.0), (2.0, -3.0)] {
                let (tx, ty) = (n1 * r1.0 + n2 * r2.0, n1 * r1.1 + n2 * r2.1);
                assert!((k.value(x + tx, y + ty) - v).abs() <= 1e-12 * 18.0);
            }
        }
    }

    #[test]
    fn periodic_potential_values_and_period() {
        let k0 = 2.0 * PI / 10.0;
        let p = potential_periodic_1d(1.0, k0).unwrap();
        assert_eq!(p.value(0.0, 3.0), 1.0);
        assert!((p.value(PI / (2.0 * k0), 0.0) + 1.0).abs() < 1e-15);
        // period pi/k0 = 5, half the pump period 2pi/k0... of cos(k0 x)
        for x in [0.1, 1.3, 4.4] {
            assert!((p.value(x + PI / k0, 0.0) - p.value(x, 0.0)).abs() < 1e-12);
            assert!((p.value(x + PI / (2.0 * k0), 0.0) - p.value(x, 0.0)).abs() > 1e-3);
        }
    }

    #[test]
    fn periodic_profiles_tile_commensurate_grid() {
        let k0 = 2.0 * PI / 10.0;
        let g = GridSpec::new(80, 8, 40.0, 4.0, Boundary::Periodic).unwrap();
        let v = potential_periodic_1d(1.0, k0).unwrap().sample(&g);
        let p = pump_periodic(2.0, k0, 1.0, 1.0).unwrap().sample(&g);
        // translation by one period (10 samples of 0.5)
        for j in 0..8 {
            for i in 0..70 {
                assert!((v.at(i + 10, j) - v.at(i, j)).abs() < 1e-12);
                assert!((p.at(i + 10, j) - p.at(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pump_values() {
        let p = pump_gaussian(2.0, 5.35).unwrap();
        assert_eq!(p.value(0.0, 0.0), 2.0);
        assert!((p.value(5.35, 0.0) - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((p.value(0.0, 5.35) - 0.7358).abs() < 1e-4);

        let u = pump_uniform(2.0).unwrap();
        assert_eq!(u.value(-3.0, 9.0), 2.0);
        assert_eq!(pump_uniform(0.0).unwrap().value(1.0, 1.0), 0.0);
        assert!(pump_uniform(-1.0).is_err());

        let k0 = 0.4;
        let pp = pump_periodic(2.0, k0, 1.0, 1.0).unwrap();
        assert_eq!(pp.value(0.0, 0.0), 3.0);
        assert!((pp.value(PI / (2.0 * k0), 0.0) - 1.0).abs() < 1e-15);
        let v = pp.sample(&grid());
        assert!(v.min() >= 1.0 - 1e-15 && v.max() <= 3.0 + 1e-15);
    }

    #[test]
    fn ring_pump_values() {
        let p = pump_ring(2.0, 1, 1.0, 5.0).unwrap();
        assert!((p.value(5.0, 0.0) - 2.0).abs() < 1e-15);
        assert!((p.value(0.0, 6.0) - 2.0 * (-0.4f64).exp()).abs() < 1e-15);
        assert!((p.value(0.0, 6.0) - 1.3406).abs() < 1e-4);
        let other = pump_ring(2.0, 5, 1.0, 5.0).unwrap();
        let g = grid();
        assert_eq!(p.sample(&g), other.sample(&g));
    }

    #[test]
    fn every_pump_is_non_negative() {
        let g = grid();
        let pumps = [
            PumpSpec::Gaussian { p0: 2.0, r0: 5.35 },
            PumpSpec::Uniform { p0: 0.0 },
            PumpSpec::Periodic { p0: 2.0, k0: 0.6, eta: 1.0, gamma: 0.0 },
            PumpSpec::Ring { p0: 2.0, l: 3, v0: 1.0, r_min: 5.0 },
        ];
        for spec in pumps {
            assert!(spec.sample(&g).unwrap().min() >= 0.0);
        }
    }

    #[test]
    fn landscape_rejects_negative_pump() {
        let g = grid();
        let mut pump = RealField::zeros(g);
        pump.values_mut()[3] = -0.1;
        let err = Landscape::new(RealField::zeros(g), pump, "bad").unwrap_err();
        assert_eq!(err, LandscapeError::NegativePump { index: 3, value: -0.1 });
    }

    #[test]
    fn disorder_statistics_and_determinism() {
        let g = GridSpec::new(256, 256, 32.0, 32.0, Boundary::DirichletZero).unwrap();
        let spec = DisorderSpec { rms: 0.5, corr_len: 2.0, seed: 42 };
        let a = potential_disorder(&spec, &g).unwrap();
        let b = potential_disorder(&spec, &g).unwrap();
        assert_eq!(a, b);
        let n = a.values().len() as f64;
        let mean: f64 = a.values().iter().sum::<f64>() / n;
        let rms = (a.values().iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-12);
        assert!((rms - 0.5).abs() <= 0.01);
        let c = potential_disorder(&DisorderSpec { seed: 43, ..spec }, &g).unwrap();
        assert_ne!(a, c);

        let zero = potential_disorder(&DisorderSpec { rms: 0.0, ..spec }, &g).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        assert!(matches!(
            potential_disorder(&DisorderSpec { corr_len: 0.1, ..spec }, &g),
            Err(LandscapeError::CorrelationTooShort { .. })
        ));
    }

    #[test]
    fn disorder_correlation_length_is_respected() {
        // lag-1 correlation should follow exp(-h^2 / (2 l^2)) for the chosen filter
        let g = GridSpec::new(256, 256, 64.0, 64.0, Boundary::Periodic).unwrap();
        let spec = DisorderSpec { rms: 1.0, corr_len: 2.0, seed: 7 };
        let v = potential_disorder(&spec, &g).unwrap();
        let lag = 4; // 1.0 length units
        let mut acc = 0.0;
        for j in 0..256 {
            for i in 0..256 {
                acc += v.at(i, j) * v.at((i + lag) % 256, j);
            }
        }
        let corr = acc / (256.0 * 256.0);
        let expected = (-1.0f64 / 8.0).exp();
        assert!((corr - expected).abs() < 0.05, "lag correlation {corr} vs {expected}");
    }
}

//! Observables extracted from condensate fields: azimuthal density
//! profiles, lobe statistics, phase winding, interlobe phases, momentum
//! populations, steady-state detection and rotation estimates.

use crate::field::{pairwise_sum, principal_arg, Boundary, ComplexField, GridSpec};
use crate::spectral::{bin_of, fft2};
use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("profile needs a positive radius and at least 8 bins (radius {radius}, bins {bins})")]
    BadProfile { radius: f64, bins: usize },
    #[error("circle of radius {0} leaves the grid")]
    OutsideGrid(f64),
    #[error("density on the sampling circle drops below the floor; winding is undefined")]
    DensityFloor,
    #[error("no lobes found")]
    NoLobes,
    #[error("momentum analysis needs a periodic grid")]
    NotPeriodic,
    #[error("wavenumber {0} is not commensurate with the domain")]
    Incommensurate(f64),
    #[error("expected {expected} observable values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("winding number must be nonzero")]
    ZeroWinding,
    #[error("profiles differ in radius or bin count")]
    ProfileMismatch,
}

/// Bilinear interpolation of samples at `(x, y)`. Dirichlet grids read zero
/// on the far walls; points beyond the walls give `None`.
fn interpolate<T>(grid: &GridSpec, values: &[T], x: f64, y: f64) -> Option<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
    let fx = (x - grid.x(0)) / grid.dx();
    let fy = (y - grid.y(0)) / grid.dy();
    let (i0, j0) = (fx.floor() as isize, fy.floor() as isize);
    let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
    let periodic = grid.boundary() == Boundary::Periodic;
    let get = |i: isize, j: isize| -> Option<T> {
        if periodic {
            let (i, j) = (i.rem_euclid(nx), j.rem_euclid(ny));
            return Some(values[(j * nx + i) as usize]);
        }
        if i < 0 || j < 0 || i > nx || j > ny {
            None
        } else if i == nx || j == ny {
            Some(T::default())
        } else {
            Some(values[(j * nx + i) as usize])
        }
    };
    let v00 = get(i0, j0)?;
    let v10 = get(i0 + 1, j0)?;
    let v01 = get(i0, j0 + 1)?;
    let v11 = get(i0 + 1, j0 + 1)?;
    Some(v00 * ((1.0 - tx) * (1.0 - ty)) + v10 * (tx * (1.0 - ty)) + v01 * ((1.0 - tx) * ty) + v11 * (tx * ty))
}

/// Complex field value at an arbitrary point.
pub fn sample_at(field: &ComplexField, x: f64, y: f64) -> Option<Complex64> {
    interpolate(field.grid(), field.values(), x, y)
}

/// Mean density in equal angular bins of an annulus around the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularProfile {
    pub radius: f64,
    /// Bin centres, `2 pi b / n`.
    pub angles: Vec<f64>,
    pub density: Vec<f64>,
}

const RADIAL_SUBSAMPLES: usize = 9;
const ANGULAR_SUBSAMPLES: usize = 4;

/// Density averaged over the annulus `radius +/- 2 dx`, in `n_bins` angular
/// bins centred on `2 pi b / n_bins`. Each bin is integrated with an
/// area-weighted grid of bilinearly interpolated samples.
pub fn angular_profile(field: &ComplexField, radius: f64, n_bins: usize) -> Result<AngularProfile, AnalysisError> {
    if !(radius > 0.0 && radius.is_finite()) || n_bins < 8 {
        return Err(AnalysisError::BadProfile { radius, bins: n_bins });
    }
    let grid = field.grid();
    let density: Vec<f64> = field.values().iter().map(|v| v.norm_sqr()).collect();
    let half = (2.0 * grid.dx().max(grid.dy())).min(0.5 * radius);
    let width = TAU / n_bins as f64;
    let mut out = Vec::with_capacity(n_bins);
    for b in 0..n_bins {
        let centre = width * b as f64;
        let (mut acc, mut weight) = (0.0, 0.0);
        for m in 0..RADIAL_SUBSAMPLES {
            let r = radius - half + 2.0 * half * (m as f64 + 0.5) / RADIAL_SUBSAMPLES as f64;
            for a in 0..ANGULAR_SUBSAMPLES {
                let phi = centre + width * ((a as f64 + 0.5) / ANGULAR_SUBSAMPLES as f64 - 0.5);
                let n = interpolate(grid, &density, r * phi.cos(), r * phi.sin())
                    .ok_or(AnalysisError::OutsideGrid(radius))?;
                acc += r * n;
                weight += r;
            }
        }
        out.push(acc / weight);
    }
    let angles = (0..n_bins).map(|b| width * b as f64).collect();
    Ok(AngularProfile { radius, angles, density: out })
}

/// Radius of the largest azimuthally averaged density about the origin.
pub fn ring_radius(field: &ComplexField) -> f64 {
    let grid = field.grid();
    let h = grid.dx().max(grid.dy());
    let r_max = 0.5 * grid.lx().min(grid.ly()) - 2.0 * h;
    let n_shells = (r_max / h).floor().max(1.0) as usize;
    let mut sums = vec![0.0; n_shells];
    let mut counts = vec![0usize; n_shells];
    for (k, v) in field.values().iter().enumerate() {
        let (x, y) = grid.coords(k);
        let s = (x.hypot(y) / h).round() as usize;
        if s < n_shells {
            sums[s] += v.norm_sqr();
            counts[s] += 1;
        }
    }
    let best = (1..n_shells)
        .filter(|&s| counts[s] > 0)
        .max_by(|&a, &b| (sums[a] / counts[a] as f64).total_cmp(&(sums[b] / counts[b] as f64)))
        .unwrap_or(1);
    best as f64 * h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeStats {
    pub count: usize,
    /// `(max - min) / (max + min)` of the profile.
    pub contrast: f64,
    pub peak_bins: Vec<usize>,
    pub peak_angles: Vec<f64>,
}

/// Minimum prominence of a lobe, relative to the profile maximum.
pub const LOBE_PROMINENCE: f64 = 0.1;

/// Counts circular peaks of the profile whose prominence is at least
/// [`LOBE_PROMINENCE`] of the maximum.
pub fn lobe_stats(profile: &AngularProfile) -> LobeStats {
    let d = &profile.density;
    let n = d.len();
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let contrast = if max + min > 0.0 { (max - min) / (max + min) } else { 0.0 };
    let mut peak_bins = Vec::new();
    if max > 0.0 {
        for b in 0..n {
            let prev = d[(b + n - 1) % n];
            let next = d[(b + 1) % n];
            if !(d[b] > prev && d[b] >= next) {
                continue;
            }
            // lowest point on each side before reaching higher ground
            let walk = |step: isize| -> f64 {
                let mut low = d[b];
                for s in 1..n as isize {
                    let v = d[(b as isize + step * s).rem_euclid(n as isize) as usize];
                    if v > d[b] {
                        break;
                    }
                    low = low.min(v);
                }
                low
            };
            let prominence = d[b] - walk(-1).max(walk(1));
            if prominence >= LOBE_PROMINENCE * max {
                peak_bins.push(b);
            }
        }
    }
    let peak_angles = peak_bins.iter().map(|&b| profile.angles[b]).collect();
    LobeStats { count: peak_bins.len(), contrast, peak_bins, peak_angles }
}

/// Net phase winding around a circle about `centre`, from `n_samples`
/// interpolated values. Positive for counter-clockwise phase increase, so a
/// pure `e^{-i l phi}` vortex gives `-l`.
pub fn phase_winding(field: &ComplexField, centre: (f64, f64), radius: f64, n_samples: usize) -> Result<i32, AnalysisError> {
    if !(radius > 0.0) || n_samples < 8 {
        return Err(AnalysisError::BadProfile { radius, bins: n_samples });
    }
    let floor = 1e-8 * field.peak_density();
    let mut samples = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        let phi = TAU * s as f64 / n_samples as f64;
        let v = sample_at(field, centre.0 + radius * phi.cos(), centre.1 + radius * phi.sin())
            .ok_or(AnalysisError::OutsideGrid(radius))?;
        if v.norm_sqr() <= floor {
            return Err(AnalysisError::DensityFloor);
        }
        samples.push(v);
    }
    let total: f64 = (0..n_samples).map(|s| principal_arg(samples[(s + 1) % n_samples] / samples[s])).sum();
    Ok((total / TAU).round() as i32)
}

/// Phase differences `arg(psi_next / psi_this)` in `[0, 2 pi)` between
/// circularly adjacent lobes of the profile at `radius`.
pub fn interlobe_phases(field: &ComplexField, radius: f64, n_bins: usize) -> Result<Vec<f64>, AnalysisError> {
    let profile = angular_profile(field, radius, n_bins)?;
    let stats = lobe_stats(&profile);
    if stats.count < 2 {
        return Err(AnalysisError::NoLobes);
    }
    let values: Vec<Complex64> = stats
        .peak_angles
        .iter()
        .map(|phi| sample_at(field, radius * phi.cos(), radius * phi.sin()).ok_or(AnalysisError::OutsideGrid(radius)))
        .collect::<Result<_, _>>()?;
    Ok((0..values.len())
        .map(|k| principal_arg(values[(k + 1) % values.len()] / values[k]).rem_euclid(TAU))
        .collect())
}

/// Phase difference between the first two lobes at `radius`.
pub fn interlobe_phase(field: &ComplexField, radius: f64, n_bins: usize) -> Result<f64, AnalysisError> {
    Ok(interlobe_phases(field, radius, n_bins)?[0])
}

/// Fraction of the total spectral weight at each x-wavenumber in `ks`,
/// summed over all y-wavenumbers.
pub fn momentum_populations(field: &ComplexField, ks: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    let grid = field.grid();
    if grid.boundary() != Boundary::Periodic {
        return Err(AnalysisError::NotPeriodic);
    }
    let bins: Vec<usize> = ks
        .iter()
        .map(|&k| bin_of(k, grid.nx(), grid.lx()).ok_or(AnalysisError::Incommensurate(k)))
        .collect::<Result<_, _>>()?;
    let mut spectrum = field.values().to_vec();
    fft2(&mut spectrum, grid.nx(), grid.ny(), FftDirection::Forward);
    let power: Vec<f64> = spectrum.iter().map(|v| v.norm_sqr()).collect();
    let total = pairwise_sum(&power);
    if total == 0.0 {
        return Ok(vec![0.0; ks.len()]);
    }
    let nx = grid.nx();
    Ok(bins
        .iter()
        .map(|&m| power.chunks_exact(nx).map(|row| row[m]).sum::<f64>() / total)
        .collect())
}

/// True once every value in the trailing `window` lies within a relative
/// `eps` of the last one.
pub fn steady_state_reached(values: &[f64], window: usize, eps: f64) -> bool {
    if window == 0 || values.len() < window {
        return false;
    }
    let tail = &values[values.len() - window..];
    let last = *tail.last().unwrap();
    if !last.is_finite() {
        return false;
    }
    let scale = last.abs().max(f64::MIN_POSITIVE);
    tail.iter().all(|v| ((v - last).abs() / scale) <= eps)
}

/// Multiplies `field` by `sqrt(1 + cos(2 l (phi + omega t)))`, the lobe
/// pattern of an `l` superposition turned by `-omega t`.
pub fn synth_rotated_pattern(field: &ComplexField, l: i32, omega: f64, t: f64) -> ComplexField {
    let grid = *field.grid();
    let mut out = field.clone();
    for (k, v) in out.values_mut().iter_mut().enumerate() {
        let (x, y) = grid.coords(k);
        let phi = y.atan2(x);
        *v *= (1.0 + (2.0 * l as f64 * (phi + omega * t)).cos()).max(0.0).sqrt();
    }
    out
}

/// Angle `theta` with `after(phi) ~ before(phi + theta)`, from the peak of
/// the circular cross-correlation refined by a parabola through its three
/// top samples. The result is reduced modulo the lobe period `pi / |l|`.
pub fn estimate_rotation(before: &AngularProfile, after: &AngularProfile, l: i32) -> Result<f64, AnalysisError> {
    if l == 0 {
        return Err(AnalysisError::ZeroWinding);
    }
    let n = before.density.len();
    if n != after.density.len() || (before.radius - after.radius).abs() > 1e-12 {
        return Err(AnalysisError::ProfileMismatch);
    }
    let corr: Vec<f64> = (0..n)
        .map(|s| (0..n).map(|b| after.density[b] * before.density[(b + s) % n]).sum())
        .collect();
    let best = (0..n).max_by(|&a, &b| corr[a].total_cmp(&corr[b])).unwrap();
    let (c_m, c_0, c_p) = (corr[(best + n - 1) % n], corr[best], corr[(best + 1) % n]);
    let denom = c_m - 2.0 * c_0 + c_p;
    let offset = if denom.abs() > 0.0 { (0.5 * (c_m - c_p) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    let theta = (best as f64 + offset) * TAU / n as f64;
    let period = PI / l.unsigned_abs() as f64;
    let reduced = theta.rem_euclid(period);
    Ok(if (period - reduced).abs() < 1e-9 { 0.0 } else { reduced })
}

/// A scalar evaluated on the field at each recording step.
pub trait Observer: Send + Sync {
    fn name(&self) -> String;
    fn observe(&self, field: &ComplexField) -> f64;
}

/// Built-in observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Observable {
    /// `sum |psi|^2 dx dy`.
    Norm,
    PeakDensity,
    /// Lobe contrast on a circle; radius `None` tracks the brightest ring.
    LobeContrast { #[serde(default)] radius: Option<f64> },
    LobeCount { #[serde(default)] radius: Option<f64> },
    /// Population fraction at x-wavenumber `k`.
    MomentumPopulation { k: f64 },
}

/// Angular bins used by the built-in lobe observables.
pub const OBSERVER_BINS: usize = 180;

impl Observable {
    fn profile(field: &ComplexField, radius: Option<f64>) -> Option<AngularProfile> {
        let r = radius.unwrap_or_else(|| ring_radius(field));
        angular_profile(field, r, OBSERVER_BINS).ok()
    }
}

impl Observer for Observable {
    fn name(&self) -> String {
        match self {
            Observable::Norm => "norm".into(),
            Observable::PeakDensity => "peak_density".into(),
            Observable::LobeContrast { .. } => "lobe_contrast".into(),
            Observable::LobeCount { .. } => "lobe_count".into(),
            Observable::MomentumPopulation { k } => format!("population_k{k:.4}"),
        }
    }

    fn observe(&self, field: &ComplexField) -> f64 {
        match *self {
            Observable::Norm => crate::field::field_norm(field),
            Observable::PeakDensity => field.peak_density(),
            Observable::LobeContrast { radius } => {
                Self::profile(field, radius).map_or(f64::NAN, |p| lobe_stats(&p).contrast)
            }
            Observable::LobeCount { radius } => {
                Self::profile(field, radius).map_or(f64::NAN, |p| lobe_stats(&p).count as f64)
            }
            Observable::MomentumPopulation { k } => {
                momentum_populations(field, &[k]).map_or(f64::NAN, |p| p[0])
            }
        }
    }
}

/// Named observable columns sampled at increasing times.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ObservableSeries {
    names: Vec<String>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl ObservableSeries {
    pub fn new(names: Vec<String>) -> Self {
        Self { names, times: Vec::new(), rows: Vec::new() }
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<(), AnalysisError> {
        if values.len() != self.names.len() {
            return Err(AnalysisError::LengthMismatch { expected: self.names.len(), got: values.len() });
        }
        self.times.push(t);
        self.rows.push(values);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        let c = self.names.iter().position(|n| n == name)?;
        self.rows.last().map(|r| r[c])
    }

    /// `t,<name>,...` header followed by one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.rows) {
            let _ = write!(out, "{t}");
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oam::{lg_mode, LgParams};
    use proptest::prelude::*;

    fn grid() -> GridSpec {
        GridSpec::new(128, 128, 32.0, 32.0, Boundary::DirichletZero).unwrap()
    }

    fn superposition(l: i32, w0: f64) -> ComplexField {
        let lg = LgParams::from_waist(w0, 1.0).unwrap();
        let a = lg_mode(l, 0, &lg, 0.0, &grid());
        let b = lg_mode(-l, 0, &lg, 0.0, &grid());
        let values = a.values().iter().zip(b.values()).map(|(a, b)| a + b).collect();
        ComplexField::new(grid(), values, 0.0).unwrap()
    }

    #[test]
    fn interpolation_is_exact_on_bilinear_functions() {
        let g = grid();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(2.0 * x - y + 0.5 * x * y, x));
        for &(x, y) in &[(0.3, -1.7), (5.55, 2.125), (-10.0, 3.3)] {
            let v = sample_at(&f, x, y).unwrap();
            assert!((v - Complex64::new(2.0 * x - y + 0.5 * x * y, x)).norm() < 1e-12);
        }
        assert!(sample_at(&f, 40.0, 0.0).is_none());
    }

    #[test]
    fn vortex_profiles_are_flat_and_superpositions_have_2l_lobes() {
        let lg = LgParams::from_waist(4.0, 1.0).unwrap();
        let vortex = lg_mode(1, 0, &lg, 0.0, &grid());
        let r = ring_radius(&vortex);
        assert!((r - 4.0 / 2f64.sqrt()).abs() < 0.3, "ring radius {r}");
        let flat = angular_profile(&vortex, r, 90).unwrap();
        assert!(lobe_stats(&flat).contrast < 0.02);
        for l in 1..=3 {
            let psi = superposition(l, 4.0);
            let r = ring_radius(&psi);
            let stats = lobe_stats(&angular_profile(&psi, r, 180).unwrap());
            assert_eq!(stats.count, 2 * l as usize);
            assert!(stats.contrast > 0.95);
        }
    }

    #[test]
    fn lobe_stats_edge_cases() {
        let profile = |density: Vec<f64>| AngularProfile {
            radius: 1.0,
            angles: (0..density.len()).map(|b| TAU * b as f64 / density.len() as f64).collect(),
            density,
        };
        let zero = lobe_stats(&profile(vec![0.0; 16]));
        assert_eq!((zero.count, zero.contrast), (0, 0.0));
        let constant = lobe_stats(&profile(vec![2.0; 16]));
        assert_eq!((constant.count, constant.contrast), (0, 0.0));
        // a 5% ripple on top of two strong lobes is not a lobe
        let d: Vec<f64> = (0..64)
            .map(|b| {
                let phi = TAU * b as f64 / 64.0;
                1.0 + (2.0 * phi).cos() + 0.05 * (14.0 * phi).cos()
            })
            .collect();
        assert_eq!(lobe_stats(&profile(d)).count, 2);
    }

    #[test]
    fn winding_of_lg_modes() {
        let lg = LgParams::from_waist(4.0, 1.0).unwrap();
        for l in -3..=3 {
            let psi = lg_mode(l, 0, &lg, 0.0, &grid());
            if l == 0 {
                assert_eq!(phase_winding(&psi, (0.0, 0.0), 3.0, 64), Ok(0));
            } else {
                assert_eq!(phase_winding(&psi, (0.0, 0.0), 3.0, 64), Ok(-l));
            }
        }
        let psi = superposition(1, 4.0);
        assert_eq!(phase_winding(&psi, (0.0, 0.0), 3.0, 64), Err(AnalysisError::DensityFloor));
    }

    #[test]
    fn adjacent_lobes_of_superpositions_are_in_antiphase() {
        for l in 1..=3 {
            let psi = superposition(l, 4.0);
            let phases = interlobe_phases(&psi, ring_radius(&psi), 180).unwrap();
            assert_eq!(phases.len(), 2 * l as usize);
            for p in phases {
                assert!((p - PI).abs() < 1e-6, "l = {l}: {p}");
            }
        }
    }

    #[test]
    fn momentum_populations_of_plane_wave_mixtures() {
        let g = GridSpec::new(64, 8, 40.0, 5.0, Boundary::Periodic).unwrap();
        let k0 = TAU / 10.0;
        let c = 1.0 / 3f64.sqrt();
        let psi = ComplexField::from_fn(g, |x, _| {
            Complex64::new(c, 0.0) + Complex64::from_polar(c, k0 * x) + Complex64::from_polar(c, -k0 * x)
        });
        let pops = momentum_populations(&psi, &[0.0, k0, -k0]).unwrap();
        for p in pops {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(momentum_populations(&psi, &[0.1]), Err(AnalysisError::Incommensurate(0.1)));
        assert_eq!(momentum_populations(&superposition(1, 4.0), &[0.0]), Err(AnalysisError::NotPeriodic));
    }

    #[test]
    fn steady_state_window() {
        assert!(steady_state_reached(&[5.0, 1.0, 1.0005, 1.0], 3, 1e-3));
        assert!(!steady_state_reached(&[5.0, 1.0, 1.01, 1.0], 3, 1e-3));
        assert!(!steady_state_reached(&[1.0], 3, 1e-3));
        assert!(!steady_state_reached(&[1.0, f64::NAN], 2, 1e-3));
    }

    #[test]
    fn rotation_is_recovered_from_synthetic_patterns() {
        let lg = LgParams::from_waist(4.0, 1.0).unwrap();
        let vortex = lg_mode(2, 0, &lg, 0.0, &grid());
        let r = ring_radius(&vortex);
        let before = angular_profile(&synth_rotated_pattern(&vortex, 2, 0.0, 0.0), r, 360).unwrap();
        for &angle in &[0.0, 0.05, 0.3, 0.77] {
            let after = angular_profile(&synth_rotated_pattern(&vortex, 2, angle, 1.0), r, 360).unwrap();
            let est = estimate_rotation(&before, &after, 2).unwrap();
            assert!((est - angle).abs() < 2e-3, "{angle} -> {est}");
        }
    }

    #[test]
    fn series_columns_and_csv() {
        let mut s = ObservableSeries::new(vec!["a".into(), "b".into()]);
        s.push(0.0, vec![1.0, 2.0]).unwrap();
        s.push(0.5, vec![3.0, 4.0]).unwrap();
        assert_eq!(s.push(1.0, vec![1.0]), Err(AnalysisError::LengthMismatch { expected: 2, got: 1 }));
        assert_eq!(s.column("b"), Some(vec![2.0, 4.0]));
        assert_eq!(s.last("a"), Some(3.0));
        assert_eq!(s.to_csv(), "t,a,b\n0,1,2\n0.5,3,4\n");
    }

    proptest! {
        #[test]
        fn winding_flips_under_conjugation(l in -3i32..=3, w0 in 3.0f64..5.0) {
            prop_assume!(l != 0);
            let lg = LgParams::from_waist(w0, 1.0).unwrap();
            let psi = lg_mode(l, 0, &lg, 0.0, &grid());
            let conj = ComplexField::new(grid(), psi.values().iter().map(|v| v.conj()).collect(), 0.0).unwrap();
            let a = phase_winding(&psi, (0.0, 0.0), w0, 64).unwrap();
            let b = phase_winding(&conj, (0.0, 0.0), w0, 64).unwrap();
            prop_assert_eq!(a, -b);
        }

        #[test]
        fn rotation_estimate_lies_in_one_lobe_period(l in 1i32..=3, angle in 0.0f64..3.0) {
            let lg = LgParams::from_waist(4.0, 1.0).unwrap();
            let vortex = lg_mode(l, 0, &lg, 0.0, &grid());
            let before = angular_profile(&synth_rotated_pattern(&vortex, l, 0.0, 0.0), 3.0, 72).unwrap();
            let after = angular_profile(&synth_rotated_pattern(&vortex, l, angle, 1.0), 3.0, 72).unwrap();
            let est = estimate_rotation(&before, &after, l).unwrap();
            prop_assert!((0.0..PI / l as f64).contains(&est));
        }
    }
}

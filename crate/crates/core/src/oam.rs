//! Laguerre-Gauss beams carrying orbital angular momentum.
//!
//! Modes follow the `e^{-i l phi}` winding convention, so a pure `(l, p)`
//! mode has phase winding `-l` around its core. Besides the closed form,
//! modes can be built at the waist by repeatedly applying discretised
//! raising operators to the fundamental Gaussian; the two constructions
//! are checked against each other in the tests.

use crate::field::{field_norm, Boundary, ComplexField, GridSpec};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use thiserror::Error;

/// Centred-difference order used by [`ladder_lg`].
pub const LADDER_STENCIL_ORDER: usize = 8;

/// Points per waist radius below which the ladder construction is refused.
pub const LADDER_MIN_POINTS_PER_WAIST: f64 = 8.0;

/// Domain extent, in waists, needed for the sampled mode to carry its full
/// norm.
pub const MIN_EXTENT_IN_WAISTS: f64 = 6.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OamError {
    #[error("Rayleigh range and wavenumber must be positive (b = {b}, k = {k})")]
    BadBeam { b: f64, k: f64 },
    #[error("split ratios {0} and {1} must be non-negative and sum to 1")]
    BadSplit(f64, f64),
    #[error("a Dove prism needs a nonzero winding number")]
    ZeroWinding,
    #[error("grid too coarse for the ladder construction: {points_per_waist:.2} points per waist, need {min}")]
    TooCoarse { points_per_waist: f64, min: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgParams {
    /// Rayleigh range `b`.
    pub rayleigh_range: f64,
    /// Optical wavenumber `k`.
    pub wavenumber: f64,
}

impl LgParams {
    pub fn new(rayleigh_range: f64, wavenumber: f64) -> Result<Self, OamError> {
        let p = Self { rayleigh_range, wavenumber };
        p.validate()?;
        Ok(p)
    }

    /// Beam with waist radius `w0` at `z = 0`.
    pub fn from_waist(w0: f64, wavenumber: f64) -> Result<Self, OamError> {
        Self::new(0.5 * wavenumber * w0 * w0, wavenumber)
    }

    pub fn validate(&self) -> Result<(), OamError> {
        let (b, k) = (self.rayleigh_range, self.wavenumber);
        if b > 0.0 && k > 0.0 && b.is_finite() && k.is_finite() {
            Ok(())
        } else {
            Err(OamError::BadBeam { b, k })
        }
    }

    /// `w(z)^2 = 2 (z^2 + b^2) / (k b)`.
    pub fn beam_radius_sq(&self, z: f64) -> f64 {
        let b = self.rayleigh_range;
        2.0 * (z * z + b * b) / (self.wavenumber * b)
    }

    pub fn beam_radius(&self, z: f64) -> f64 {
        self.beam_radius_sq(z).sqrt()
    }

    pub fn waist(&self) -> f64 {
        self.beam_radius(0.0)
    }

    /// `R(z) = (z^2 + b^2) / z`, infinite at the waist.
    pub fn curvature_radius(&self, z: f64) -> f64 {
        if z == 0.0 {
            f64::INFINITY
        } else {
            (z * z + self.rayleigh_range * self.rayleigh_range) / z
        }
    }

    pub fn gouy_phase(&self, l: i32, p: u32, z: f64) -> f64 {
        (2.0 * p as f64 + l.unsigned_abs() as f64 + 1.0) * (z / self.rayleigh_range).atan()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Generalised Laguerre polynomial `L_p^{|l|}(r)` from its finite sum.
pub fn laguerre_poly(p: u32, l_abs: u32, r: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for m in 0..=p {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(l_abs + p, p - m) * power / factorial(m);
        power *= r;
    }
    sum
}

/// Closed-form `u^LG_{l,p}(r, phi, z)` sampled on `grid`.
pub fn lg_mode(l: i32, p: u32, params: &LgParams, z: f64, grid: &GridSpec) -> ComplexField {
    let w_sq = params.beam_radius_sq(z);
    let w = w_sq.sqrt();
    let extent = grid.lx().min(grid.ly());
    if extent < MIN_EXTENT_IN_WAISTS * w {
        log::warn!(
            "grid extent {extent} is below {MIN_EXTENT_IN_WAISTS} beam radii ({w}); normalisation will be truncated"
        );
    }
    let l_abs = l.unsigned_abs();
    let amplitude = (2.0 * factorial(p) / (PI * w_sq * factorial(l_abs + p))).sqrt();
    let inv_r = 1.0 / params.curvature_radius(z);
    let gouy = params.gouy_phase(l, p, z);
    let k = params.wavenumber;
    ComplexField::from_fn(*grid, |x, y| {
        let r_sq = x * x + y * y;
        let radial = amplitude
            * (2.0 * r_sq / w_sq).sqrt().powi(l_abs as i32)
            * (-r_sq / w_sq).exp()
            * laguerre_poly(p, l_abs, 2.0 * r_sq / w_sq);
        let phi = y.atan2(x);
        let phase = -(0.5 * k * r_sq * inv_r + l as f64 * phi - gouy);
        Complex64::from_polar(radial, phase)
    })
}

/// Centred first-difference weights `c_m` for offsets `+-m`, `m = 1..`.
fn first_derivative_weights(order: usize) -> &'static [f64] {
    match order {
        2 => &[0.5],
        4 => &[2.0 / 3.0, -1.0 / 12.0],
        6 => &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
        8 => &[4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
        _ => panic!("unsupported stencil order {order}"),
    }
}

/// Centred first derivatives along x and y. Samples outside a Dirichlet
/// grid count as zero.
fn gradient(field: &ComplexField, order: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = field.grid();
    let (nx, ny) = (grid.nx() as isize, grid.ny() as isize);
    let periodic = grid.boundary() == Boundary::Periodic;
    let v = field.values();
    let get = |i: isize, j: isize| -> Complex64 {
        let (i, j) = if periodic {
            (i.rem_euclid(nx), j.rem_euclid(ny))
        } else if i < 0 || j < 0 || i >= nx || j >= ny {
            return Complex64::new(0.0, 0.0);
        } else {
            (i, j)
        };
        v[(j * nx + i) as usize]
    };
    let weights = first_derivative_weights(order);
    let (hx, hy) = (grid.dx(), grid.dy());
    let mut dfx = Vec::with_capacity(v.len());
    let mut dfy = Vec::with_capacity(v.len());
    for j in 0..ny {
        for i in 0..nx {
            let mut gx = Complex64::new(0.0, 0.0);
            let mut gy = Complex64::new(0.0, 0.0);
            for (m, &c) in weights.iter().enumerate() {
                let m = m as isize + 1;
                gx += c * (get(i + m, j) - get(i - m, j));
                gy += c * (get(i, j + m) - get(i, j - m));
            }
            dfx.push(gx / hx);
            dfy.push(gy / hy);
        }
    }
    (dfx, dfy)
}

/// Applies `A_-^dagger` (`sign = -1`, winds by `e^{-i phi}`) or `A_+^dagger`
/// (`sign = +1`, winds by `e^{+i phi}`), where
/// `A_x^dagger = (k x - b d/dx) / sqrt(2 b k)` and
/// `A_(+/-)^dagger = (A_x^dagger (+/-) i A_y^dagger) / sqrt(2)`.
fn apply_raising(field: &ComplexField, params: &LgParams, sign: f64, order: usize) -> ComplexField {
    let (b, k) = (params.rayleigh_range, params.wavenumber);
    let (dfx, dfy) = gradient(field, order);
    let i_sign = Complex64::new(0.0, sign);
    let norm = 1.0 / (2.0 * (b * k).sqrt());
    let grid = *field.grid();
    let mut out = field.clone();
    for (idx, v) in out.values_mut().iter_mut().enumerate() {
        let (x, y) = grid.coords(idx);
        let ax = k * x * *v - b * dfx[idx];
        let ay = k * y * *v - b * dfy[idx];
        *v = (ax + i_sign * ay) * norm;
    }
    out
}

/// Builds the `(l, p)` mode at the waist by applying `p + (|l|+l)/2`
/// OAM-raising and `p + (|l|-l)/2` OAM-lowering operators to the sampled
/// fundamental Gaussian, scaled by `1/sqrt(n+! n-!)` and by `(-1)^p` to match
/// the sign convention of [`lg_mode`], then renormalised to unit norm.
pub fn ladder_lg(l: i32, p: u32, params: &LgParams, grid: &GridSpec) -> Result<ComplexField, OamError> {
    ladder_lg_with_order(l, p, params, grid, LADDER_STENCIL_ORDER)
}

/// [`ladder_lg`] with an explicit centred-difference order (2, 4, 6 or 8).
pub fn ladder_lg_with_order(
    l: i32,
    p: u32,
    params: &LgParams,
    grid: &GridSpec,
    order: usize,
) -> Result<ComplexField, OamError> {
    params.validate()?;
    let points_per_waist = params.waist() / grid.dx().max(grid.dy());
    if points_per_waist < LADDER_MIN_POINTS_PER_WAIST {
        return Err(OamError::TooCoarse { points_per_waist, min: LADDER_MIN_POINTS_PER_WAIST });
    }
    let l_abs = l.unsigned_abs();
    let (n_raise, n_lower) = if l >= 0 { (p + l_abs, p) } else { (p, p + l_abs) };
    let mut field = lg_mode(0, 0, params, 0.0, grid);
    for _ in 0..n_raise {
        field = apply_raising(&field, params, -1.0, order);
    }
    for _ in 0..n_lower {
        field = apply_raising(&field, params, 1.0, order);
    }
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    field.scale(Complex64::new(sign / (factorial(n_raise) * factorial(n_lower)).sqrt(), 0.0));
    let norm = field_norm(&field);
    if norm > 0.0 {
        field.scale(Complex64::new(1.0 / norm.sqrt(), 0.0));
    }
    Ok(field)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTerm {
    pub l: i32,
    pub p: u32,
    pub c: Complex64,
}

#[derive(Serialize, Deserialize)]
struct ModeTermRepr {
    l: i32,
    p: u32,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl Serialize for ModeTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModeTermRepr { l: self.l, p: self.p, re: self.c.re, im: self.c.im }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModeTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ModeTermRepr::deserialize(d)?;
        Ok(ModeTerm { l: r.l, p: r.p, c: Complex64::new(r.re, r.im) })
    }
}

/// Weighted list of LG labels. Duplicate `(l, p)` labels are merged on
/// construction, keeping first-appearance order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct ModeSpec {
    terms: Vec<ModeTerm>,
}

impl<'de> Deserialize<'de> for ModeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(ModeSpec::new(Vec::<ModeTerm>::deserialize(d)?))
    }
}

impl ModeSpec {
    pub fn new(terms: impl IntoIterator<Item = ModeTerm>) -> Self {
        let mut merged: Vec<ModeTerm> = Vec::new();
        for t in terms {
            match merged.iter_mut().find(|m| m.l == t.l && m.p == t.p) {
                Some(m) => m.c += t.c,
                None => merged.push(t),
            }
        }
        Self { terms: merged }
    }

    pub fn single(l: i32, p: u32) -> Self {
        Self::new([ModeTerm { l, p, c: Complex64::new(1.0, 0.0) }])
    }

    pub fn terms(&self) -> &[ModeTerm] {
        &self.terms
    }

    pub fn coefficient(&self, l: i32, p: u32) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.l == l && t.p == p)
            .map_or(Complex64::new(0.0, 0.0), |t| t.c)
    }

    /// `sum |c|^2`.
    pub fn weight(&self) -> f64 {
        self.terms.iter().map(|t| t.c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.weight() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Self {
        let s = self.weight().sqrt();
        Self { terms: self.terms.iter().map(|t| ModeTerm { c: t.c / s, ..*t }).collect() }
    }
}

// The interferometer is tracked as coherent amplitudes of labelled modes.

fn beam_splitter(amplitude: f64, split: (f64, f64)) -> (f64, f64) {
    (amplitude * split.0.sqrt(), amplitude * split.1.sqrt())
}

fn dove_prism(l: i32) -> i32 {
    -l
}

fn phase_shifter(c: Complex64, phase: f64) -> Complex64 {
    c * Complex64::from_polar(1.0, phase)
}

/// Output of the spiral-phase-plate + Mach-Zehnder + Dove-prism setup fed
/// with a pure `(l, p)` beam: `alpha a_{l,p} + beta e^{i phase} a_{-l,p}`,
/// where `split = (|alpha|^2, |beta|^2)`. The second splitter's unused port
/// is dropped.
pub fn mach_zehnder(l: i32, p: u32, split: (f64, f64), phase: f64) -> Result<ModeSpec, OamError> {
    let (a, b) = split;
    if !(a >= 0.0 && b >= 0.0) || (a + b - 1.0).abs() > 1e-12 {
        return Err(OamError::BadSplit(a, b));
    }
    if l == 0 {
        return Err(OamError::ZeroWinding);
    }
    let (upper, lower) = beam_splitter(1.0, split);
    let lower_l = dove_prism(l);
    let lower_c = phase_shifter(Complex64::new(lower, 0.0), phase);
    let terms = [ModeTerm { l, p, c: Complex64::new(upper, 0.0) }, ModeTerm { l: lower_l, p, c: lower_c }];
    Ok(ModeSpec::new(terms.into_iter().filter(|t| t.c.norm_sqr() > 0.0)))
}

/// `sum_terms c * u^LG_{l,p}` at distance `z`.
pub fn sample_superposition(spec: &ModeSpec, params: &LgParams, z: f64, grid: &GridSpec) -> ComplexField {
    let mut out = ComplexField::zeros(*grid);
    for term in spec.terms() {
        let mode = lg_mode(term.l, term.p, params, z, grid);
        for (o, m) in out.values_mut().iter_mut().zip(mode.values()) {
            *o += term.c * m;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Boundary;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn beam() -> LgParams {
        LgParams::from_waist(2.0, 1.0).unwrap()
    }

    #[test]
    fn laguerre_values() {
        for r in [0.0, 0.7, 3.0] {
            assert_eq!(laguerre_poly(0, 4, r), 1.0);
        }
        assert!((laguerre_poly(1, 1, 2.0)).abs() < 1e-15);
        assert!((laguerre_poly(1, 1, 0.5) - 1.5).abs() < 1e-15);
        assert_eq!(laguerre_poly(2, 0, 0.0), 1.0);
        // L_p^l(0) = C(l+p, p)
        assert!((laguerre_poly(3, 2, 0.0) - 10.0).abs() < 1e-12);
        // L_2^0(r) = 1 - 2r + r^2/2
        let r = 1.7;
        assert!((laguerre_poly(2, 0, r) - (1.0 - 2.0 * r + 0.5 * r * r)).abs() < 1e-14);
    }

    #[test]
    fn beam_geometry() {
        let p = LgParams::new(8.0, 1.0).unwrap();
        assert!((p.waist() - 4.0).abs() < 1e-15);
        assert_eq!(p.curvature_radius(0.0), f64::INFINITY);
        assert!((p.curvature_radius(8.0) - 16.0).abs() < 1e-15);
        assert!((p.gouy_phase(2, 1, 8.0) - 5.0 * PI / 4.0).abs() < 1e-14);
        assert!(LgParams::new(0.0, 1.0).is_err());
        assert!(LgParams::new(1.0, -2.0).is_err());
    }

    #[test]
    fn fundamental_peak_matches_closed_form() {
        let grid = GridSpec::new(64, 64, 16.0, 16.0, Boundary::DirichletZero).unwrap();
        let f = lg_mode(0, 0, &beam(), 0.0, &grid);
        let w = 2.0f64;
        let expected = (2.0 / (PI * w * w)).sqrt();
        let centre = f.at(32, 32);
        assert!((centre.re - expected).abs() < 1e-15);
        assert_eq!(centre.im, 0.0);
        assert!(f.values().iter().all(|v| v.im.abs() < 1e-15 && v.re >= 0.0));
    }

    #[test]
    fn opposite_windings_are_conjugate() {
        let grid = GridSpec::new(48, 48, 16.0, 16.0, Boundary::DirichletZero).unwrap();
        let a = lg_mode(1, 0, &beam(), 0.0, &grid);
        let b = lg_mode(-1, 0, &beam(), 0.0, &grid);
        for (u, v) in a.values().iter().zip(b.values()) {
            assert!((u.norm_sqr() - v.norm_sqr()).abs() < 1e-15);
            assert!((u - v.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn off_waist_modes_stay_normalised() {
        let grid = GridSpec::new(256, 256, 40.0, 40.0, Boundary::DirichletZero).unwrap();
        let params = beam();
        for (l, p) in [(0, 0), (1, 0), (-2, 1), (3, 2)] {
            let n = field_norm(&lg_mode(l, p, &params, 3.0, &grid));
            assert!((n - 1.0).abs() < 1e-6, "(l={l}, p={p}) norm {n}");
        }
    }

    #[test]
    fn ladder_identity_and_low_modes() {
        let grid = GridSpec::new(128, 128, 16.0, 16.0, Boundary::DirichletZero).unwrap();
        let params = beam();
        let g = ladder_lg(0, 0, &params, &grid).unwrap();
        let closed = lg_mode(0, 0, &params, 0.0, &grid);
        assert!(g.relative_l2(&closed).unwrap() < 1e-12);
        let one = ladder_lg(1, 0, &params, &grid).unwrap();
        assert!(one.relative_l2(&lg_mode(1, 0, &params, 0.0, &grid)).unwrap() < 1e-4);
        let minus = ladder_lg(-1, 1, &params, &grid).unwrap();
        assert!(minus.relative_l2(&lg_mode(-1, 1, &params, 0.0, &grid)).unwrap() < 1e-3);
    }

    #[test]
    fn ladder_rejects_coarse_grids() {
        let grid = GridSpec::new(16, 16, 16.0, 16.0, Boundary::DirichletZero).unwrap();
        assert!(matches!(ladder_lg(1, 0, &beam(), &grid), Err(OamError::TooCoarse { .. })));
    }

    #[test]
    fn mach_zehnder_outputs() {
        let s = mach_zehnder(1, 0, (0.5, 0.5), 0.0).unwrap();
        assert!((s.coefficient(1, 0) - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.coefficient(-1, 0) - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        let pure = mach_zehnder(1, 0, (1.0, 0.0), 0.3).unwrap();
        assert_eq!(pure.terms().len(), 1);
        assert_eq!(pure.coefficient(1, 0), Complex64::new(1.0, 0.0));

        let s = mach_zehnder(2, 0, (0.5, 0.5), PI).unwrap();
        assert!((s.coefficient(2, 0) - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((s.coefficient(-2, 0) - Complex64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        assert_eq!(mach_zehnder(1, 0, (0.6, 0.6), 0.0), Err(OamError::BadSplit(0.6, 0.6)));
        assert_eq!(mach_zehnder(0, 0, (0.5, 0.5), 0.0), Err(OamError::ZeroWinding));
    }

    #[test]
    fn mode_spec_merges_duplicates() {
        let c = Complex64::new(0.5, 0.0);
        let s = ModeSpec::new([ModeTerm { l: 1, p: 0, c }, ModeTerm { l: -1, p: 0, c }, ModeTerm { l: 1, p: 0, c }]);
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.coefficient(1, 0), Complex64::new(1.0, 0.0));
        assert!((s.weight() - 1.25).abs() < 1e-15);
        assert!(s.normalized().is_normalized());
    }

    #[test]
    fn single_term_superposition_is_the_mode() {
        let grid = GridSpec::new(32, 32, 16.0, 16.0, Boundary::DirichletZero).unwrap();
        let s = sample_superposition(&ModeSpec::single(2, 1), &beam(), 0.0, &grid);
        assert_eq!(s, lg_mode(2, 1, &beam(), 0.0, &grid));
    }
}

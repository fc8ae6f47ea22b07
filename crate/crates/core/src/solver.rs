//! Explicit time integration of the open-dissipative Gross-Pitaevskii
//! equation in simulation units:
//!
//! ```text
//! i dpsi/dt = [ -lap + V + g |psi|^2 + (i/2) (P - gamma - eta |psi|^2) ] psi
//! ```
//!
//! Space is discretised with the 4th-order centred Laplacian. Two time
//! integrators share it: the classical four-stage Runge-Kutta method
//! (reference) and a generalized FDTD scheme that splits `psi` into real and
//! imaginary parts and advances both with a truncated Taylor series whose
//! time derivatives are generated from the coupled equations themselves.
//! The cubic nonlinearity makes those derivatives exact Cauchy products of
//! the lower-order coefficients, so the series can be carried to any order.
//!
//! Periodic grids wrap. On Dirichlet grids the `i = 0` column and `j = 0`
//! row lie on the walls `x = -lx/2`, `y = -ly/2` and are held at zero; the
//! opposite walls sit one spacing past the last sample, and ghost values
//! beyond a wall are odd reflections. This keeps the stencil mirror
//! symmetric about the origin.

use crate::analysis::{ObservableSeries, Observer};
use crate::field::{pairwise_sum, Boundary, ComplexField, GridSpec, SimParams};
use crate::landscape::{Landscape, RingWavefunction};
use crate::oam::{lg_mode, LgParams};
use crate::spectral::bin_of;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("non-finite field after step {step} (t = {t}); last finite state kept")]
    BlowUp { step: u64, t: f64, last_good: Box<ComplexField> },
    #[error("time step {dt} exceeds the stability limit {limit}")]
    UnstableDt { dt: f64, limit: f64 },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("gain saturation eta must be positive to seed from the equilibrium density")]
    ZeroEta,
    #[error("field, potential and pump must share one grid")]
    GridMismatch,
    #[error("momentum seeds need a periodic grid")]
    NotPeriodic,
    #[error("wavenumber {0} is not commensurate with the domain")]
    Incommensurate(f64),
    #[error("invalid parameters: {0}")]
    Params(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheme {
    /// Classical RK4 in time, 4th-order Laplacian in space.
    #[default]
    Rk4Fd4,
    /// Split real/imaginary Taylor series of the given order.
    Gfdtd { order: usize },
}


fn default_safety() -> f64 {
    0.8
}

fn default_t_end() -> f64 {
    10.0
}

fn default_snapshot_every() -> u64 {
    50
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Fixed step; `None` uses [`stable_dt`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: u64,
    #[serde(default)]
    pub allow_unstable_dt: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: None,
            scheme: Scheme::Rk4Fd4,
            safety: default_safety(),
            t_end: default_t_end(),
            snapshot_every: default_snapshot_every(),
            allow_unstable_dt: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(SolverError::Config(format!("safety must lie in (0, 1], got {}", self.safety)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::Config(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(SolverError::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if self.snapshot_every == 0 {
            return Err(SolverError::Config("snapshot_every must be at least 1".into()));
        }
        if let Scheme::Gfdtd { order } = self.scheme {
            if !(2..=12).contains(&order) {
                return Err(SolverError::Config(format!("Taylor order must lie in 2..=12, got {order}")));
            }
        }
        Ok(())
    }
}

/// Field plus everything needed to advance it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub field: ComplexField,
    pub params: SimParams,
    pub landscape: Landscape,
    pub step_count: u64,
}

impl SimState {
    pub fn new(mut field: ComplexField, params: SimParams, landscape: Landscape) -> Result<Self, SolverError> {
        if field.grid() != landscape.grid() {
            return Err(SolverError::GridMismatch);
        }
        params.validate().map_err(SolverError::Params)?;
        enforce_walls(&mut field);
        Ok(Self { field, params, landscape, step_count: 0 })
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }
}

/// Zeroes the wall samples of a Dirichlet grid.
pub fn enforce_walls(field: &mut ComplexField) {
    let grid = *field.grid();
    if grid.boundary() != Boundary::DirichletZero {
        return;
    }
    let nx = grid.nx();
    let values = field.values_mut();
    for v in values[..nx].iter_mut() {
        *v = Complex64::new(0.0, 0.0);
    }
    for row in values.chunks_exact_mut(nx) {
        row[0] = Complex64::new(0.0, 0.0);
    }
}

/// Largest step the explicit schemes are run at:
/// `safety * min( min(dx,dy)^2 / 4, 1 / rate )`, where
/// `rate = max|V| + |g| n + (max P + gamma + eta n) / 2` and
/// `n = max(max P - gamma, 0) / eta` is the equilibrium density estimate.
/// The first term keeps the 4th-order Laplacian spectrum (at most
/// `(16/3)(1/dx^2 + 1/dy^2)`) inside the RK4 imaginary-axis stability
/// interval `|z| < 2.83`.
pub fn stable_dt(grid: &GridSpec, params: &SimParams, landscape: &Landscape, safety: f64) -> f64 {
    let h = grid.dx().min(grid.dy());
    let kinetic = h * h / 4.0;
    let p_max = landscape.pump().max().max(0.0);
    let n_eq = if params.eta > 0.0 { (p_max - params.gamma).max(0.0) / params.eta } else { 0.0 };
    let rate = landscape.potential().max_abs()
        + params.g.abs() * n_eq
        + 0.5 * (p_max + params.gamma + params.eta * n_eq);
    let local = if rate > 0.0 { 1.0 / rate } else { f64::INFINITY };
    safety * kinetic.min(local)
}

const C0: f64 = -5.0 / 2.0;
const C1: f64 = 4.0 / 3.0;
const C2: f64 = -1.0 / 12.0;

/// Neighbour `(index, sign)` pairs at offsets -2, -1, +1, +2 along one axis.
type Neighbours = [(usize, f64); 4];

fn axis_neighbours(n: usize, boundary: Boundary) -> Vec<Neighbours> {
    let n_i = n as isize;
    (0..n_i)
        .map(|i| {
            let at = |o: isize| -> (usize, f64) {
                let k = i + o;
                match boundary {
                    Boundary::Periodic => (k.rem_euclid(n_i) as usize, 1.0),
                    Boundary::DirichletZero => {
                        if k == 0 || k == n_i {
                            (0, 0.0)
                        } else if k < 0 {
                            ((-k) as usize, -1.0)
                        } else if k > n_i {
                            ((2 * n_i - k) as usize, -1.0)
                        } else {
                            (k as usize, 1.0)
                        }
                    }
                }
            };
            [at(-2), at(-1), at(1), at(2)]
        })
        .collect()
}

/// 4th-order five-point-per-axis Laplacian.
#[derive(Debug, Clone)]
pub struct Laplacian {
    nx: usize,
    ny: usize,
    xn: Vec<Neighbours>,
    yn: Vec<Neighbours>,
    cx: f64,
    cy: f64,
    walls: bool,
}

impl Laplacian {
    pub fn new(grid: &GridSpec) -> Self {
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            xn: axis_neighbours(grid.nx(), grid.boundary()),
            yn: axis_neighbours(grid.ny(), grid.boundary()),
            cx: 1.0 / (grid.dx() * grid.dx()),
            cy: 1.0 / (grid.dy() * grid.dy()),
            walls: grid.boundary() == Boundary::DirichletZero,
        }
    }

    /// True for samples held at zero on a wall.
    #[inline]
    pub fn is_wall(&self, i: usize, j: usize) -> bool {
        self.walls && (i == 0 || j == 0)
    }

    #[inline]
    pub fn at<T>(&self, v: &[T], i: usize, j: usize) -> T
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        let row = j * self.nx;
        let c = v[row + i];
        let [xm2, xm1, xp1, xp2] = self.xn[i];
        let [ym2, ym1, yp1, yp2] = self.yn[j];
        let x = (v[row + xm2.0] * xm2.1 + v[row + xp2.0] * xp2.1) * C2
            + (v[row + xm1.0] * xm1.1 + v[row + xp1.0] * xp1.1) * C1
            + c * C0;
        let nx = self.nx;
        let y = (v[ym2.0 * nx + i] * ym2.1 + v[yp2.0 * nx + i] * yp2.1) * C2
            + (v[ym1.0 * nx + i] * ym1.1 + v[yp1.0 * nx + i] * yp1.1) * C1
            + c * C0;
        x * self.cx + y * self.cy
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for j in 0..self.ny {
            for i in 0..self.nx {
                if !self.is_wall(i, j) {
                    out[j * self.nx + i] = self.at(v, i, j);
                }
            }
        }
        out
    }
}

/// Discretised right-hand side for one state.
struct Operator {
    lap: Laplacian,
    potential: Vec<f64>,
    net_gain: Vec<f64>,
    g: f64,
    eta: f64,
}

impl Operator {
    /// `dpsi/dt = -i (-lap + V + g n) psi + (P - gamma - eta n) psi / 2`.
    fn rhs(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let nx = self.lap.nx;
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            for (i, o) in row.iter_mut().enumerate() {
                if self.lap.is_wall(i, j) {
                    *o = Complex64::new(0.0, 0.0);
                    continue;
                }
                let idx = j * nx + i;
                let p = psi[idx];
                let n = p.norm_sqr();
                let h = p * (self.potential[idx] + self.g * n) - self.lap.at(psi, i, j);
                let gain = 0.5 * (self.net_gain[idx] - self.eta * n);
                *o = Complex64::new(h.im, -h.re) + p * gain;
            }
        });
    }
}

/// Precomputed operator and scratch buffers for one state.
pub struct Integrator {
    op: Operator,
    scheme: Scheme,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    dens: Vec<Vec<f64>>,
}

impl Integrator {
    pub fn new(state: &SimState, scheme: Scheme) -> Self {
        let grid = state.grid();
        let n = grid.len();
        let gamma = state.params.gamma;
        let net_gain = state.landscape.pump().values().iter().map(|p| p - gamma).collect();
        let order = match scheme {
            Scheme::Gfdtd { order } => order,
            Scheme::Rk4Fd4 => 0,
        };
        let zeros = vec![Complex64::new(0.0, 0.0); n];
        Self {
            op: Operator {
                lap: Laplacian::new(grid),
                potential: state.landscape.potential().values().to_vec(),
                net_gain,
                g: state.params.g,
                eta: state.params.eta,
            },
            scheme,
            k: [zeros.clone(), zeros.clone(), zeros.clone(), zeros.clone()],
            tmp: zeros,
            re: vec![vec![0.0; n]; order + 1],
            im: vec![vec![0.0; n]; order + 1],
            dens: vec![vec![0.0; n]; order],
        }
    }

    fn rk4_step(&mut self, psi: &mut [Complex64], dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        let op = &self.op;
        op.rhs(psi, k1);
        axpy(tmp, psi, 0.5 * dt, k1);
        op.rhs(tmp, k2);
        axpy(tmp, psi, 0.5 * dt, k2);
        op.rhs(tmp, k3);
        axpy(tmp, psi, dt, k3);
        op.rhs(tmp, k4);
        let w = dt / 6.0;
        psi.par_iter_mut().enumerate().for_each(|(idx, p)| {
            *p += (k1[idx] + (k2[idx] + k3[idx]) * 2.0 + k4[idx]) * w;
        });
    }

    /// Taylor-series step on the real/imaginary split:
    /// `R' = H I + G R`, `I' = -H R + G I` with `H = -lap + V + g n`,
    /// `G = (P - gamma - eta n) / 2`, `n = R^2 + I^2`.
    fn taylor_step(&mut self, psi: &mut [Complex64], dt: f64, order: usize) {
        let nx = self.op.lap.nx;
        for (idx, p) in psi.iter().enumerate() {
            self.re[0][idx] = p.re;
            self.im[0][idx] = p.im;
        }
        for k in 0..order {
            let (re_low, re_high) = self.re.split_at_mut(k + 1);
            let (im_low, im_high) = self.im.split_at_mut(k + 1);
            let (dens_low, dens_high) = self.dens.split_at_mut(k);
            let re_next = &mut re_high[0];
            let im_next = &mut im_high[0];
            let dens_k = &mut dens_high[0];
            let (re_low, im_low, dens_low) = (&*re_low, &*im_low, &*dens_low);
            let lap = &self.op.lap;
            let (pot, net_gain, g, eta) = (&self.op.potential, &self.op.net_gain, self.op.g, self.op.eta);
            let inv = 1.0 / (k + 1) as f64;
            re_next
                .par_chunks_mut(nx)
                .zip(im_next.par_chunks_mut(nx))
                .zip(dens_k.par_chunks_mut(nx))
                .enumerate()
                .for_each(|(j, ((re_row, im_row), dens_row))| {
                    for i in 0..nx {
                        let idx = j * nx + i;
                        let mut n_k = 0.0;
                        for m in 0..=k {
                            n_k += re_low[m][idx] * re_low[k - m][idx] + im_low[m][idx] * im_low[k - m][idx];
                        }
                        dens_row[i] = n_k;
                        if lap.is_wall(i, j) {
                            re_row[i] = 0.0;
                            im_row[i] = 0.0;
                            continue;
                        }
                        // (n R)_k and (n I)_k
                        let mut nr = n_k * re_low[0][idx];
                        let mut ni = n_k * im_low[0][idx];
                        for m in 0..k {
                            nr += dens_low[m][idx] * re_low[k - m][idx];
                            ni += dens_low[m][idx] * im_low[k - m][idx];
                        }
                        let (r, s) = (re_low[k][idx], im_low[k][idx]);
                        let lap_r: f64 = lap.at(&re_low[k], i, j);
                        let lap_i: f64 = lap.at(&im_low[k], i, j);
                        let h_i = -lap_i + pot[idx] * s + g * ni;
                        let h_r = -lap_r + pot[idx] * r + g * nr;
                        re_row[i] = (h_i + 0.5 * (net_gain[idx] * r - eta * nr)) * inv;
                        im_row[i] = (-h_r + 0.5 * (net_gain[idx] * s - eta * ni)) * inv;
                    }
                });
        }
        let (re, im) = (&self.re, &self.im);
        psi.par_iter_mut().enumerate().for_each(|(idx, p)| {
            let mut acc_r = re[order][idx];
            let mut acc_i = im[order][idx];
            for k in (0..order).rev() {
                acc_r = acc_r * dt + re[k][idx];
                acc_i = acc_i * dt + im[k][idx];
            }
            *p = Complex64::new(acc_r, acc_i);
        });
    }

    /// Advances `state` by `dt`. On a non-finite result the state is left
    /// untouched and [`SolverError::BlowUp`] carries the last finite field.
    pub fn step(&mut self, state: &mut SimState, dt: f64) -> Result<(), SolverError> {
        let before = state.field.clone();
        {
            let psi = state.field.values_mut();
            match self.scheme {
                Scheme::Rk4Fd4 => self.rk4_step(psi, dt),
                Scheme::Gfdtd { order } => self.taylor_step(psi, dt, order),
            }
        }
        if !state.field.is_finite() {
            let t = before.t;
            state.field = before.clone();
            return Err(SolverError::BlowUp { step: state.step_count + 1, t, last_good: Box::new(before) });
        }
        state.field.t += dt;
        state.step_count += 1;
        Ok(())
    }
}

fn axpy(out: &mut [Complex64], base: &[Complex64], a: f64, x: &[Complex64]) {
    out.par_iter_mut().zip(base.par_iter().zip(x.par_iter())).for_each(|(o, (b, x))| *o = b + x * a);
}

/// One step with a freshly built integrator.
pub fn step(state: &mut SimState, dt: f64, scheme: Scheme) -> Result<(), SolverError> {
    Integrator::new(state, scheme).step(state, dt)
}

/// Number of steps and the shortened step that land exactly on `t_end`
/// without exceeding `dt`.
pub fn plan_steps(t_end: f64, dt: f64) -> (u64, f64) {
    if t_end <= 0.0 {
        return (0, dt);
    }
    let n = ((t_end / dt) - 1e-9).ceil().max(1.0) as u64;
    (n, t_end / n as f64)
}

/// Step size [`evolve`] will use for `state` under `cfg`.
pub fn resolved_dt(state: &SimState, cfg: &SolverConfig) -> f64 {
    let requested = cfg.dt.unwrap_or_else(|| stable_dt(state.grid(), &state.params, &state.landscape, cfg.safety));
    plan_steps(cfg.t_end, requested).1
}

/// Runs `state` to `cfg.t_end`. Observers and `on_snapshot` are invoked on
/// the initial state, every `snapshot_every` steps and on the final state.
/// The step is shortened so that an integer number of steps lands exactly
/// on `t_end`.
pub fn evolve(
    state: &mut SimState,
    cfg: &SolverConfig,
    observers: &[Box<dyn Observer>],
    on_snapshot: &mut dyn FnMut(&SimState),
) -> Result<ObservableSeries, SolverError> {
    cfg.validate()?;
    let limit = stable_dt(state.grid(), &state.params, &state.landscape, 1.0);
    let requested = cfg.dt.unwrap_or_else(|| stable_dt(state.grid(), &state.params, &state.landscape, cfg.safety));
    if requested > limit && !cfg.allow_unstable_dt {
        return Err(SolverError::UnstableDt { dt: requested, limit });
    }
    let names: Vec<String> = observers.iter().map(|o| o.name()).collect();
    let mut series = ObservableSeries::new(names);
    let record = |series: &mut ObservableSeries, state: &SimState| {
        let values: Vec<f64> = observers.iter().map(|o| o.observe(&state.field)).collect();
        series.push(state.field.t, values).expect("observer count is fixed");
    };
    record(&mut series, state);
    on_snapshot(state);
    if cfg.t_end <= 0.0 {
        return Ok(series);
    }
    let (n_steps, dt) = plan_steps(cfg.t_end, requested);
    let t0 = state.field.t;
    let mut integrator = Integrator::new(state, cfg.scheme);
    for s in 1..=n_steps {
        integrator.step(state, dt)?;
        if s == n_steps {
            // land exactly on t_end regardless of accumulated rounding
            state.field.t = t0 + cfg.t_end;
        }
        if s % cfg.snapshot_every == 0 || s == n_steps {
            record(&mut series, state);
            on_snapshot(state);
        }
    }
    Ok(series)
}

/// Discrete energy `sum [psi* (-lap psi) + V |psi|^2 + (g/2) |psi|^4] dx dy`,
/// conserved when `P = gamma = eta = 0`.
pub fn energy(field: &ComplexField, params: &SimParams, landscape: &Landscape) -> f64 {
    let lap = Laplacian::new(field.grid()).apply(field.values());
    let pot = landscape.potential().values();
    let terms: Vec<f64> = field
        .values()
        .iter()
        .zip(&lap)
        .zip(pot)
        .map(|((p, l), v)| {
            let n = p.norm_sqr();
            -(p.conj() * l).re + v * n + 0.5 * params.g * n * n
        })
        .collect();
    pairwise_sum(&terms) * field.grid().cell_area()
}

/// Equilibrium-scaled vortex pair: `max(P - gamma, 0) / (sqrt(2) eta) * (u_{l,0} + u_{-l,0})`
/// at the beam waist.
pub fn seed_vortex_superposition(
    l: i32,
    grid: &GridSpec,
    landscape: &Landscape,
    params: &SimParams,
    lg: &LgParams,
) -> Result<ComplexField, SolverError> {
    if !(params.eta > 0.0) {
        return Err(SolverError::ZeroEta);
    }
    if landscape.grid() != grid {
        return Err(SolverError::GridMismatch);
    }
    lg.validate().map_err(|e| SolverError::Params(e.to_string()))?;
    let plus = lg_mode(l, 0, lg, 0.0, grid);
    let minus = lg_mode(-l, 0, lg, 0.0, grid);
    let scale = 1.0 / (SQRT_2 * params.eta);
    let values = plus
        .values()
        .iter()
        .zip(minus.values())
        .zip(landscape.pump().values())
        .map(|((a, b), p)| (a + b) * ((p - params.gamma).max(0.0) * scale))
        .collect();
    let mut field = ComplexField::new(*grid, values, 0.0).map_err(|e| SolverError::Params(e.to_string()))?;
    enforce_walls(&mut field);
    Ok(field)
}

/// `(psi_l + psi_{-l}) / sqrt(2)` on the Mexican-hat channel.
pub fn seed_ring_superposition(l: i32, v0: f64, r_min: f64, grid: &GridSpec) -> Result<ComplexField, SolverError> {
    let plus = RingWavefunction::new(l, v0, r_min).map_err(|e| SolverError::Params(e.to_string()))?;
    let minus = RingWavefunction::new(-l, v0, r_min).map_err(|e| SolverError::Params(e.to_string()))?;
    let mut field = ComplexField::from_fn(*grid, |x, y| (plus.value(x, y) + minus.value(x, y)) / SQRT_2);
    enforce_walls(&mut field);
    Ok(field)
}

/// `sum_k xi_k e^{i k x}` for wavenumbers `k` along x.
pub fn seed_momentum_mixture(xi: &[(f64, Complex64)], grid: &GridSpec) -> Result<ComplexField, SolverError> {
    if grid.boundary() != Boundary::Periodic {
        return Err(SolverError::NotPeriodic);
    }
    for &(k, _) in xi {
        if bin_of(k, grid.nx(), grid.lx()).is_none() {
            return Err(SolverError::Incommensurate(k));
        }
    }
    Ok(ComplexField::from_fn(*grid, |x, _| {
        xi.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, k * x)).sum()
    }))
}

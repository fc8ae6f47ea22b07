//! Closed-form Sagnac phases, shot-noise limits and a cross-technology
//! comparison of rotation sensors. All quantities are SI.

use crate::field::{RealField, HBAR};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use thiserror::Error;

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
pub const PLANCK: f64 = 2.0 * PI * HBAR;
/// Mass of a rubidium-87 atom in kg.
pub const RB87_MASS: f64 = 1.443_160_648e-25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetrologyError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{kind:?} needs {name}")]
    Missing { kind: GyroKind, name: &'static str },
    #[error("winding number must be at least 1")]
    ZeroWinding,
    #[error("velocity components must share one grid")]
    GridMismatch,
}

fn positive(name: &'static str, value: f64) -> Result<f64, MetrologyError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(MetrologyError::NonPositive { name, value })
    }
}

/// `8 pi A Omega / (lambda c)`.
pub fn sagnac_fiber(area: f64, lambda: f64, omega: f64) -> Result<f64, MetrologyError> {
    Ok(8.0 * PI * positive("area", area)? * omega / (positive("wavelength", lambda)? * SPEED_OF_LIGHT))
}

/// Phase per unit `Omega t` of a ring laser, `8 pi A / (lambda p)`.
pub fn ring_laser_coefficient(area: f64, perimeter: f64, lambda: f64) -> Result<f64, MetrologyError> {
    Ok(8.0 * PI * positive("area", area)? / (positive("wavelength", lambda)? * positive("perimeter", perimeter)?))
}

/// `8 pi A Omega t / (lambda p)`.
pub fn sagnac_ring_laser(area: f64, perimeter: f64, lambda: f64, omega: f64, t: f64) -> Result<f64, MetrologyError> {
    Ok(ring_laser_coefficient(area, perimeter, lambda)? * omega * t)
}

/// `2 l Omega t`, independent of the condensate area and particle mass.
pub fn sagnac_vortex(l: i32, omega: f64, t: f64) -> f64 {
    2.0 * l as f64 * omega * t
}

/// Revolutions completed in time `t` by a particle of momentum `hbar k0` on a
/// ring of radius `r`: `t hbar k0 / (2 pi r m)`.
pub fn revolutions(t: f64, k0: f64, r: f64, m: f64) -> Result<f64, MetrologyError> {
    Ok(t * HBAR * positive("k0", k0)? / (2.0 * PI * positive("radius", r)? * positive("mass", m)?))
}

/// `n_rev 4 m A Omega / hbar`.
pub fn bec_loop_phase(n_rev: f64, m: f64, area: f64, omega: f64) -> Result<f64, MetrologyError> {
    Ok(n_rev * 4.0 * positive("mass", m)? * positive("area", area)? * omega / HBAR)
}

/// `2 k0 r Omega t`.
pub fn sagnac_ring_bec(k0: f64, r: f64, omega: f64, t: f64) -> Result<f64, MetrologyError> {
    Ok(2.0 * positive("k0", k0)? * positive("radius", r)? * omega * t)
}

/// `phi sqrt(N_rate t)`: the phase over its shot-noise floor `1/sqrt(N)`
/// with `N = N_rate t` detected particles.
pub fn snr(phi: f64, n_rate: f64, t: f64) -> f64 {
    phi * (n_rate * t).sqrt()
}

/// de Broglie wavelength `h / (m v)`.
pub fn de_broglie_wavelength(m: f64, v: f64) -> Result<f64, MetrologyError> {
    Ok(PLANCK / (positive("mass", m)? * positive("velocity", v)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GyroKind {
    FiberOptic,
    RingLaser,
    VortexSuperposition,
    BecLoop,
    RingBec,
}

/// One rotation sensor. Only the fields its kind uses need to be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GyroConfig {
    pub kind: GyroKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perimeter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    /// Integration time in s.
    pub t: f64,
    /// Detected particles per second.
    pub photon_rate: f64,
}

impl GyroConfig {
    pub fn new(kind: GyroKind, t: f64, photon_rate: f64) -> Self {
        Self {
            kind,
            label: None,
            area: None,
            perimeter: None,
            radius: None,
            wavelength: None,
            k0: None,
            l: None,
            mass: None,
            t,
            photon_rate,
        }
    }

    fn need(&self, value: Option<f64>, name: &'static str) -> Result<f64, MetrologyError> {
        positive(name, value.ok_or(MetrologyError::Missing { kind: self.kind, name })?)
    }

    /// Wavenumber from `k0`, or from `wavelength` when `k0` is unset.
    fn wavenumber(&self) -> Result<f64, MetrologyError> {
        match (self.k0, self.wavelength) {
            (Some(k0), _) => positive("k0", k0),
            (None, Some(lambda)) => Ok(2.0 * PI / positive("wavelength", lambda)?),
            (None, None) => Err(MetrologyError::Missing { kind: self.kind, name: "k0 or wavelength" }),
        }
    }

    fn wavelength(&self) -> Result<f64, MetrologyError> {
        match (self.wavelength, self.k0) {
            (Some(lambda), _) => positive("wavelength", lambda),
            (None, Some(k0)) => Ok(2.0 * PI / positive("k0", k0)?),
            (None, None) => Err(MetrologyError::Missing { kind: self.kind, name: "wavelength or k0" }),
        }
    }

    pub fn validate(&self) -> Result<(), MetrologyError> {
        positive("t", self.t)?;
        positive("photon_rate", self.photon_rate)?;
        self.phase_coefficient().map(|_| ())
    }

    /// Sagnac phase per unit rotation rate times time, except for the fiber
    /// interferometer whose phase does not accumulate: there it is the phase
    /// per unit rotation rate.
    pub fn phase_coefficient(&self) -> Result<f64, MetrologyError> {
        match self.kind {
            GyroKind::FiberOptic => sagnac_fiber(self.need(self.area, "area")?, self.wavelength()?, 1.0),
            GyroKind::RingLaser => ring_laser_coefficient(
                self.need(self.area, "area")?,
                self.need(self.perimeter, "perimeter")?,
                self.wavelength()?,
            ),
            GyroKind::VortexSuperposition => match self.l {
                Some(l) if l >= 1 => Ok(sagnac_vortex(l, 1.0, 1.0)),
                Some(_) => Err(MetrologyError::ZeroWinding),
                None => Err(MetrologyError::Missing { kind: self.kind, name: "l" }),
            },
            GyroKind::BecLoop => {
                // a loop of perimeter p is traversed like a circle of radius p / 2 pi
                let area = self.need(self.area, "area")?;
                let radius = self.need(self.perimeter, "perimeter")? / (2.0 * PI);
                let mass = self.need(self.mass, "mass")?;
                bec_loop_phase(revolutions(1.0, self.wavenumber()?, radius, mass)?, mass, area, 1.0)
            }
            GyroKind::RingBec => sagnac_ring_bec(self.wavenumber()?, self.need(self.radius, "radius")?, 1.0, 1.0),
        }
    }

    /// Sagnac phase at rotation rate `omega` after this sensor's time `t`.
    pub fn phase(&self, omega: f64) -> Result<f64, MetrologyError> {
        let c = self.phase_coefficient()?;
        Ok(match self.kind {
            GyroKind::FiberOptic => c * omega,
            _ => c * omega * self.t,
        })
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| format!("{:?}", self.kind))
    }
}

/// Rotation rate at which the SNR reaches 1 after time `t` with `n_total`
/// detected particles: `1 / (coefficient t sqrt(N))`, or
/// `1 / (coefficient sqrt(N))` for the fiber interferometer.
pub fn omega_min(cfg: &GyroConfig, t: f64, n_total: f64) -> Result<f64, MetrologyError> {
    let c = cfg.phase_coefficient()?;
    let root_n = positive("particle count", n_total)?.sqrt();
    Ok(match cfg.kind {
        GyroKind::FiberOptic => 1.0 / (c * root_n),
        _ => 1.0 / (c * positive("t", t)? * root_n),
    })
}

/// `Omega_z = (d v_y / dx - d v_x / dy) / 2`, with 4th-order centred
/// differences. Periodic grids wrap; otherwise the two outermost samples per
/// side fall back to 2nd-order centred and one-sided differences.
pub fn ground_rotation(vx: &RealField, vy: &RealField) -> Result<RealField, MetrologyError> {
    let grid = *vx.grid();
    if vy.grid() != &grid {
        return Err(MetrologyError::GridMismatch);
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let periodic = grid.boundary() == crate::field::Boundary::Periodic;
    let derivative = |get: &dyn Fn(usize) -> f64, k: usize, n: usize, h: f64| -> f64 {
        if periodic {
            let at = |o: isize| get((k as isize + o).rem_euclid(n as isize) as usize);
            return (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h);
        }
        if k >= 2 && k + 2 < n {
            (8.0 * (get(k + 1) - get(k - 1)) - (get(k + 2) - get(k - 2))) / (12.0 * h)
        } else if k == 0 {
            (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h)
        } else if k == n - 1 {
            (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * h)
        } else {
            (get(k + 1) - get(k - 1)) / (2.0 * h)
        }
    };
    let mut out = RealField::zeros(grid);
    for j in 0..ny {
        for i in 0..nx {
            let dvy_dx = derivative(&|m| vy.at(m, j), i, nx, grid.dx());
            let dvx_dy = derivative(&|m| vx.at(i, m), j, ny, grid.dy());
            out.values_mut()[grid.index(i, j)] = 0.5 * (dvy_dx - dvx_dy);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub kind: GyroKind,
    pub coefficient: f64,
    pub t: f64,
    pub photon_rate: f64,
    /// At `N = photon_rate * t`.
    pub omega_min: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

pub fn comparison_table(configs: &[GyroConfig]) -> Result<ComparisonTable, MetrologyError> {
    let rows = configs
        .iter()
        .map(|c| {
            c.validate()?;
            Ok(ComparisonRow {
                label: c.label(),
                kind: c.kind,
                coefficient: c.phase_coefficient()?,
                t: c.t,
                photon_rate: c.photon_rate,
                omega_min: omega_min(c, c.t, c.photon_rate * c.t)?,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(ComparisonTable { rows })
}

impl ComparisonTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,kind,coefficient,t_s,rate_per_s,omega_min_rad_per_s\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:?},{:e},{},{:e},{:e}", r.label, r.kind, r.coefficient, r.t, r.photon_rate, r.omega_min);
        }
        out
    }

    /// Aligned plain-text rendering. The last column is the raw shot-noise
    /// limit at the stated `t`; at `t = 1 s` it reads as rad/s/sqrt(Hz).
    pub fn to_text(&self) -> String {
        let header = ["sensor", "coefficient", "t [s]", "rate [1/s]", "omega_min [rad/s]"];
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.label.clone(),
                    format!("{:.3e}", r.coefficient),
                    format!("{}", r.t),
                    format!("{:.1e}", r.photon_rate),
                    format!("{:.3e}", r.omega_min),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cols: [&str; 5]| {
            let parts: Vec<String> = cols.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, header);
        for row in &cells {
            line(&mut out, [&row[0], &row[1], &row[2], &row[3], &row[4]]);
        }
        out
    }
}

/// Reference sensors: a 1 m^2 He-Ne ring laser, a cold-atom loop of
/// rubidium at 1 m/s, a polariton ring with `k0 = 10 / um` and
/// `r = 100 um`, and an `l = 1` vortex superposition; all at `t = 1 s` and
/// `1e14` detections per second.
pub fn reference_configs() -> Vec<GyroConfig> {
    let mut laser = GyroConfig::new(GyroKind::RingLaser, 1.0, 1e14);
    laser.label = Some("ring laser".into());
    laser.area = Some(1.0);
    laser.perimeter = Some(1.0);
    laser.wavelength = Some(633e-9);

    let mut atoms = GyroConfig::new(GyroKind::BecLoop, 1.0, 1e14);
    atoms.label = Some("cold-atom loop".into());
    atoms.area = Some(1e-6);
    atoms.perimeter = Some(1e-2);
    atoms.mass = Some(RB87_MASS);
    atoms.wavelength = Some(de_broglie_wavelength(RB87_MASS, 1.0).expect("positive inputs"));

    let mut ring = GyroConfig::new(GyroKind::RingBec, 1.0, 1e14);
    ring.label = Some("polariton ring".into());
    ring.k0 = Some(1e7);
    ring.radius = Some(1e-4);

    let mut vortex = GyroConfig::new(GyroKind::VortexSuperposition, 1.0, 1e14);
    vortex.label = Some("polariton vortex l=1".into());
    vortex.l = Some(1);

    vec![laser, atoms, ring, vortex]
}

//! Binary PGM (P5) heatmaps.
//!
//! Density maps scale linearly from 0 (black) to the field maximum (white).
//! Phase maps send (-pi, pi] linearly onto 0..=255. Image row 0 is the
//! largest y, so the picture has the usual orientation.

use polgyro_core::field::{principal_arg, ComplexField};
use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

fn flipped(field: &ComplexField, f: impl Fn(f64, f64) -> u8) -> Vec<u8> {
    let grid = field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut px = Vec::with_capacity(nx * ny);
    for j in (0..ny).rev() {
        for i in 0..nx {
            let v = field.at(i, j);
            px.push(f(v.norm_sqr(), principal_arg(v)));
        }
    }
    px
}

pub fn density_pixels(field: &ComplexField) -> Vec<u8> {
    let max = field.peak_density();
    flipped(field, |n, _| if max > 0.0 { (255.0 * n / max).round() as u8 } else { 0 })
}

pub fn phase_pixels(field: &ComplexField) -> Vec<u8> {
    flipped(field, |_, phi| (255.0 * (phi + PI) / (2.0 * PI)).round().clamp(0.0, 255.0) as u8)
}

fn save(path: &Path, field: &ComplexField, pixels: Vec<u8>) -> io::Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_pgm(grid.nx(), grid.ny(), &pixels))?;
    w.flush()
}

pub fn save_density(path: &Path, field: &ComplexField) -> io::Result<()> {
    save(path, field, density_pixels(field))
}

pub fn save_phase(path: &Path, field: &ComplexField) -> io::Result<()> {
    save(path, field, phase_pixels(field))
}

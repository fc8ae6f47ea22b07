//! PGYR binary snapshots.
//!
//! Layout, all little-endian: `b"PGYR"`, `u32` version (1), `u32` nx,
//! `u32` ny, `f64` dx, `f64` dy, `f64` t, `u8` boundary (0 periodic,
//! 1 Dirichlet), then `nx*ny` interleaved `(re, im)` `f64` pairs in row-major
//! order.

use crate::field::{Boundary, ComplexField, FieldError, GridSpec};
use num_complex::Complex64;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"PGYR";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8 + 8 + 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot version {0}")]
    BadVersion(u32),
    #[error("unknown boundary code {0}")]
    BadBoundary(u8),
    #[error("invalid grid in header: {0}")]
    Grid(#[from] FieldError),
}

pub fn encode(field: &ComplexField) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.ny() as u32).to_le_bytes());
    out.extend_from_slice(&grid.dx().to_le_bytes());
    out.extend_from_slice(&grid.dy().to_le_bytes());
    out.extend_from_slice(&field.t.to_le_bytes());
    out.push(grid.boundary().code());
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn write_to<W: Write>(field: &ComplexField, mut w: W) -> io::Result<()> {
    w.write_all(&encode(field))
}

pub fn save(field: &ComplexField, path: impl AsRef<Path>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_to(field, &mut w)?;
    w.flush()
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads one snapshot. The grid extents are rebuilt as `n * d`.
pub fn read_from<R: Read>(mut r: R) -> Result<ComplexField, SnapshotError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SnapshotError::BadMagic(magic));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(SnapshotError::BadVersion(version));
    }
    let nx = read_u32(&mut r)? as usize;
    let ny = read_u32(&mut r)? as usize;
    let dx = read_f64(&mut r)?;
    let dy = read_f64(&mut r)?;
    let t = read_f64(&mut r)?;
    let mut code = [0u8; 1];
    r.read_exact(&mut code)?;
    let boundary = Boundary::from_code(code[0]).ok_or(SnapshotError::BadBoundary(code[0]))?;
    let grid = GridSpec::new(nx, ny, nx as f64 * dx, ny as f64 * dy, boundary)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        values.push(Complex64::new(re, im));
    }
    Ok(ComplexField::new(grid, values, t)?)
}

pub fn load(path: impl AsRef<Path>) -> Result<ComplexField, SnapshotError> {
    read_from(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout_is_exact() {
        let grid = GridSpec::new(8, 9, 4.0, 4.5, Boundary::DirichletZero).unwrap();
        let mut f = ComplexField::from_fn(grid, |x, y| Complex64::new(x, -y));
        f.t = 2.5;
        let bytes = encode(&f);
        assert_eq!(bytes.len(), HEADER_LEN + 16 * 72);
        assert_eq!(&bytes[0..4], b"PGYR");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[8, 0, 0, 0]);
        assert_eq!(&bytes[12..16], &[9, 0, 0, 0]);
        assert_eq!(&bytes[16..24], &0.5f64.to_le_bytes());
        assert_eq!(&bytes[24..32], &0.5f64.to_le_bytes());
        assert_eq!(&bytes[32..40], &2.5f64.to_le_bytes());
        assert_eq!(bytes[40], 1);
        // first sample: (x0, -y0) = (-2, 2.25)
        assert_eq!(&bytes[41..49], &(-2.0f64).to_le_bytes());
        assert_eq!(&bytes[49..57], &2.25f64.to_le_bytes());
    }

    #[test]
    fn rejects_corrupt_headers() {
        let grid = GridSpec::new(8, 8, 1.0, 1.0, Boundary::Periodic).unwrap();
        let good = encode(&ComplexField::zeros(grid));
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(read_from(&bad[..]), Err(SnapshotError::BadMagic(_))));
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(read_from(&bad[..]), Err(SnapshotError::BadVersion(2))));
        let mut bad = good.clone();
        bad[40] = 9;
        assert!(matches!(read_from(&bad[..]), Err(SnapshotError::BadBoundary(9))));
        assert!(matches!(read_from(&good[..good.len() - 1]), Err(SnapshotError::Io(_))));
    }

    proptest! {
        #[test]
        fn round_trip_is_bitwise(nx in 8usize..20, ny in 8usize..20, t in -1e6f64..1e6, s in -5.0f64..5.0) {
            let grid = GridSpec::new(nx, ny, nx as f64 * 0.25, ny as f64 * 0.5, Boundary::Periodic).unwrap();
            let mut f = ComplexField::from_fn(grid, |x, y| Complex64::new((x * s).sin(), y * s));
            f.t = t;
            let back = read_from(&encode(&f)[..]).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}

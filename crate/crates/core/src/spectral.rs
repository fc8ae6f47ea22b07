//! 2D discrete Fourier transforms on row-major grids.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use std::f64::consts::PI;

/// In-place unnormalised 2D DFT of `data` laid out as `ny` rows of `nx`.
pub fn fft2(data: &mut [Complex64], nx: usize, ny: usize, direction: FftDirection) {
    assert_eq!(data.len(), nx * ny);
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(nx, direction);
    for row in data.chunks_exact_mut(nx) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft(ny, direction);
    let mut column = vec![Complex64::new(0.0, 0.0); ny];
    for i in 0..nx {
        for (j, c) in column.iter_mut().enumerate() {
            *c = data[j * nx + i];
        }
        col_fft.process(&mut column);
        for (j, c) in column.iter().enumerate() {
            data[j * nx + i] = *c;
        }
    }
}

/// Angular wavenumber of DFT bin `m` for `n` samples spanning length `l`.
pub fn wavenumber(m: usize, n: usize, l: f64) -> f64 {
    let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
    2.0 * PI * signed / l
}

/// DFT bin holding wavenumber `k`, if `k * l / 2pi` is an integer (to 1e-6).
pub fn bin_of(k: f64, n: usize, l: f64) -> Option<usize> {
    let m = k * l / (2.0 * PI);
    let rounded = m.round();
    if (m - rounded).abs() > 1e-6 || rounded.abs() > (n / 2) as f64 {
        return None;
    }
    Some((rounded as i64).rem_euclid(n as i64) as usize)
}

//! Multi-dimensional complex FFTs over the row-major grid layout.
//!
//! Forward transforms are normalized by `1/N^dim`, so a coefficient is the
//! grid average of `f(x)·e^{-iξ·x}` and a constant field maps to itself in
//! the zero mode.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::GridSpec;

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, direction: FftDirection) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let key = (n, direction == FftDirection::Inverse);
    let mut cache = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner());
    cache
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

fn transform(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.points_per_axis;
    debug_assert_eq!(data.len(), grid.len());
    let fft = plan(n, direction);
    let scratch_len = fft.get_inplace_scratch_len();
    for axis in 0..grid.dim {
        let stride = n.pow((grid.dim - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(n * 64.min(grid.len() / n)).for_each_init(
                || vec![Complex64::default(); scratch_len],
                |scratch, lines| fft.process_with_scratch(lines, scratch),
            );
            continue;
        }
        // Each block of n*stride values holds `stride` interleaved lines; transpose
        // them into contiguous rows, transform, and scatter back.
        data.par_chunks_mut(n * stride).for_each_init(
            || {
                (
                    vec![Complex64::default(); n * stride],
                    vec![Complex64::default(); scratch_len],
                )
            },
            |(buf, scratch), block| {
                for m in 0..n {
                    let row = &block[m * stride..(m + 1) * stride];
                    for (j, v) in row.iter().enumerate() {
                        buf[j * n + m] = *v;
                    }
                }
                fft.process_with_scratch(buf, scratch);
                for m in 0..n {
                    let row = &mut block[m * stride..(m + 1) * stride];
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = buf[j * n + m];
                    }
                }
            },
        );
    }
}

/// In-place forward transform with `1/N^dim` normalization.
pub fn forward(grid: &GridSpec, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
}

/// In-place inverse transform (synthesis, no scaling).
pub fn inverse(grid: &GridSpec, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Inverse);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(grid: &GridSpec, data: &[Complex64]) -> Vec<Complex64> {
        let n = grid.points_per_axis;
        let mut out = vec![Complex64::default(); data.len()];
        let mut points = Vec::new();
        grid.for_each_point(|_, x| points.push(x));
        grid.for_each_mode(|flat, _, k| {
            let mut acc = Complex64::default();
            for (p, x) in points.iter().enumerate() {
                let phase: f64 = (0..grid.dim)
                    .map(|a| k[a] as f64 * x[a] / grid.half_period)
                    .sum();
                acc += data[p] * Complex64::from_polar(1.0, -phase);
            }
            out[flat] = acc / (n.pow(grid.dim as u32) as f64);
        });
        out
    }

    #[test]
    fn matches_direct_sum_in_3d() {
        let grid = GridSpec::new(3, 1.5, 6).unwrap();
        let data: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        forward(&grid, &mut fast);
        let slow = naive_dft(&grid, &data);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
        inverse(&grid, &mut fast);
        for (a, b) in fast.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

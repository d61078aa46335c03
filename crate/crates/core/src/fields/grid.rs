use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

fn default_dealias() -> f64 {
    2.0 / 3.0
}

/// Uniform periodic discretization of the box `[0, 2πL)^dim`.
///
/// Wavenumbers along each axis are `k/L` with integer `k ∈ {-N/2+1, …, N/2}`.
/// Arrays are stored row-major with axis 0 (the `x₁` direction) slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_period: f64,
    pub points_per_axis: usize,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(dim: usize, half_period: f64, points_per_axis: usize) -> Result<Self> {
        let grid = Self {
            dim,
            half_period,
            points_per_axis,
            dealias_fraction: default_dealias(),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_dealias(mut self, fraction: f64) -> Result<Self> {
        self.dealias_fraction = fraction;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) {
            return Err(Error::InvalidGrid(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        let n = self.points_per_axis;
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 4, got {n}"
            )));
        }
        if !(self.half_period.is_finite() && self.half_period > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half period must be positive, got {}",
                self.half_period
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    /// Total number of grid points, `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn box_length(&self) -> f64 {
        2.0 * PI * self.half_period
    }

    pub fn spacing(&self) -> f64 {
        self.box_length() / self.points_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length().powi(self.dim as i32)
    }

    /// Geometric center of the box; unused trailing entries are zero.
    pub fn center(&self) -> [f64; 3] {
        let c = PI * self.half_period;
        let mut out = [0.0; 3];
        out[..self.dim].fill(c);
        out
    }

    /// Largest retained integer mode index under the dealiasing rule.
    pub fn dealias_cutoff(&self) -> usize {
        (self.dealias_fraction * (self.points_per_axis / 2) as f64).floor() as usize
    }

    /// Signed integer mode index for storage index `i`.
    pub fn mode_index(&self, i: usize) -> i64 {
        let n = self.points_per_axis;
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        self.mode_index(i) as f64 / self.half_period
    }

    /// Wavenumber used by derivative multipliers: the Nyquist index maps to zero.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.points_per_axis / 2 {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Storage index of the integer mode `k` (`-N/2 < k <= N/2`).
    pub fn storage_index(&self, k: i64) -> usize {
        let n = self.points_per_axis as i64;
        k.rem_euclid(n) as usize
    }

    /// Flat offset of a multi-index; unused trailing entries are ignored.
    pub fn flat(&self, idx: [usize; 3]) -> usize {
        let n = self.points_per_axis;
        idx[..self.dim].iter().fold(0, |acc, &i| acc * n + i)
    }

    /// Visits every grid point with its flat offset and physical coordinates.
    pub fn for_each_point(&self, mut visit: impl FnMut(usize, [f64; 3])) {
        let h = self.spacing();
        let n = self.points_per_axis;
        let mut flat = 0;
        if self.dim == 2 {
            for i in 0..n {
                for j in 0..n {
                    visit(flat, [i as f64 * h, j as f64 * h, 0.0]);
                    flat += 1;
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        visit(flat, [i as f64 * h, j as f64 * h, k as f64 * h]);
                        flat += 1;
                    }
                }
            }
        }
    }

    /// Visits every Fourier mode with its flat offset, derivative wavenumber
    /// vector and integer mode indices.
    pub fn for_each_mode(&self, mut visit: impl FnMut(usize, [f64; 3], [i64; 3])) {
        let n = self.points_per_axis;
        let xi: Vec<f64> = (0..n).map(|i| self.derivative_wavenumber(i)).collect();
        let ks: Vec<i64> = (0..n).map(|i| self.mode_index(i)).collect();
        let mut flat = 0;
        if self.dim == 2 {
            for i in 0..n {
                for j in 0..n {
                    visit(flat, [xi[i], xi[j], 0.0], [ks[i], ks[j], 0]);
                    flat += 1;
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        visit(flat, [xi[i], xi[j], xi[k]], [ks[i], ks[j], ks[k]]);
                        flat += 1;
                    }
                }
            }
        }
    }

    /// True when every integer index of the mode lies within the dealiasing cutoff.
    pub fn is_retained(&self, k: [i64; 3]) -> bool {
        let cut = self.dealias_cutoff() as i64;
        k[..self.dim].iter().all(|&ki| ki.abs() <= cut)
    }

    pub(crate) fn same_as(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_layout() {
        let g = GridSpec::new(2, 2.0, 8).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.mode_index(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.wavenumber(1), 0.5);
        assert_eq!(g.derivative_wavenumber(4), 0.0);
        assert_eq!(g.storage_index(-3), 5);
        assert_eq!(g.len(), 64);
    }

    #[test]
    fn dealias_cutoff_rounds_down() {
        let g = GridSpec::new(3, 1.0, 32).unwrap();
        assert_eq!(g.dealias_cutoff(), 10);
        let g = g.with_dealias(1.0).unwrap();
        assert_eq!(g.dealias_cutoff(), 16);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, 1.0, 8).is_err());
        assert!(GridSpec::new(2, 1.0, 7).is_err());
        assert!(GridSpec::new(2, -1.0, 8).is_err());
        assert!(GridSpec::new(2, 1.0, 8).unwrap().with_dealias(0.0).is_err());
    }
}

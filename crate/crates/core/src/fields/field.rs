use num_complex::Complex64;

use super::{fft, GridSpec};
use crate::error::{Error, Result};

/// Read access shared by physical-space fields, used by the norm routines.
pub trait PhysicalField {
    fn grid(&self) -> &GridSpec;
    fn component_slices(&self) -> Vec<&[f64]>;
}

/// Real scalar field sampled on the grid (pressures).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        grid.for_each_point(|i, x| values[i] = f(x));
        Self { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn to_spectral(&self) -> SpectralField {
        SpectralField::from_real(&self.grid, std::slice::from_ref(&self.values))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

impl PhysicalField for ScalarField {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn component_slices(&self) -> Vec<&[f64]> {
        vec![&self.values]
    }
}

/// Real vector field; one array per component, all on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: GridSpec,
    pub components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::zeros_with(grid, grid.dim)
    }

    pub fn zeros_with(grid: GridSpec, count: usize) -> Self {
        Self {
            components: vec![vec![0.0; grid.len()]; count],
            grid,
        }
    }

    /// Samples `f(x)`; only the first `dim` entries of the returned array are kept.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        grid.for_each_point(|i, x| {
            let v = f(x);
            for (c, comp) in out.components.iter_mut().enumerate() {
                comp[i] = v[c];
            }
        });
        out
    }

    pub fn from_components(grid: GridSpec, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ComponentMismatch {
                expected: grid.dim,
                found: 0,
            });
        }
        if components.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid("component length does not match grid".into()));
        }
        Ok(Self { grid, components })
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn to_spectral(&self) -> SpectralField {
        SpectralField::from_real(&self.grid, &self.components)
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        if self.count() != other.count() {
            return Err(Error::ComponentMismatch {
                expected: self.count(),
                found: other.count(),
            });
        }
        Ok(Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl PhysicalField for VectorField {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn component_slices(&self) -> Vec<&[f64]> {
        self.components.iter().map(|c| c.as_slice()).collect()
    }
}

/// Fourier coefficients, one complex block per component, in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub components: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, count: usize) -> Self {
        Self {
            components: vec![vec![Complex64::default(); grid.len()]; count],
            grid,
        }
    }

    pub fn from_real(grid: &GridSpec, components: &[Vec<f64>]) -> Self {
        let components = components
            .iter()
            .map(|c| {
                let mut data: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fft::forward(grid, &mut data);
                data
            })
            .collect();
        Self {
            grid: *grid,
            components,
        }
    }

    /// Transforms a complex physical-space field (e.g. one time mode).
    pub fn from_complex_physical(grid: &GridSpec, mut components: Vec<Vec<Complex64>>) -> Self {
        for c in &mut components {
            fft::forward(grid, c);
        }
        Self {
            grid: *grid,
            components,
        }
    }

    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Inverse transform keeping the real part.
    pub fn to_physical(&self) -> VectorField {
        VectorField {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| {
                    let mut data = c.clone();
                    fft::inverse(&self.grid, &mut data);
                    data.into_iter().map(|z| z.re).collect()
                })
                .collect(),
        }
    }

    pub fn to_complex_physical(&self) -> Vec<Vec<Complex64>> {
        self.components
            .iter()
            .map(|c| {
                let mut data = c.clone();
                fft::inverse(&self.grid, &mut data);
                data
            })
            .collect()
    }

    pub fn to_scalar(&self) -> Result<ScalarField> {
        if self.count() != 1 {
            return Err(Error::ComponentMismatch {
                expected: 1,
                found: self.count(),
            });
        }
        let mut v = self.to_physical();
        Ok(ScalarField {
            grid: self.grid,
            values: v.components.pop().unwrap_or_default(),
        })
    }

    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: vec![self.components[c].clone()],
        }
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        self.map(|z| a * z)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|&z| f(z)).collect())
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Spectrum of the complex conjugate in physical space: `c'(ξ) = conj(c(-ξ))`.
    pub fn conj_physical(&self) -> Self {
        let mirror = Self::mirror_table(&self.grid);
        Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| mirror.iter().map(|&j| c[j].conj()).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_shape(other)?;
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        Ok(())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: Complex64, other: &Self) -> Result<()> {
        self.check_shape(other)?;
        for (x, y) in self.components.iter_mut().zip(&other.components) {
            x.iter_mut().zip(y).for_each(|(p, q)| *p += a * q);
        }
        Ok(())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        if self.count() != other.count() {
            return Err(Error::ComponentMismatch {
                expected: self.count(),
                found: other.count(),
            });
        }
        Ok(())
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        })
    }

    /// Coefficient at the integer mode `k` of component `c`.
    pub fn coefficient(&self, c: usize, k: [i64; 3]) -> Complex64 {
        let mut idx = [0usize; 3];
        for a in 0..self.grid.dim {
            idx[a] = self.grid.storage_index(k[a]);
        }
        self.components[c][self.grid.flat(idx)]
    }

    /// Flat offset of the mode `-k` for the mode stored at `flat`.
    pub(crate) fn mirror_table(grid: &GridSpec) -> Vec<usize> {
        let mut table = vec![0; grid.len()];
        grid.for_each_mode(|flat, _, k| {
            let mut idx = [0usize; 3];
            for a in 0..grid.dim {
                idx[a] = grid.storage_index(-k[a]);
            }
            table[flat] = grid.flat(idx);
        });
        table
    }

    /// Largest violation of `c(-ξ) = conj(c(ξ))` over all components.
    pub fn hermitian_defect(&self) -> f64 {
        let mirror = Self::mirror_table(&self.grid);
        self.components
            .iter()
            .flat_map(|c| {
                mirror
                    .iter()
                    .enumerate()
                    .map(move |(i, &j)| (c[j] - c[i].conj()).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Sum of `|c|²` over all modes and components.
    pub fn energy(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

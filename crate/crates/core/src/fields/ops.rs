//! Spectral differentiation, truncation and dealiased products.

use num_complex::Complex64;

use super::{GridSpec, PhysicalField, ScalarField, SpectralField, VectorField};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_axis(grid: &GridSpec, axis: usize) -> Result<()> {
    if axis >= grid.dim {
        return Err(Error::InvalidAxis {
            axis,
            dim: grid.dim,
        });
    }
    Ok(())
}

/// Multiplies every coefficient by `m(ξ̃, k)`, where `ξ̃` is the derivative wavenumber.
pub fn apply_multiplier(
    field: &SpectralField,
    m: impl Fn([f64; 3], [i64; 3]) -> Complex64,
) -> SpectralField {
    let mut table = vec![Complex64::default(); field.grid.len()];
    field.grid.for_each_mode(|flat, xi, k| table[flat] = m(xi, k));
    SpectralField {
        grid: field.grid,
        components: field
            .components
            .iter()
            .map(|c| c.iter().zip(&table).map(|(z, w)| z * w).collect())
            .collect(),
    }
}

/// `∂/∂x_axis` (zero-based axis); the Nyquist mode is annihilated.
pub fn spectral_derivative(field: &SpectralField, axis: usize) -> Result<SpectralField> {
    check_axis(&field.grid, axis)?;
    Ok(apply_multiplier(field, |xi, _| I * xi[axis]))
}

/// Mixed derivative `D^α` for a multi-index given as per-axis orders.
pub fn derivative_multi(field: &SpectralField, alpha: [u32; 3]) -> Result<SpectralField> {
    for (axis, &a) in alpha.iter().enumerate() {
        if a > 0 {
            check_axis(&field.grid, axis)?;
        }
    }
    Ok(apply_multiplier(field, |xi, _| {
        let mut z = Complex64::new(1.0, 0.0);
        for axis in 0..3 {
            for _ in 0..alpha[axis] {
                z *= I * xi[axis];
            }
        }
        z
    }))
}

/// All multi-indices of total order `k` in `dim` dimensions, lexicographic.
pub fn multi_indices(dim: usize, k: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            let c = k - a - b;
            if dim == 2 && c != 0 {
                continue;
            }
            out.push([a, b, c]);
        }
    }
    out.reverse();
    out
}

pub fn laplacian(field: &SpectralField) -> SpectralField {
    apply_multiplier(field, |xi, _| {
        Complex64::new(-(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]), 0.0)
    })
}

/// Divergence of a vector field with `dim` components.
pub fn divergence(field: &SpectralField) -> Result<SpectralField> {
    let dim = field.grid.dim;
    if field.count() != dim {
        return Err(Error::ComponentMismatch {
            expected: dim,
            found: field.count(),
        });
    }
    let mut out = SpectralField::zeros(field.grid, 1);
    let grid = field.grid;
    grid.for_each_mode(|flat, xi, _| {
        let mut acc = Complex64::default();
        for a in 0..dim {
            acc += I * xi[a] * field.components[a][flat];
        }
        out.components[0][flat] = acc;
    });
    Ok(out)
}

/// Gradient of a scalar (one-component) field.
pub fn gradient(field: &SpectralField) -> Result<SpectralField> {
    if field.count() != 1 {
        return Err(Error::ComponentMismatch {
            expected: 1,
            found: field.count(),
        });
    }
    let dim = field.grid.dim;
    let mut out = SpectralField::zeros(field.grid, dim);
    let src = &field.components[0];
    field.grid.for_each_mode(|flat, xi, _| {
        for a in 0..dim {
            out.components[a][flat] = I * xi[a] * src[flat];
        }
    });
    Ok(out)
}

/// Zeroes every mode outside the dealiasing cube.
pub fn truncate(field: &SpectralField) -> SpectralField {
    let grid = field.grid;
    apply_multiplier(field, |_, k| {
        if grid.is_retained(k) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        }
    })
}

pub(crate) fn truncate_in_place(field: &mut SpectralField) {
    let grid = field.grid;
    let mut keep = vec![false; grid.len()];
    grid.for_each_mode(|flat, _, k| keep[flat] = grid.is_retained(k));
    for c in &mut field.components {
        for (z, &kp) in c.iter_mut().zip(&keep) {
            if !kp {
                *z = Complex64::default();
            }
        }
    }
}

/// Componentwise product of dealias-truncated inputs, truncated again.
///
/// A one-component input broadcasts against every component of the other.
pub fn dealiased_product_spectral(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.grid.same_as(&b.grid)?;
    let (na, nb) = (a.count(), b.count());
    if na != nb && na != 1 && nb != 1 {
        return Err(Error::ComponentMismatch {
            expected: na,
            found: nb,
        });
    }
    let pa = truncate(a).to_physical();
    let pb = truncate(b).to_physical();
    let count = na.max(nb);
    let comps: Vec<Vec<f64>> = (0..count)
        .map(|c| {
            let x = &pa.components[if na == 1 { 0 } else { c }];
            let y = &pb.components[if nb == 1 { 0 } else { c }];
            x.iter().zip(y).map(|(p, q)| p * q).collect()
        })
        .collect();
    let mut out = SpectralField::from_real(&a.grid, &comps);
    truncate_in_place(&mut out);
    Ok(out)
}

/// Physical-space dealiased product of two vector fields (or broadcast scalar).
pub fn dealiased_product(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    Ok(dealiased_product_spectral(&a.to_spectral(), &b.to_spectral())?.to_physical())
}

pub fn dealiased_product_scalar(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    dealiased_product_spectral(&a.to_spectral(), &b.to_spectral())?.to_scalar()
}

/// Convective term `(a·∇)b` with dealiasing, both fields given spectrally.
pub fn convective(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.grid.same_as(&b.grid)?;
    check_vector(a)?;
    check_vector(b)?;
    let pa = truncate(a).to_physical();
    let grads = truncated_gradient(b)?;
    Ok(combine_convective(&pa, &grads))
}

fn check_vector(f: &SpectralField) -> Result<()> {
    if f.count() != f.grid.dim {
        return Err(Error::ComponentMismatch {
            expected: f.grid.dim,
            found: f.count(),
        });
    }
    Ok(())
}

fn truncated_gradient(b: &SpectralField) -> Result<Vec<VectorField>> {
    (0..b.grid.dim)
        .map(|j| spectral_derivative(b, j).map(|d| truncate(&d).to_physical()))
        .collect()
}

fn combine_convective(pa: &VectorField, grads: &[VectorField]) -> SpectralField {
    let len = pa.grid.len();
    let comps: Vec<Vec<f64>> = (0..pa.grid.dim)
        .map(|i| {
            let mut acc = vec![0.0; len];
            for (j, g) in grads.iter().enumerate() {
                let aj = &pa.components[j];
                let dbi = &g.components[i];
                for p in 0..len {
                    acc[p] += aj[p] * dbi[p];
                }
            }
            acc
        })
        .collect();
    let mut out = SpectralField::from_real(&pa.grid, &comps);
    truncate_in_place(&mut out);
    out
}

/// Truncated physical values and gradient of one field, for repeated products.
#[derive(Debug, Clone)]
pub struct ConvectiveFactors {
    values: VectorField,
    gradient: Vec<VectorField>,
}

impl ConvectiveFactors {
    pub fn new(f: &SpectralField) -> Result<Self> {
        check_vector(f)?;
        Ok(Self {
            values: truncate(f).to_physical(),
            gradient: truncated_gradient(f)?,
        })
    }
}

/// [`convective`] from precomputed factors; identical output.
pub fn convective_factored(a: &ConvectiveFactors, b: &ConvectiveFactors) -> Result<SpectralField> {
    a.values.grid.same_as(&b.values.grid)?;
    Ok(combine_convective(&a.values, &b.gradient))
}

/// Grid integral `∫ a·b dx` of two real fields with matching component counts.
pub fn inner_product<F: PhysicalField>(a: &F, b: &F) -> Result<f64> {
    a.grid().same_as(b.grid())?;
    let (ca, cb) = (a.component_slices(), b.component_slices());
    if ca.len() != cb.len() {
        return Err(Error::ComponentMismatch {
            expected: ca.len(),
            found: cb.len(),
        });
    }
    let mut acc = 0.0;
    for (x, y) in ca.iter().zip(&cb) {
        acc += x.iter().zip(y.iter()).map(|(p, q)| p * q).sum::<f64>();
    }
    Ok(acc * a.grid().cell_volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn derivative_of_sine() {
        let l = 1.3;
        let grid = GridSpec::new(2, l, 32).unwrap();
        let f = ScalarField::from_fn(grid, |x| (x[0] / l).sin());
        let d = spectral_derivative(&f.to_spectral(), 0).unwrap().to_scalar().unwrap();
        let exact = ScalarField::from_fn(grid, |x| (x[0] / l).cos() / l);
        let err = d
            .values
            .iter()
            .zip(&exact.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-13 / l);
        let c = ScalarField::from_fn(grid, |_| 4.0).to_spectral();
        assert!(spectral_derivative(&c, 1).unwrap().max_abs() < 1e-15);
        assert!(spectral_derivative(&c, 2).is_err());
    }

    #[test]
    fn stream_function_field_is_solenoidal() {
        let grid = GridSpec::new(2, 1.0, 32).unwrap();
        let psi = samples::random_scalar(&grid, 7);
        let s = psi.to_spectral();
        let u = SpectralField {
            grid,
            components: vec![
                spectral_derivative(&s, 1).unwrap().components.remove(0),
                spectral_derivative(&s, 0).unwrap().map(|z| -z).components.remove(0),
            ],
        };
        let div = divergence(&u).unwrap().to_physical();
        assert!(div.max_abs() < 1e-12);
    }

    #[test]
    fn product_with_one_truncates() {
        let grid = GridSpec::new(2, 1.0, 16).unwrap();
        let b = VectorField::from_fn(grid, |x| [(7.0 * x[0]).sin() + x[1].cos(), 1.0, 0.0]);
        let one = VectorField::from_fn(grid, |_| [1.0, 1.0, 0.0]);
        let p = dealiased_product(&one, &b).unwrap();
        let expect = VectorField::from_fn(grid, |x| [x[1].cos(), 1.0, 0.0]);
        assert!(p.sub(&expect).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn product_to_sum() {
        let l = 0.7;
        let grid = GridSpec::new(2, l, 16).unwrap();
        let s = ScalarField::from_fn(grid, |x| (x[0] / l).sin());
        let p = dealiased_product_scalar(&s, &s).unwrap();
        let expect = ScalarField::from_fn(grid, |x| 0.5 - 0.5 * (2.0 * x[0] / l).cos());
        let err = p
            .values
            .iter()
            .zip(&expect.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-14);
    }

    #[test]
    fn convective_term_is_energy_neutral() {
        for (dim, n) in [(2, 32), (3, 16)] {
            let grid = GridSpec::new(dim, 1.0, n).unwrap();
            let u = samples::random_solenoidal(&grid, 3 + dim as u64);
            let su = u.to_spectral();
            let c = convective(&su, &su).unwrap().to_physical();
            let e = inner_product(&u, &c).unwrap();
            let scale = inner_product(&c, &c).unwrap().sqrt() * inner_product(&u, &u).unwrap().sqrt();
            assert!(e.abs() <= 1e-10 * scale.max(1.0), "dim {dim}: {e}");
        }
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(2, 1).len(), 2);
        assert_eq!(multi_indices(2, 2).len(), 3);
        assert_eq!(multi_indices(3, 1).len(), 3);
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(3, 1)[0], [1, 0, 0]);
    }

    #[test]
    fn factored_product_matches_direct_product() {
        let grid = GridSpec::new(3, 1.0, 16).unwrap();
        let a = samples::random_spectral(&grid, 3, 1, 4);
        let b = samples::random_spectral(&grid, 3, 2, 4);
        let direct = convective(&a, &b).unwrap();
        let fa = ConvectiveFactors::new(&a).unwrap();
        let fb = ConvectiveFactors::new(&b).unwrap();
        assert_eq!(convective_factored(&fa, &fb).unwrap(), direct);
    }
}

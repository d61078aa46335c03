//! Seeded random smooth fields built from low integer modes.
//!
//! Coefficients are drawn per integer mode in a fixed order, so the same seed
//! and mode cutoff give the same continuous field on every grid that resolves it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{ops, GridSpec, ScalarField, SpectralField, TimePeriodicField, VectorField};

/// Default mode cutoff `N/8`, at least 1.
pub fn default_cutoff(grid: &GridSpec) -> i64 {
    (grid.points_per_axis as i64 / 8).max(1)
}

fn is_upper_half(k: [i64; 3]) -> bool {
    k.iter()
        .find(|&&v| v != 0)
        .map(|&v| v > 0)
        .unwrap_or(false)
}

/// Hermitian random coefficients for `count` components with `|k_j| ≤ kmax`
/// and amplitude decaying like `1/(1+|k|²)`.
pub fn random_spectral(grid: &GridSpec, count: usize, seed: u64, kmax: i64) -> SpectralField {
    let kmax = kmax.min(grid.points_per_axis as i64 / 2 - 1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SpectralField::zeros(*grid, count);
    let range = -kmax..=kmax;
    let third: Vec<i64> = if grid.dim == 3 { range.clone().collect() } else { vec![0] };
    for k0 in range.clone() {
        for k1 in range.clone() {
            for &k2 in &third {
                let k = [k0, k1, k2];
                if !is_upper_half(k) {
                    continue;
                }
                let k2sum = (k0 * k0 + k1 * k1 + k2 * k2) as f64;
                let amp = 1.0 / (1.0 + k2sum);
                let mut at = [0usize; 3];
                let mut mirror = [0usize; 3];
                for a in 0..grid.dim {
                    at[a] = grid.storage_index(k[a]);
                    mirror[a] = grid.storage_index(-k[a]);
                }
                let (p, m) = (grid.flat(at), grid.flat(mirror));
                for c in 0..count {
                    let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
                    out.components[c][p] = z;
                    out.components[c][m] = z.conj();
                }
            }
        }
    }
    out
}

pub fn random_scalar(grid: &GridSpec, seed: u64) -> ScalarField {
    random_spectral(grid, 1, seed, default_cutoff(grid))
        .to_scalar()
        .expect("one component")
}

/// Generic (not divergence-free) random vector field.
pub fn random_vector(grid: &GridSpec, seed: u64) -> VectorField {
    random_spectral(grid, grid.dim, seed, default_cutoff(grid)).to_physical()
}

/// Divergence-free field from a stream function (2D) or vector potential (3D).
pub fn random_solenoidal_spectral(grid: &GridSpec, seed: u64, kmax: i64) -> SpectralField {
    let d = |f: &SpectralField, axis| ops::spectral_derivative(f, axis).expect("axis in range");
    if grid.dim == 2 {
        let psi = random_spectral(grid, 1, seed, kmax);
        let u0 = d(&psi, 1);
        let u1 = d(&psi, 0).map(|z| -z);
        SpectralField {
            grid: *grid,
            components: vec![u0.components[0].clone(), u1.components[0].clone()],
        }
    } else {
        let a = random_spectral(grid, 3, seed, kmax);
        let c = |i: usize| a.component(i);
        let comp = |p: usize, q: usize, r: usize, s: usize| {
            d(&c(p), q).sub(&d(&c(r), s)).expect("same shape").components[0].clone()
        };
        SpectralField {
            grid: *grid,
            components: vec![comp(2, 1, 1, 2), comp(0, 2, 2, 0), comp(1, 0, 0, 1)],
        }
    }
}

pub fn random_solenoidal(grid: &GridSpec, seed: u64) -> VectorField {
    random_solenoidal_spectral(grid, seed, default_cutoff(grid)).to_physical()
}

/// Real time-periodic field with modes `|k| ≤ K`; mode `k > 0` is drawn from
/// seed `seed + k` and mode `−k` is its conjugate partner.
pub fn random_periodic(
    grid: &GridSpec,
    period: f64,
    max_mode: usize,
    seed: u64,
    kmax: i64,
    solenoidal: bool,
    with_mean: bool,
) -> TimePeriodicField {
    let draw = |s: u64| {
        if solenoidal {
            random_solenoidal_spectral(grid, s, kmax)
        } else {
            random_spectral(grid, grid.dim, s, kmax)
        }
    };
    let mut f = TimePeriodicField::zeros(*grid, period, max_mode, grid.dim).expect("positive period");
    if with_mean {
        *f.mode_mut(0) = draw(seed);
    }
    for k in 1..=max_mode as i64 {
        let m = draw(seed + k as u64).scaled(Complex64::new(0.6, 0.8));
        *f.mode_mut(-k) = m.conj_physical();
        *f.mode_mut(k) = m;
    }
    f
}

//! Properties of the linear Oseen solvers: dense-oracle agreement, solenoidal
//! output, Leray invariance, linearity, residual response and the penalized
//! obstacle solve.

use nalgebra::DMatrix;
use num_complex::Complex64;
use oseen_core::fields::{ops, GridSpec, SpectralField, VectorField};
use oseen_core::norms::l2_norm_plancherel;
use oseen_core::oseen::{
    mode_solution, oseen_operator, remove_null_modes, solve_exterior_penalized_from, solve_spectral,
    solve_timeperiodic_lambda, ObstacleMask, SpectralPair,
};
use oseen_core::samples;
use proptest::prelude::*;

fn dense(xi: [f64; 3], dim: usize, lambda: f64, omega: f64, f: [Complex64; 3]) -> Vec<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let xi2: f64 = xi[..dim].iter().map(|x| x * x).sum();
    let a = DMatrix::from_fn(dim + 1, dim + 1, |r, c| match (r < dim, c < dim) {
        (true, true) if r == c => Complex64::new(xi2, lambda * xi[0] + omega),
        (true, false) => i * xi[r],
        (false, true) => i * xi[c],
        _ => Complex64::default(),
    });
    let b = DMatrix::from_fn(dim + 1, 1, |r, _| if r < dim { f[r] } else { Complex64::default() });
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn grid(dim: usize, n: usize) -> GridSpec {
    GridSpec::new(dim, 1.0, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closed_form_matches_dense_saddle_solve(
        dim in 2usize..=3,
        k in proptest::array::uniform3(-10i64..=10),
        lambda in 0.0f64..50.0,
        omega in -30.0f64..30.0,
        f in proptest::array::uniform3(complex()),
    ) {
        let xi = [k[0] as f64, k[1] as f64, if dim == 3 { k[2] as f64 } else { 0.0 }];
        prop_assume!(xi.iter().any(|&x| x != 0.0));
        let (u, p) = mode_solution(xi, dim, lambda, omega, f);
        let reference = dense(xi, dim, lambda, omega, f);
        let scale = reference.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        let mut got = u[..dim].to_vec();
        got.push(p);
        for (a, b) in got.iter().zip(&reference) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn velocity_is_solenoidal(dim in 2usize..=3, seed in any::<u64>(), lambda in 0.0f64..40.0) {
        let f = samples::random_spectral(&grid(dim, 16), dim, seed, 4);
        let u = solve_spectral(&f, lambda, 0.0).unwrap().velocity;
        let div = l2_norm_plancherel(&ops::divergence(&u).unwrap());
        prop_assert!(div <= 1e-11 * (1.0 + l2_norm_plancherel(&f)));
    }

    #[test]
    fn gradient_forcing_leaves_velocity_unchanged(dim in 2usize..=3, seed in any::<u64>(), lambda in 0.0f64..40.0) {
        let g = grid(dim, 16);
        let f = samples::random_spectral(&g, dim, seed, 3);
        let grad = ops::gradient(&samples::random_spectral(&g, 1, seed ^ 0x5a5a, 3)).unwrap();
        let a = solve_spectral(&f, lambda, 0.0).unwrap().velocity;
        let b = solve_spectral(&f.add(&grad).unwrap(), lambda, 0.0).unwrap().velocity;
        prop_assert!(b.sub(&a).unwrap().max_abs() <= 1e-15 * (a.max_abs() + grad.max_abs()));
    }

    #[test]
    fn periodic_solve_is_linear(seed in any::<u64>(), lambda in 0.0f64..10.0, a in -3.0f64..3.0) {
        let g = grid(2, 16);
        let f1 = samples::random_periodic(&g, 0.7, 2, seed, 3, false, true);
        let f2 = samples::random_periodic(&g, 0.7, 2, seed.wrapping_add(99), 3, false, true);
        let combined = solve_timeperiodic_lambda(&f1.add(&f2.scaled(a)).unwrap(), lambda).unwrap().0;
        let separate = solve_timeperiodic_lambda(&f1, lambda).unwrap().0
            .add(&solve_timeperiodic_lambda(&f2, lambda).unwrap().0.scaled(a)).unwrap();
        prop_assert!(combined.sub(&separate).unwrap().max_abs() <= 1e-12 * combined.max_abs());
    }
}

#[test]
fn residual_grows_linearly_under_perturbation() {
    let g = grid(3, 16);
    let f = samples::random_spectral(&g, 3, 21, 2);
    let lambda = 3.0;
    let sol = solve_spectral(&f, lambda, 0.0).unwrap();
    let phi = samples::random_solenoidal_spectral(&g, 22, 2);
    let target = remove_null_modes(&f);
    let residual = |eps: f64| {
        let mut velocity = sol.velocity.clone();
        velocity.axpy(Complex64::new(eps, 0.0), &phi).unwrap();
        let pair = SpectralPair { velocity, pressure: sol.pressure.clone() };
        l2_norm_plancherel(&oseen_operator(&pair, lambda).unwrap().sub(&target).unwrap())
    };
    let base = residual(0.0);
    assert!(base <= 1e-10 * l2_norm_plancherel(&f));
    let slopes: Vec<f64> = [1e-3, 1e-2, 1e-1].iter().map(|&e| residual(e) / e).collect();
    for s in &slopes {
        assert!((s / slopes[0] - 1.0).abs() < 1e-8, "{slopes:?}");
    }
}

fn blob(grid: GridSpec) -> VectorField {
    let c = grid.center();
    VectorField::from_fn(grid, |x| {
        let r2: f64 = (0..grid.dim).map(|a| (x[a] - c[a]).powi(2)).sum();
        [(-2.0 * r2).exp(), 0.0, 0.0]
    })
}

/// Largest `||u|(x) − |u|(x̄)|` with `x̄` the mirror image across the plane `x₁ = c₁`.
fn mirror_asymmetry(u: &VectorField) -> f64 {
    let n = u.grid.points_per_axis;
    let speed = |i: usize, j: usize| {
        let at = u.grid.flat([i, j, 0]);
        u.components.iter().map(|c| c[at] * c[at]).sum::<f64>().sqrt()
    };
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((speed(i, j) - speed((n - i) % n, j)).abs());
            peak = peak.max(speed(i, j));
        }
    }
    worst / peak
}

#[test]
fn obstacle_wake_needs_drift() {
    let g = grid(2, 32);
    let f = blob(g);
    let mask = ObstacleMask::ball(g, 0.6, 0.05).unwrap();
    let solve = |lambda: f64| solve_exterior_penalized_from(&f, lambda, &mask, 1e-10, 5000, None).unwrap().0;
    let still = mirror_asymmetry(&solve(0.0).velocity);
    let drifting = mirror_asymmetry(&solve(4.0).velocity);
    assert!(still < 1e-8, "{still}");
    assert!(drifting > 1e-2, "{drifting}");
}

#[test]
fn stronger_penalization_does_not_raise_obstacle_velocity() {
    let g = grid(2, 32);
    let f = blob(g);
    let on_obstacle: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&eta| {
            let mask = ObstacleMask::ball(g, 0.6, eta).unwrap();
            solve_exterior_penalized_from(&f, 1.0, &mask, 1e-10, 5000, None).unwrap().1.obstacle_l2
        })
        .collect();
    assert!(on_obstacle.windows(2).all(|w| w[1] <= w[0]), "{on_obstacle:?}");
}

#[test]
fn zero_data_give_zero_pair() {
    let g = grid(3, 8);
    let sol = solve_spectral(&SpectralField::zeros(g, 3), 2.0, 0.0).unwrap();
    assert_eq!(sol.velocity.max_abs(), 0.0);
    assert_eq!(sol.pressure.max_abs(), 0.0);
}

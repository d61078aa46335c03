//! Exponent arithmetic over random admissible configurations.

use oseen_core::fixedpoint::{exponents_m_delta, gamma_interval, theta_exponent, theta_forms, ScheduleInputs};
use oseen_core::norms::sobolev_conjugate;
use proptest::prelude::*;

/// `(n, q, r)` with `(n+1)/n < r < n+1` and `q ≥ s`.
fn admissible() -> impl Strategy<Value = (usize, f64, f64)> {
    (2usize..=6).prop_flat_map(|n| {
        let nf = n as f64;
        ((nf + 1.0) / nf + 1e-6..nf + 1.0 - 1e-6, 1.0f64..5.0).prop_map(move |(r, t)| {
            let s = sobolev_conjugate(n, r).unwrap();
            (n, s * t, r)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn theta_forms_agree((n, q, r) in admissible()) {
        let (a, b) = theta_forms(n, q, r).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        prop_assert!((theta_exponent(n, q, r).unwrap() - a).abs() <= 1e-15);
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-15);
    }

    #[test]
    fn theta_nonincreasing_in_q((n, q, r) in admissible(), step in 0.0f64..3.0) {
        let a = theta_exponent(n, q, r).unwrap();
        let b = theta_exponent(n, q + step, r).unwrap();
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn m_and_delta_constant_within_branches((n, _q, r) in admissible()) {
        let nf = n as f64;
        let (m, delta) = exponents_m_delta(n, r).unwrap();
        let expect = if r <= nf / (nf - 1.0) { 2 } else if r < nf { 0 } else { 1 };
        prop_assert_eq!(m, expect);
        prop_assert_eq!(delta, u32::from(n == 2 && r == 2.0));
    }

    #[test]
    fn ball_exponents_exceed_one_inside_interval(
        n in 2usize..=4,
        m in 0u32..=2,
        theta in 0.0f64..2.0,
        zeta in 0.0f64..1.0,
        eta in 0.0f64..2.0,
        t in 0.001f64..0.999,
    ) {
        let Ok((lo, hi)) = gamma_interval(n, m, theta, zeta, eta) else { return Ok(()) };
        prop_assume!(hi.is_finite() && lo < hi);
        let gamma = lo + t * (hi - lo);
        let inputs = ScheduleInputs { n, m, theta_bilinear: theta, zeta, eta, constant: 1.0 };
        for e in inputs.ball_exponents(gamma) {
            prop_assert!(e > 1.0, "{e} at gamma {gamma} in ({lo}, {hi})");
        }
    }
}

#[test]
fn branch_boundaries_are_closed_or_open_as_stated() {
    for n in 3..=6usize {
        let nf = n as f64;
        let edge = nf / (nf - 1.0);
        assert_eq!(exponents_m_delta(n, edge).unwrap().0, 2);
        assert_eq!(exponents_m_delta(n, edge + 1e-12).unwrap().0, 0);
        assert_eq!(exponents_m_delta(n, nf - 1e-12).unwrap().0, 0);
        assert_eq!(exponents_m_delta(n, nf).unwrap().0, 1);
        assert!(exponents_m_delta(n, (nf + 1.0) / nf).is_err());
        assert!(exponents_m_delta(n, nf + 1.0).is_err());
    }
    // In the plane n/(n−1) = n = 2, so the middle branch is empty.
    assert_eq!(exponents_m_delta(2, 2.0).unwrap(), (2, 1));
    assert_eq!(exponents_m_delta(2, 2.0 + 1e-12).unwrap(), (1, 0));
}

//! Radial cut-off and the divergence-free boundary lifting.
//!
//! The lifting is `V = (λ/2)(−Δ + ∇div)(φ(x)·x₂²·e₁)` with `x₂` measured from
//! the box center. Where `φ ≡ 1` this gives `V = −λe₁`, and `div V = 0`
//! holds identically since `div(−Δ + ∇div) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ops, GridSpec, ScalarField, SpectralField, VectorField};
use crate::norms;

/// Transition shape of the cut-off between the inner and outer radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutoffProfile {
    /// `½ erfc((ρ − m)/w)` clipped to exactly 1 and 0 outside the transition,
    /// with `m` the mid radius and `w = (R_out − R)/(2·sharpness)`. The clip
    /// jump is `½ erfc(sharpness)`, below `1e-17` for the default sharpness 6.
    Erfc { sharpness: f64 },
    /// `1 − (10t³ − 15t⁴ + 6t⁵)` in `t = (ρ − R)/(R_out − R)`; `C²` at both ends.
    Quintic,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        CutoffProfile::Erfc { sharpness: 6.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner_radius: f64,
    pub outer_radius: f64,
    #[serde(default)]
    pub profile: CutoffProfile,
}

impl CutoffSpec {
    pub fn new(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        let spec = Self {
            inner_radius,
            outer_radius,
            profile: CutoffProfile::default(),
        };
        spec.check_radii()?;
        Ok(spec)
    }

    pub fn with_profile(mut self, profile: CutoffProfile) -> Result<Self> {
        self.profile = profile;
        self.check_radii()?;
        Ok(self)
    }

    fn check_radii(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius && self.outer_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < R < R_out, got R = {}, R_out = {}",
                self.inner_radius, self.outer_radius
            )));
        }
        if let CutoffProfile::Erfc { sharpness } = self.profile {
            if !(sharpness.is_finite() && sharpness > 0.0) {
                return Err(Error::InvalidParameter(format!("sharpness must be positive, got {sharpness}")));
            }
        }
        Ok(())
    }

    /// Checks the radii and that the outer ball fits inside the box.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        self.check_radii()?;
        let half_width = std::f64::consts::PI * grid.half_period;
        if self.outer_radius >= half_width {
            return Err(Error::InvalidParameter(format!(
                "outer radius {} must be below the box half-width {half_width}",
                self.outer_radius
            )));
        }
        Ok(())
    }

    /// Profile value and its first two radial derivatives at radius `rho`.
    pub fn profile_at(&self, rho: f64) -> (f64, f64, f64) {
        let (r0, r1) = (self.inner_radius, self.outer_radius);
        if rho <= r0 {
            return (1.0, 0.0, 0.0);
        }
        if rho >= r1 {
            return (0.0, 0.0, 0.0);
        }
        match self.profile {
            CutoffProfile::Erfc { sharpness } => {
                let w = (r1 - r0) / (2.0 * sharpness);
                let z = (rho - 0.5 * (r0 + r1)) / w;
                let g = (-z * z).exp() / (w * std::f64::consts::PI.sqrt());
                (0.5 * libm::erfc(z), -g, 2.0 * z * g / w)
            }
            CutoffProfile::Quintic => {
                let d = r1 - r0;
                let t = (rho - r0) / d;
                let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
                let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t) / d;
                let dds = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (d * d);
                (1.0 - s, -ds, -dds)
            }
        }
    }
}

fn radius_from_center(grid: &GridSpec, x: [f64; 3]) -> f64 {
    let c = grid.center();
    (0..grid.dim).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>().sqrt()
}

/// Samples the radial cut-off about the box center.
pub fn build_cutoff(spec: &CutoffSpec, grid: &GridSpec) -> Result<ScalarField> {
    spec.validate(grid)?;
    Ok(ScalarField::from_fn(*grid, |x| spec.profile_at(radius_from_center(grid, x)).0))
}

/// The lifting field together with the `λ` it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingField {
    pub velocity: VectorField,
    pub spectral: SpectralField,
    pub lambda_used: f64,
    pub cutoff: CutoffSpec,
}

impl LiftingField {
    /// The identically zero lifting (used for `λ = 0` and lifting-free runs).
    pub fn zero(grid: GridSpec, cutoff: CutoffSpec) -> Self {
        Self {
            velocity: VectorField::zeros(grid),
            spectral: SpectralField::zeros(grid, grid.dim),
            lambda_used: 0.0,
            cutoff,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.spectral.grid
    }
}

/// Builds `V` for `λ ≥ 0`; `λ = 0` gives `V ≡ 0`.
pub fn build_lifting(lambda: f64, spec: &CutoffSpec, grid: &GridSpec) -> Result<LiftingField> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    spec.validate(grid)?;
    let clearance = std::f64::consts::PI * grid.half_period - 2.0 * grid.spacing();
    if spec.outer_radius > clearance {
        return Err(Error::InvalidParameter(format!(
            "cut-off support (radius {}) touches the box boundary",
            spec.outer_radius
        )));
    }
    let c = grid.center();
    let mut gen = VectorField::zeros(*grid);
    grid.for_each_point(|i, x| {
        let phi = spec.profile_at(radius_from_center(grid, x)).0;
        gen.components[0][i] = phi * (x[1] - c[1]).powi(2);
    });
    let w = gen.to_spectral();
    let dim = grid.dim;
    let mut v = SpectralField::zeros(*grid, dim);
    grid.for_each_mode(|flat, xi, _| {
        let xi2: f64 = xi[..dim].iter().map(|t| t * t).sum();
        let xw: num_complex::Complex64 = (0..dim).map(|a| w.components[a][flat] * xi[a]).sum();
        for a in 0..dim {
            v.components[a][flat] = (w.components[a][flat] * xi2 - xw * xi[a]) * (0.5 * lambda);
        }
    });
    Ok(LiftingField {
        velocity: v.to_physical(),
        spectral: v,
        lambda_used: lambda,
        cutoff: *spec,
    })
}

/// The forcing generated by the lifting, `−ΔV + λ∂₁V`.
pub fn lifting_forcing(v: &LiftingField) -> Result<SpectralField> {
    let mut g = ops::laplacian(&v.spectral).map(|z| -z);
    g.axpy(
        num_complex::Complex64::new(v.lambda_used, 0.0),
        &ops::spectral_derivative(&v.spectral, 0)?,
    )?;
    Ok(g)
}

/// Both norms of `−ΔV + λ∂₁V` and their sum relative to `λ(1+λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftingLoad {
    pub lambda: f64,
    pub lq: f64,
    pub negative: f64,
    /// `(lq + negative)/(λ(1+λ))`; NaN for `λ = 0`.
    pub ratio: f64,
}

/// Evaluates the lifting load with the `λ` stored in the lifting.
pub fn lifting_load(v: &LiftingField, q: f64, r: f64) -> Result<LiftingLoad> {
    let g = lifting_forcing(v)?;
    let lq = norms::lq_norm_spectral(&g, q)?;
    let negative = norms::negative_norm_surrogate_spectral(&g, r)?.value;
    let lam = v.lambda_used;
    Ok(LiftingLoad {
        lambda: lam,
        lq,
        negative,
        ratio: if lam > 0.0 { (lq + negative) / (lam * (1.0 + lam)) } else { f64::NAN },
    })
}

/// Largest deviation of `V` from `−λe₁` on the closed inner ball.
pub fn inner_ball_defect(v: &LiftingField) -> f64 {
    let grid = *v.grid();
    let r0 = v.cutoff.inner_radius;
    let mut worst = 0.0f64;
    grid.for_each_point(|i, x| {
        if radius_from_center(&grid, x) <= r0 {
            for (a, comp) in v.velocity.components.iter().enumerate() {
                let target = if a == 0 { -v.lambda_used } else { 0.0 };
                worst = worst.max((comp[i] - target).abs());
            }
        }
    });
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2d() -> (GridSpec, CutoffSpec) {
        (GridSpec::new(2, 1.0, 128).unwrap(), CutoffSpec::new(0.5, 2.5).unwrap())
    }

    #[test]
    fn cutoff_values_and_symmetry() {
        let (grid, spec) = spec2d();
        let phi = build_cutoff(&spec, &grid).unwrap();
        let n = grid.points_per_axis;
        assert_eq!(phi.values[grid.flat([n / 2, n / 2, 0])], 1.0);
        assert_eq!(phi.values[0], 0.0);
        for i in 1..n {
            for j in 1..n {
                let a = phi.values[grid.flat([i, j, 0])];
                let b = phi.values[grid.flat([n - i, n - j, 0])];
                assert!((a - b).abs() <= 1e-13);
            }
        }
        assert!(phi.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn quintic_matches_to_second_order() {
        let spec = CutoffSpec::new(1.0, 2.0).unwrap().with_profile(CutoffProfile::Quintic).unwrap();
        for rho in [1.0 + 1e-9, 2.0 - 1e-9] {
            let (_, d1, d2) = spec.profile_at(rho);
            assert!(d1.abs() < 1e-12 && d2.abs() < 1e-7);
        }
        assert!((spec.profile_at(1.5).0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn profile_derivatives_match_differences() {
        for profile in [CutoffProfile::default(), CutoffProfile::Quintic] {
            let spec = CutoffSpec::new(0.5, 2.5).unwrap().with_profile(profile).unwrap();
            for rho in [0.9, 1.4, 1.5, 2.1] {
                let h = 1e-4;
                let (p, d1, d2) = spec.profile_at(rho);
                let (pp, _, _) = spec.profile_at(rho + h);
                let (pm, _, _) = spec.profile_at(rho - h);
                assert!(((pp - pm) / (2.0 * h) - d1).abs() < 1e-6);
                assert!(((pp - 2.0 * p + pm) / (h * h) - d2).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn lifting_is_solenoidal_and_linear() {
        let (grid, spec) = spec2d();
        let one = build_lifting(1.0, &spec, &grid).unwrap();
        let two = build_lifting(0.37, &spec, &grid).unwrap();
        let div = ops::divergence(&one.spectral).unwrap();
        assert!(norms::l2_norm_plancherel(&div) < 1e-12);
        let scaled = one.spectral.scaled(num_complex::Complex64::new(0.37, 0.0));
        assert!(two.spectral.sub(&scaled).unwrap().max_abs() < 1e-15);
        assert!(inner_ball_defect(&one) < 1e-10);
        let zero = build_lifting(0.0, &spec, &grid).unwrap();
        assert_eq!(zero.velocity.max_abs(), 0.0);
        let load = lifting_load(&zero, 2.0, 2.0).unwrap();
        assert_eq!((load.lq, load.negative), (0.0, 0.0));
    }

    #[test]
    fn load_doubling_bracket() {
        let (grid, spec) = spec2d();
        for lam in [1e-3, 1e-2] {
            let a = lifting_load(&build_lifting(lam, &spec, &grid).unwrap(), 2.0, 2.0).unwrap();
            let b = lifting_load(&build_lifting(2.0 * lam, &spec, &grid).unwrap(), 2.0, 2.0).unwrap();
            for (x, y) in [(a.lq, b.lq), (a.negative, b.negative)] {
                let f = y / x;
                assert!(f >= 2.0 * (1.0 - 1e-12) && f <= 2.0 * (1.0 + 2.0 * lam) / (1.0 + lam), "{f}");
            }
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        let grid = GridSpec::new(2, 1.0, 32).unwrap();
        assert!(CutoffSpec::new(2.0, 1.0).is_err());
        let big = CutoffSpec::new(1.0, 3.2).unwrap();
        assert!(build_cutoff(&big, &grid).is_err());
        let edge = CutoffSpec::new(1.0, 3.0).unwrap();
        assert!(build_lifting(1.0, &edge, &grid).is_err());
        assert!(build_lifting(-1.0, &CutoffSpec::new(0.5, 2.0).unwrap(), &grid).is_err());
    }
}

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{GridSpec, SpectralField};
use crate::error::{Error, Result};

/// Truncated Fourier series in time of a `T`-periodic spatial field.
///
/// `modes[k + K]` holds the spatial spectrum of the time mode `k ∈ {-K..K}`,
/// so that `u(t) = Σ_k modes[k+K]·e^{iω_k t}` with `ω_k = 2πk/T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePeriodicField {
    pub grid: GridSpec,
    pub period: f64,
    pub max_mode: usize,
    pub modes: Vec<SpectralField>,
}

impl TimePeriodicField {
    pub fn zeros(grid: GridSpec, period: f64, max_mode: usize, count: usize) -> Result<Self> {
        check_period(period)?;
        Ok(Self {
            grid,
            period,
            max_mode,
            modes: vec![SpectralField::zeros(grid, count); 2 * max_mode + 1],
        })
    }

    /// Time-constant field whose only mode is `k = 0`.
    pub fn from_steady(steady: &SpectralField, period: f64, max_mode: usize) -> Result<Self> {
        let mut out = Self::zeros(steady.grid, period, max_mode, steady.count())?;
        out.modes[max_mode] = steady.clone();
        Ok(out)
    }

    /// Builds the field from its time-mode spectra listed for `k = -K..=K`.
    pub fn from_modes(period: f64, modes: Vec<SpectralField>) -> Result<Self> {
        check_period(period)?;
        if modes.len() % 2 == 0 {
            return Err(Error::InvalidParameter(
                "time modes must be listed for k = -K..=K".into(),
            ));
        }
        let grid = modes[0].grid;
        let count = modes[0].count();
        for m in &modes {
            m.grid.same_as(&grid)?;
            if m.count() != count {
                return Err(Error::ComponentMismatch {
                    expected: count,
                    found: m.count(),
                });
            }
        }
        Ok(Self {
            grid,
            period,
            max_mode: modes.len() / 2,
            modes,
        })
    }

    /// Projects uniform time samples `u(jT/Nt)` onto the modes `|k| ≤ K`.
    pub fn from_time_samples(period: f64, max_mode: usize, samples: &[SpectralField]) -> Result<Self> {
        check_period(period)?;
        let nt = samples.len();
        if nt < 2 * max_mode + 1 {
            return Err(Error::InvalidParameter(format!(
                "{nt} time samples cannot resolve {max_mode} modes"
            )));
        }
        let grid = samples[0].grid;
        let count = samples[0].count();
        let mut out = Self::zeros(grid, period, max_mode, count)?;
        for (idx, mode) in out.modes.iter_mut().enumerate() {
            let k = idx as i64 - max_mode as i64;
            for (j, s) in samples.iter().enumerate() {
                let phase = -2.0 * PI * (k * j as i64) as f64 / nt as f64;
                mode.axpy(Complex64::from_polar(1.0 / nt as f64, phase), s)?;
            }
        }
        Ok(out)
    }

    pub fn count(&self) -> usize {
        self.modes[0].count()
    }

    pub fn omega(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.period
    }

    pub fn mode(&self, k: i64) -> &SpectralField {
        &self.modes[(k + self.max_mode as i64) as usize]
    }

    pub fn mode_mut(&mut self, k: i64) -> &mut SpectralField {
        &mut self.modes[(k + self.max_mode as i64) as usize]
    }

    pub fn mode_range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.max_mode as i64)..=self.max_mode as i64
    }

    /// Time average over one period.
    pub fn steady_part(&self) -> SpectralField {
        self.mode(0).clone()
    }

    /// The field with its time average removed.
    pub fn oscillatory_part(&self) -> Self {
        let mut out = self.clone();
        let c = out.count();
        *out.mode_mut(0) = SpectralField::zeros(self.grid, c);
        out
    }

    /// Spatial spectrum at time `t`.
    pub fn evaluate(&self, t: f64) -> SpectralField {
        let mut acc = SpectralField::zeros(self.grid, self.count());
        for k in self.mode_range() {
            let w = Complex64::from_polar(1.0, self.omega(k) * t);
            acc.axpy(w, self.mode(k)).expect("modes share a shape");
        }
        acc
    }

    /// Spectra at the uniform times `jT/nt`, `j = 0..nt`.
    pub fn time_samples(&self, nt: usize) -> Vec<SpectralField> {
        (0..nt)
            .map(|j| self.evaluate(j as f64 * self.period / nt as f64))
            .collect()
    }

    /// `∂ₜ`: mode `k` is multiplied by `iω_k`.
    pub fn time_derivative(&self) -> Self {
        let mut out = self.clone();
        for k in self.mode_range() {
            let w = Complex64::new(0.0, self.omega(k));
            *out.mode_mut(k) = self.mode(k).scaled(w);
        }
        out
    }

    pub fn map_modes(&self, f: impl Fn(i64, &SpectralField) -> SpectralField) -> Self {
        Self {
            grid: self.grid,
            period: self.period,
            max_mode: self.max_mode,
            modes: self.mode_range().map(|k| f(k, self.mode(k))).collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        if self.period != other.period || self.max_mode != other.max_mode {
            return Err(Error::InvalidParameter("time-periodic fields differ in period or mode count".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self { modes, ..self.clone_header() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self { modes, ..self.clone_header() })
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_modes(|_, m| m.scaled(Complex64::new(a, 0.0)))
    }

    fn clone_header(&self) -> Self {
        Self {
            grid: self.grid,
            period: self.period,
            max_mode: self.max_mode,
            modes: Vec::new(),
        }
    }

    /// Largest violation of `c_{-k}(-ξ) = conj(c_k(ξ))`.
    pub fn hermitian_defect(&self) -> f64 {
        let mirror = SpectralField::mirror_table(&self.grid);
        let mut worst = 0.0f64;
        for k in self.mode_range() {
            let (a, b) = (self.mode(k), self.mode(-k));
            for (ca, cb) in a.components.iter().zip(&b.components) {
                for (i, &j) in mirror.iter().enumerate() {
                    worst = worst.max((cb[j] - ca[i].conj()).norm());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }
}

fn check_period(period: f64) -> Result<()> {
    if period.is_finite() && period > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("period must be positive, got {period}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn sample_field(grid: GridSpec, period: f64, k: usize) -> TimePeriodicField {
        let mut f = TimePeriodicField::zeros(grid, period, k, 2).unwrap();
        for m in 1..=k as i64 {
            let s = samples::random_solenoidal_spectral(&grid, 40 + m as u64, 2)
                .scaled(Complex64::new(0.3, -0.2 * m as f64));
            *f.mode_mut(-m) = s.conj_physical();
            *f.mode_mut(m) = s;
        }
        *f.mode_mut(0) = samples::random_solenoidal_spectral(&grid, 3, 2);
        f
    }

    #[test]
    fn sampling_round_trip() {
        let grid = GridSpec::new(2, 1.0, 16).unwrap();
        let f = sample_field(grid, 2.5, 3);
        assert!(f.hermitian_defect() < 1e-14);
        let back = TimePeriodicField::from_time_samples(2.5, 3, &f.time_samples(13)).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-14);
        for s in f.time_samples(7) {
            assert!(s.hermitian_defect() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_cosine_in_time() {
        let grid = GridSpec::new(2, 1.0, 8).unwrap();
        let phi = samples::random_spectral(&grid, 1, 9, 2);
        let mut f = TimePeriodicField::zeros(grid, 3.0, 1, 1).unwrap();
        *f.mode_mut(1) = phi.scaled(Complex64::new(0.5, 0.0));
        *f.mode_mut(-1) = phi.scaled(Complex64::new(0.5, 0.0));
        let t = 0.4;
        let w = 2.0 * PI / 3.0;
        let d = f.time_derivative().evaluate(t);
        let expect = phi.scaled(Complex64::new(-w * (w * t).sin(), 0.0));
        assert!(d.sub(&expect).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_period() {
        let grid = GridSpec::new(2, 1.0, 8).unwrap();
        assert!(TimePeriodicField::zeros(grid, 0.0, 1, 2).is_err());
    }
}

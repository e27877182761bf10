use crate::error::{Error, Result};
use crate::fourier::Fft2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real divergence-free velocity `u = Σ û_k e^{−2πi k·x}` on `|k|_∞ ≤ band`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityField {
    label: String,
    band: usize,
    u1: Vec<Complex64>,
    u2: Vec<Complex64>,
}

impl VelocityField {
    fn side(band: usize) -> usize {
        2 * band + 1
    }

    fn idx(band: usize, k: (i64, i64)) -> usize {
        let b = band as i64;
        ((k.0 + b) as usize) * Self::side(band) + (k.1 + b) as usize
    }

    fn zeros(label: &str, band: usize) -> Self {
        let n = Self::side(band).pow(2);
        Self {
            label: label.to_string(),
            band,
            u1: vec![ZERO; n],
            u2: vec![ZERO; n],
        }
    }

    /// Validated construction from coefficient arrays indexed `(k₁+B)(2B+1) + (k₂+B)`.
    pub fn from_fourier(
        label: impl Into<String>,
        band: usize,
        u1: Vec<Complex64>,
        u2: Vec<Complex64>,
    ) -> Result<Self> {
        let n = Self::side(band).pow(2);
        if u1.len() != n || u2.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u1.len().min(u2.len()),
            });
        }
        let field = Self {
            label: label.into(),
            band,
            u1,
            u2,
        };
        field.validate()?;
        Ok(field)
    }

    /// `u = (∂_y ψ, −∂_x ψ)` from stream-function coefficients on the same layout.
    pub fn from_stream_function(
        label: impl Into<String>,
        band: usize,
        psi: &[Complex64],
    ) -> Result<Self> {
        let label = label.into();
        let mut f = Self::zeros(&label, band);
        if psi.len() != f.u1.len() {
            return Err(Error::DimensionMismatch {
                expected: f.u1.len(),
                found: psi.len(),
            });
        }
        for k in f.keys() {
            let i = Self::idx(band, k);
            let two_pi_i = Complex64::new(0.0, 2.0 * PI);
            f.u1[i] = -two_pi_i * k.1 as f64 * psi[i];
            f.u2[i] = two_pi_i * k.0 as f64 * psi[i];
        }
        f.validate()?;
        Ok(f)
    }

    pub fn constant(alpha: [f64; 2]) -> Self {
        let mut f = Self::zeros("constant", 0);
        f.u1[0] = Complex64::new(alpha[0], 0.0);
        f.u2[0] = Complex64::new(alpha[1], 0.0);
        f
    }

    pub fn zero() -> Self {
        Self::zeros("zero", 0)
    }

    /// `u = (sin 2πy, 0)`.
    pub fn shear() -> Self {
        let mut f = Self::zeros("shear", 1);
        f.u1[Self::idx(1, (0, -1))] = Complex64::new(0.0, -0.5);
        f.u1[Self::idx(1, (0, 1))] = Complex64::new(0.0, 0.5);
        f
    }

    /// Stream function `(1/2π) sin 2πx sin 2πy`.
    pub fn cellular() -> Self {
        let mut psi = vec![ZERO; 9];
        for k in [(-1i64, -1i64), (-1, 1), (1, -1), (1, 1)] {
            psi[Self::idx(1, k)] = Complex64::new(-(k.0 * k.1) as f64 / (4.0 * 2.0 * PI), 0.0);
        }
        Self::from_stream_function("cellular", 1, &psi).expect("cellular flow is divergence free")
    }

    /// Stream-function coefficients of [`VelocityField::cellular`].
    pub fn cellular_stream_function() -> Vec<((i64, i64), Complex64)> {
        [(-1i64, -1i64), (-1, 1), (1, -1), (1, 1)]
            .iter()
            .map(|&k| (k, Complex64::new(-(k.0 * k.1) as f64 / (8.0 * PI), 0.0)))
            .collect()
    }

    /// Coefficients of real grid samples (`n × n`, row-major in x), truncated to `band`.
    pub fn from_grid_samples(
        label: impl Into<String>,
        n: usize,
        u1: &[f64],
        u2: &[f64],
        band: usize,
    ) -> Result<Self> {
        if u1.len() != n * n || u2.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: u1.len().min(u2.len()),
            });
        }
        if 2 * band >= n {
            return Err(Error::Resolution(format!(
                "band {band} not resolved on a {n}-point grid"
            )));
        }
        let fft = Fft2::new(n);
        let analyze = |v: &[f64]| {
            let mut g: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft.analyze(&mut g);
            g
        };
        let (g1, g2) = (analyze(u1), analyze(u2));
        let mut f = Self::zeros(&label.into(), band);
        for k in f.keys() {
            let i = Self::idx(band, k);
            f.u1[i] = g1[fft.slot(k)];
            f.u2[i] = g2[fft.slot(k)];
        }
        f.symmetrize();
        Ok(f)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn keys(&self) -> impl Iterator<Item = (i64, i64)> {
        let b = self.band as i64;
        (-b..=b).flat_map(move |a| (-b..=b).map(move |c| (a, c)))
    }

    pub fn coefficient(&self, k: (i64, i64)) -> (Complex64, Complex64) {
        let b = self.band as i64;
        if k.0.abs() > b || k.1.abs() > b {
            return (ZERO, ZERO);
        }
        let i = Self::idx(self.band, k);
        (self.u1[i], self.u2[i])
    }

    /// `‖div u‖` in the spectral ℓ² norm.
    pub fn divergence_norm(&self) -> f64 {
        self.keys()
            .map(|k| {
                let (a, b) = self.coefficient(k);
                (2.0 * PI * (a * k.0 as f64 + b * k.1 as f64)).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ |û_k|`, an upper bound for `sup |u|`.
    pub fn sup_bound(&self) -> f64 {
        self.u1
            .iter()
            .zip(&self.u2)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).sqrt())
            .sum()
    }

    /// `Σ 2π|k| |û_k|`, an upper bound for the Lipschitz constant.
    pub fn lip(&self) -> f64 {
        self.keys()
            .map(|k| {
                let (a, b) = self.coefficient(k);
                2.0 * PI * ((k.0 * k.0 + k.1 * k.1) as f64).sqrt() * (a.norm_sqr() + b.norm_sqr()).sqrt()
            })
            .sum()
    }

    /// Remove the gradient part (`û ← û − k(k·û)/|k|²`); returns the removed norm.
    pub fn leray_project(&mut self) -> f64 {
        let mut removed = 0.0;
        for k in self.keys().collect::<Vec<_>>() {
            if k == (0, 0) {
                continue;
            }
            let i = Self::idx(self.band, k);
            let (k1, k2) = (k.0 as f64, k.1 as f64);
            let r2 = k1 * k1 + k2 * k2;
            let proj = (self.u1[i] * k1 + self.u2[i] * k2) / r2;
            removed += (proj * k1).norm_sqr() + (proj * k2).norm_sqr();
            self.u1[i] -= proj * k1;
            self.u2[i] -= proj * k2;
        }
        removed.sqrt()
    }

    fn symmetrize(&mut self) {
        for k in self.keys().collect::<Vec<_>>() {
            let i = Self::idx(self.band, k);
            let j = Self::idx(self.band, (-k.0, -k.1));
            if i <= j {
                let a = 0.5 * (self.u1[i] + self.u1[j].conj());
                let b = 0.5 * (self.u2[i] + self.u2[j].conj());
                self.u1[i] = a;
                self.u1[j] = a.conj();
                self.u2[i] = b;
                self.u2[j] = b.conj();
            }
        }
    }

    pub fn reality_defect(&self) -> f64 {
        self.keys()
            .map(|k| {
                let (a, b) = self.coefficient(k);
                let (c, d) = self.coefficient((-k.0, -k.1));
                (a - c.conj()).norm().max((b - d.conj()).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let scale = self.sup_bound().max(1.0);
        let real = self.reality_defect();
        if real > 1e-12 * scale {
            return Err(Error::param(
                "velocity",
                format!("coefficients not Hermitian symmetric (defect {real:.3e})"),
            ));
        }
        let div = self.divergence_norm();
        if div > 1e-10 * scale {
            return Err(Error::NotDivergenceFree { residual: div });
        }
        Ok(())
    }

    /// Real samples of `(u₁, u₂)` on an `m × m` grid.
    pub fn sample_grid(&self, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if m <= 2 * self.band {
            return Err(Error::Resolution(format!(
                "grid {m} cannot represent velocity band {}",
                self.band
            )));
        }
        let fft = Fft2::new(m);
        let synth = |coeffs: &[Complex64]| {
            let mut g = vec![ZERO; m * m];
            for k in self.keys() {
                g[fft.slot(k)] = coeffs[Self::idx(self.band, k)];
            }
            fft.synthesize(&mut g);
            g.into_iter().map(|z| z.re).collect::<Vec<f64>>()
        };
        Ok((synth(&self.u1), synth(&self.u2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_samples_sine_profile() {
        let u = VelocityField::shear();
        assert_eq!(u.divergence_norm(), 0.0);
        let m = 16;
        let (u1, u2) = u.sample_grid(m).unwrap();
        for i1 in 0..m {
            for i2 in 0..m {
                let y = i2 as f64 / m as f64;
                assert!((u1[i1 * m + i2] - (2.0 * PI * y).sin()).abs() < 1e-14);
                assert!(u2[i1 * m + i2].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cellular_matches_stream_function_derivatives() {
        let u = VelocityField::cellular();
        assert!(u.divergence_norm() < 1e-15);
        let m = 12;
        let (u1, u2) = u.sample_grid(m).unwrap();
        for i1 in 0..m {
            for i2 in 0..m {
                let (x, y) = (i1 as f64 / m as f64, i2 as f64 / m as f64);
                let want1 = (2.0 * PI * x).sin() * (2.0 * PI * y).cos();
                let want2 = -(2.0 * PI * x).cos() * (2.0 * PI * y).sin();
                assert!((u1[i1 * m + i2] - want1).abs() < 1e-14);
                assert!((u2[i1 * m + i2] - want2).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn compressible_field_rejected_then_projected() {
        let band = 1;
        let mut u1 = vec![ZERO; 9];
        let u2 = vec![ZERO; 9];
        // u1 = cos 2πx has nonzero divergence.
        u1[VelocityField::idx(band, (1, 0))] = Complex64::new(0.5, 0.0);
        u1[VelocityField::idx(band, (-1, 0))] = Complex64::new(0.5, 0.0);
        let err = VelocityField::from_fourier("bad", band, u1.clone(), u2.clone()).unwrap_err();
        assert!(matches!(err, Error::NotDivergenceFree { .. }));

        let mut f = VelocityField::zeros("bad", band);
        f.u1 = u1;
        f.u2 = u2;
        let removed = f.leray_project();
        assert!((removed - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(f.divergence_norm() < 1e-15);
    }

    #[test]
    fn grid_round_trip() {
        let u = VelocityField::cellular();
        let (g1, g2) = u.sample_grid(16).unwrap();
        let back = VelocityField::from_grid_samples("cellular", 16, &g1, &g2, 1).unwrap();
        for k in u.keys() {
            let (a, b) = u.coefficient(k);
            let (c, d) = back.coefficient(k);
            assert!((a - c).norm() < 1e-15 && (b - d).norm() < 1e-15);
        }
    }
}

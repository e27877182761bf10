use super::GammaLadder;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Coefficients of a vector in the Γ eigenbasis (or a Fourier lattice).
///
/// `mean` holds the k = 0 coefficient on the torus track and is zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    basis: String,
    coeffs: Vec<Complex64>,
    mean: Complex64,
}

impl SpectralState {
    pub fn zeros(ladder: &GammaLadder) -> Self {
        Self::zeros_in(ladder.label(), ladder.len())
    }

    pub(crate) fn zeros_in(basis: &str, n: usize) -> Self {
        Self {
            basis: basis.to_string(),
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            mean: Complex64::new(0.0, 0.0),
        }
    }

    /// `e_j` for 1-based `j`.
    pub fn basis_vector(ladder: &GammaLadder, j: usize) -> Result<Self> {
        if j == 0 || j > ladder.len() {
            return Err(Error::param(
                "j",
                format!("basis index {j} outside 1..={}", ladder.len()),
            ));
        }
        let mut s = Self::zeros(ladder);
        s.coeffs[j - 1] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_coeffs(ladder: &GammaLadder, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != ladder.len() {
            return Err(Error::DimensionMismatch {
                expected: ladder.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self::with_basis(ladder.label(), coeffs))
    }

    pub fn from_real(ladder: &GammaLadder, values: &[f64]) -> Result<Self> {
        Self::from_coeffs(
            ladder,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub(crate) fn with_basis(basis: &str, coeffs: Vec<Complex64>) -> Self {
        Self {
            basis: basis.to_string(),
            coeffs,
            mean: Complex64::new(0.0, 0.0),
        }
    }

    /// Same basis and mean with new coefficients of equal length.
    pub fn with_coeffs(mut self, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), self.coeffs.len(), "coefficient length changed");
        self.coeffs = coeffs;
        self
    }

    pub fn with_mean(mut self, mean: Complex64) -> Self {
        self.mean = mean;
        self
    }

    pub(crate) fn set_mean(&mut self, mean: Complex64) {
        self.mean = mean;
    }

    pub fn basis(&self) -> &str {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    /// 1-based coefficient access.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs[j - 1]
    }

    pub fn norm(&self) -> f64 {
        super::norm_sqr(&self.coeffs).sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        super::norm_sqr(&self.coeffs)
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= z);
        out.mean *= z;
        out
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero state".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + z·other`.
    pub fn axpy(&self, z: Complex64, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += z * b;
        }
        out.mean += z * other.mean;
        Ok(out)
    }

    pub(crate) fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.clone(),
                right: other.basis.clone(),
            });
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    basis: String,
    coeffs: Vec<[f64; 2]>,
    #[serde(default)]
    mean: [f64; 2],
}

impl Serialize for SpectralState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            mean: [self.mean.re, self.mean.im],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        Ok(Self {
            basis: w.basis,
            coeffs: w.coeffs.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
            mean: Complex64::new(w.mean[0], w.mean[1]),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_uses_pairs() {
        let ladder = GammaLadder::linear(3).unwrap();
        let s = SpectralState::from_coeffs(
            &ladder,
            vec![
                Complex64::new(1.0, -2.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, 3.25),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("[1.0,-2.0]"));
        let back: SpectralState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn zero_state_cannot_be_normalized() {
        let ladder = GammaLadder::linear(3).unwrap();
        assert!(SpectralState::zeros(&ladder).normalized().is_err());
    }
}

use crate::error::{Error, Result};
use crate::spectral::SpectralState;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tridiagonal `(Lu)_n = a_n u_{n+1} + a_{n−1} u_{n−1} + v_n u_n` with `u_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiOperator {
    tag: String,
    /// Off-diagonal `a_1..a_{N−1}`.
    a: Vec<f64>,
    /// Potential `v_1..v_N`.
    v: Vec<f64>,
}

impl JacobiOperator {
    pub fn new(tag: impl Into<String>, a: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::size("Jacobi operator", "empty potential"));
        }
        if a.len() + 1 != v.len() {
            return Err(Error::DimensionMismatch {
                expected: v.len() - 1,
                found: a.len(),
            });
        }
        if a.iter().any(|x| !(*x > 0.0) || !x.is_finite()) || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("a", "off-diagonal entries must be positive and finite"));
        }
        Ok(Self {
            tag: tag.into(),
            a,
            v,
        })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.a
    }

    pub fn potential(&self) -> &[f64] {
        &self.v
    }

    /// `a_n` for 1-based `n`, with the convention `a_0 = a_N = 1`.
    pub fn a_at(&self, n: usize) -> f64 {
        if n == 0 || n > self.a.len() {
            1.0
        } else {
            self.a[n - 1]
        }
    }

    /// `v_n` for 1-based `n`.
    pub fn v_at(&self, n: usize) -> f64 {
        self.v[n - 1]
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.v[i] * x[i];
                if i + 1 < n {
                    s += self.a[i] * x[i + 1];
                }
                if i > 0 {
                    s += self.a[i - 1] * x[i - 1];
                }
                s
            })
            .collect()
    }

    pub(crate) fn apply_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = x[i] * self.v[i];
            if i + 1 < n {
                s += x[i + 1] * self.a[i];
            }
            if i > 0 {
                s += x[i - 1] * self.a[i - 1];
            }
            y[i] = s;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.v[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.a[i];
                m[(i + 1, i)] = self.a[i];
            }
        }
        m
    }

    pub(crate) fn gershgorin_bound(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.a[i - 1] } else { 0.0 };
                let right = self.a.get(i).copied().unwrap_or(0.0);
                self.v[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

fn check_min(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::size("Jacobi operator", format!("N = {n} < 4")));
    }
    Ok(())
}

/// Wigner–von Neumann type potential with an embedded zero eigenvalue.
pub fn build_wvn_schrodinger(n: usize) -> Result<JacobiOperator> {
    check_min(n)?;
    let v = (1..=n)
        .map(|k| {
            let kf = k as f64;
            if k == 1 {
                -1.0
            } else if k % 2 == 0 {
                -2.0 / (kf + 2.0)
            } else {
                2.0 / (kf - 1.0)
            }
        })
        .collect();
    JacobiOperator::new(format!("wvn-{n}"), vec![1.0; n - 1], v)
}

/// Truncated zero mode `u_{2n−1} = u_{2n} = (−1)^n / n` (unnormalized).
///
/// Indexed against the ladder `λ_n = n` of length `N`.
pub fn wvn_zero_mode(n: usize) -> Result<SpectralState> {
    check_min(n)?;
    if n % 2 == 1 {
        return Err(Error::size("zero mode", format!("N = {n} must be even")));
    }
    let coeffs = (0..n)
        .map(|i| {
            let pair = (i / 2 + 1) as f64;
            let sign = if (i / 2) % 2 == 0 { -1.0 } else { 1.0 };
            Complex64::new(sign / pair, 0.0)
        })
        .collect();
    Ok(SpectralState::with_basis(&format!("diag-n-{n}"), coeffs))
}

pub fn build_free_jacobi(n: usize) -> Result<JacobiOperator> {
    if n < 2 {
        return Err(Error::size("Jacobi operator", format!("N = {n} < 2")));
    }
    JacobiOperator::new(format!("free-jacobi-{n}"), vec![1.0; n - 1], vec![0.0; n])
}

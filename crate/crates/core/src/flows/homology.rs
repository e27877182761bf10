use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Denominators below this magnitude are treated as resonances.
pub const RESONANCE_FLOOR: f64 = 1e-300;

/// Trigonometric polynomial `Σ_{|k|≤K} c_k e^{2πikξ}` on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleSeries {
    k_max: usize,
    coeffs: Vec<Complex64>,
}

impl CircleSeries {
    pub fn zeros(k_max: usize) -> Self {
        Self {
            k_max,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * k_max + 1],
        }
    }

    pub fn constant(c: f64, k_max: usize) -> Self {
        let mut s = Self::zeros(k_max);
        s.set(0, Complex64::new(c, 0.0));
        s
    }

    pub fn from_coeffs(k_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * k_max + 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * k_max + 1,
                found: coeffs.len(),
            });
        }
        Ok(Self { k_max, coeffs })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(k + self.k_max as i64) as usize]
    }

    pub fn set(&mut self, k: i64, c: Complex64) {
        let i = (k + self.k_max as i64) as usize;
        self.coeffs[i] = c;
    }

    /// Add `a cos(2πfξ)`.
    pub fn add_cosine(&mut self, f: i64, a: f64) {
        let half = Complex64::new(0.5 * a, 0.0);
        self.set(f, self.get(f) + half);
        self.set(-f, self.get(-f) + half);
    }

    /// Nonzero modes `(k, c_k)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let kk = self.k_max as i64;
        (-kk..=kk)
            .map(move |k| (k, self.get(k)))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        self.terms()
            .map(|(k, c)| c * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * xi))
            .sum()
    }

    /// Derivative `Σ 2πik c_k e^{2πikξ}`.
    pub fn eval_derivative(&self, xi: f64) -> Complex64 {
        self.terms()
            .map(|(k, c)| {
                c * Complex64::new(0.0, 2.0 * PI * k as f64)
                    * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * xi)
            })
            .sum()
    }

    pub fn reality_defect(&self) -> f64 {
        let kk = self.k_max as i64;
        (0..=kk)
            .map(|k| (self.get(k) - self.get(-k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `(Σ 4π²k²|c_k|²)^{1/2}`.
    pub fn h1_norm(&self) -> f64 {
        self.terms()
            .map(|(k, c)| 4.0 * PI * PI * (k * k) as f64 * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn truncated(&self, k_max: usize) -> Self {
        let mut s = Self::zeros(k_max);
        let kk = k_max.min(self.k_max) as i64;
        for k in -kk..=kk {
            s.set(k, self.get(k));
        }
        s
    }

    /// Minimum of the real part over `n` equispaced points.
    pub fn grid_min(&self, n: usize) -> f64 {
        (0..n)
            .map(|i| self.eval(i as f64 / n as f64).re)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologySolution {
    pub r: CircleSeries,
    /// `min_k |e^{2πikα} − 1|` over the solved modes.
    pub min_denominator: f64,
    pub min_denominator_k: i64,
    pub h1_norm: f64,
}

/// Solve `R(ξ+α) − R(ξ) = Q(ξ) − 1` mode by mode for `0 < |k| ≤ K`.
pub fn solve_homology(q: &CircleSeries, alpha: f64, k_max: usize) -> Result<HomologySolution> {
    if (q.get(0) - 1.0).norm() > 1e-12 {
        return Err(Error::Precondition(format!(
            "Q must have unit mean, found Q_0 = {}",
            q.get(0)
        )));
    }
    let mut r = CircleSeries::zeros(k_max);
    let mut min_denominator = f64::INFINITY;
    let mut min_k = 0;
    for k in 1..=k_max as i64 {
        let mag = 2.0 * (PI * k as f64 * alpha).sin().abs();
        if mag < min_denominator {
            min_denominator = mag;
            min_k = k;
        }
        for kk in [k, -k] {
            let qk = q.get(kk);
            if qk == Complex64::new(0.0, 0.0) {
                continue;
            }
            if mag < RESONANCE_FLOOR {
                return Err(Error::ResonantDenominator {
                    k: kk,
                    denominator: mag,
                });
            }
            let denom = Complex64::from_polar(1.0, 2.0 * PI * kk as f64 * alpha) - 1.0;
            r.set(kk, qk / denom);
        }
    }
    let h1_norm = r.h1_norm();
    Ok(HomologySolution {
        r,
        min_denominator,
        min_denominator_k: min_k,
        h1_norm,
    })
}

/// `Σ_{n=1}^{5} 10^{−n!}`; the tail beyond `n = 5` is below double precision.
pub fn default_alpha() -> f64 {
    [1u32, 2, 6, 24, 120]
        .iter()
        .map(|&e| 10f64.powi(-(e as i32)))
        .sum()
}

/// `1 + c Σ_j 2^{−j} cos(2π f_j ξ)` for `j = 1, 2, ...`.
pub fn lacunary_q(c: f64, frequencies: &[usize]) -> CircleSeries {
    let k_max = frequencies.iter().copied().max().unwrap_or(0);
    let mut q = CircleSeries::constant(1.0, k_max);
    for (j, &f) in frequencies.iter().enumerate() {
        q.add_cosine(f as i64, c * 0.5f64.powi(j as i32 + 1));
    }
    q
}

/// Frequencies `2^{j!}` for `j = 1..=terms`.
pub fn factorial_lacunary_q(c: f64, terms: usize) -> CircleSeries {
    let mut fact = 1usize;
    let freqs: Vec<usize> = (1..=terms)
        .map(|j| {
            fact *= j;
            1usize << fact
        })
        .collect();
    lacunary_q(c, &freqs)
}

/// Frequencies `3, 9, 27` with `c = 0.3`, so `min Q ≥ 0.7375`.
pub fn default_q() -> CircleSeries {
    lacunary_q(0.3, &[3, 9, 27])
}

use super::CircleSeries;
use crate::error::{Error, Result};
use crate::linalg::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `(y − a)^p (b − y)^p` on `[a, b]`, scaled to unit integral, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
    pub power: u32,
}

impl Default for Bump {
    fn default() -> Self {
        Self {
            a: 0.1,
            b: 0.9,
            power: 6,
        }
    }
}

impl Bump {
    /// `∫ (y−a)^p (b−y)^p dy = (b−a)^{2p+1} (p!)² / (2p+1)!`.
    fn raw_integral(&self) -> f64 {
        let p = self.power as usize;
        let mut ratio = 1.0;
        for i in 1..=p {
            ratio *= i as f64 / (p + i) as f64;
        }
        (self.b - self.a).powi(2 * p as i32 + 1) * ratio / (2 * p + 1) as f64
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= self.a || y >= self.b {
            return 0.0;
        }
        ((y - self.a) * (self.b - y)).powi(self.power as i32) / self.raw_integral()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.a && self.a < self.b && self.b < 1.0) || self.power < 2 {
            return Err(Error::param(
                "psi",
                "bump needs 0 < a < b < 1 and power >= 2",
            ));
        }
        Ok(())
    }
}

/// Marginal data of a density at one `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    /// `F̄(x) = ∫₀¹ F(x, z) dz`.
    pub fbar: f64,
    pub dfbar: f64,
    /// `p(x) = ∫₀^x F̄`.
    pub p: f64,
}

/// A positive unit-mass density on T² transported by `w = (α/F, 1/F)`.
pub trait Density: Sync {
    fn alpha(&self) -> f64;
    fn value(&self, x: f64, y: f64) -> f64;
    fn dx(&self, x: f64, y: f64) -> f64;
    fn marginal(&self, x: f64) -> Marginal;
    /// Interior `y` values where the density is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `F ≡ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformDensity {
    pub alpha: f64,
}

impl Density for UniformDensity {
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn value(&self, _: f64, _: f64) -> f64 {
        1.0
    }
    fn dx(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn marginal(&self, x: f64) -> Marginal {
        Marginal {
            fbar: 1.0,
            dfbar: 0.0,
            p: x,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecWire {
    alpha: f64,
    q: CircleSeries,
    psi: Bump,
    m: f64,
}

/// `F(x, y) = m + ψ(y)(Q(x − αy) − m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecWire", into = "SpecWire")]
pub struct TimeChangedFlowSpec {
    pub alpha: f64,
    pub q: CircleSeries,
    pub psi: Bump,
    pub m: f64,
    /// `Ψ_k = ∫ψ(z) e^{−2πikαz} dz` for `k = 0..=K`.
    psi_hat: Vec<Complex64>,
    /// Nonzero `(2πk, Q_k)` for `k > 0`.
    q_pos: Vec<(f64, Complex64)>,
}

impl TryFrom<SpecWire> for TimeChangedFlowSpec {
    type Error = Error;
    fn try_from(w: SpecWire) -> Result<Self> {
        Self::new(w.alpha, w.q, w.psi, w.m)
    }
}

impl From<TimeChangedFlowSpec> for SpecWire {
    fn from(s: TimeChangedFlowSpec) -> Self {
        Self {
            alpha: s.alpha,
            q: s.q,
            psi: s.psi,
            m: s.m,
        }
    }
}

impl TimeChangedFlowSpec {
    pub fn new(alpha: f64, q: CircleSeries, psi: Bump, m: f64) -> Result<Self> {
        psi.validate()?;
        if (q.get(0) - 1.0).norm() > 1e-12 {
            return Err(Error::param("q", "Q must have unit mean"));
        }
        if q.reality_defect() > 1e-14 {
            return Err(Error::param("q", "Q must be real"));
        }
        let q_min = q.grid_min(8192.max(16 * q.k_max()));
        if !(m > 0.0 && m < q_min) {
            return Err(Error::param(
                "m",
                format!("need 0 < m < min Q = {q_min:.6}, got {m}"),
            ));
        }
        let rule = GaussLegendre::new(16);
        let nodes = rule.points(psi.a, psi.b, 32);
        let mass: f64 = nodes.iter().map(|&(z, w)| w * psi.eval(z)).sum();
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::param("psi", format!("bump integral {mass} is not 1")));
        }
        let psi_hat = (0..=q.k_max() as i64)
            .map(|k| {
                nodes
                    .iter()
                    .map(|&(z, w)| Complex64::from_polar(w * psi.eval(z), -2.0 * PI * k as f64 * alpha * z))
                    .sum()
            })
            .collect();
        let q_pos = q
            .terms()
            .filter(|(k, _)| *k > 0)
            .map(|(k, c)| (2.0 * PI * k as f64, c))
            .collect();
        Ok(Self {
            alpha,
            q,
            psi,
            m,
            psi_hat,
            q_pos,
        })
    }

    /// Default construction with `m = min Q / 2`.
    pub fn with_default_m(alpha: f64, q: CircleSeries, psi: Bump) -> Result<Self> {
        let m = 0.5 * q.grid_min(8192.max(16 * q.k_max()));
        Self::new(alpha, q, psi, m)
    }

    /// `Q(ξ) − 1` and `Q'(ξ)` for real `Q`.
    fn q_fluct(&self, xi: f64) -> (f64, f64) {
        let (mut v, mut d) = (0.0, 0.0);
        for &(w, c) in &self.q_pos {
            let (s, co) = (w * xi).sin_cos();
            v += 2.0 * (c.re * co - c.im * s);
            d -= 2.0 * w * (c.re * s + c.im * co);
        }
        (v, d)
    }

    fn psi_hat(&self, k: i64) -> Complex64 {
        let c = self.psi_hat[k.unsigned_abs() as usize];
        if k < 0 {
            c.conj()
        } else {
            c
        }
    }
}

impl Density for TimeChangedFlowSpec {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        let s = self.psi.eval(y);
        if s == 0.0 {
            return self.m;
        }
        self.m + s * (1.0 + self.q_fluct(x - self.alpha * y).0 - self.m)
    }

    fn dx(&self, x: f64, y: f64) -> f64 {
        let s = self.psi.eval(y);
        if s == 0.0 {
            return 0.0;
        }
        s * self.q_fluct(x - self.alpha * y).1
    }

    fn marginal(&self, x: f64) -> Marginal {
        let mut fbar = 1.0;
        let mut dfbar = 0.0;
        let mut p = x;
        for (k, qk) in self.q.terms() {
            if k == 0 {
                continue;
            }
            let c = qk * self.psi_hat(k);
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x);
            let ik = Complex64::new(0.0, 2.0 * PI * k as f64);
            fbar += (c * e).re;
            dfbar += (c * ik * e).re;
            p += (c * (e - 1.0) / ik).re;
        }
        Marginal { fbar, dfbar, p }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.psi.a, self.psi.b]
    }
}

/// Samples `F(i₁/n, i₂/n)`, row-major in x.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub n: usize,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Midpoint-rule mass, spectrally accurate for smooth periodic `F`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / (self.n * self.n) as f64
    }
}

pub fn build_density_f<D: Density + ?Sized>(density: &D, n: usize) -> Result<DensityGrid> {
    let rows = crate::parallel::map_range(n, |i1| {
        let x = i1 as f64 / n as f64;
        (0..n)
            .map(|i2| density.value(x, i2 as f64 / n as f64))
            .collect::<Vec<f64>>()
    });
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::param(
            "F",
            format!("nonpositive density {v} at grid point {i}"),
        ));
    }
    Ok(DensityGrid { n, values })
}

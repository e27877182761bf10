use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use serde::{Deserialize, Serialize};

/// Which of `A` and `ε = 1/A` is given; the other is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `dφ/dt = (iAL − Γ)φ`.
    Amplitude(f64),
    /// `dφ/dt = (iL − εΓ)φ`.
    Epsilon(f64),
}

impl Scaling {
    pub fn amplitude(&self) -> f64 {
        match *self {
            Scaling::Amplitude(a) => a,
            Scaling::Epsilon(e) => 1.0 / e,
        }
    }

    pub fn epsilon(&self) -> f64 {
        match *self {
            Scaling::Amplitude(a) => 1.0 / a,
            Scaling::Epsilon(e) => e,
        }
    }

    /// Coefficient of `iL`.
    pub fn advection(&self) -> f64 {
        match *self {
            Scaling::Amplitude(a) => a,
            Scaling::Epsilon(_) => 1.0,
        }
    }

    /// Coefficient of `−Γ`.
    pub fn diffusion(&self) -> f64 {
        match *self {
            Scaling::Amplitude(_) => 1.0,
            Scaling::Epsilon(e) => e,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            Scaling::Amplitude(a) => ("amplitude", a),
            Scaling::Epsilon(e) => ("epsilon", e),
        };
        if !v.is_finite() || v < 0.0 {
            return Err(Error::param(name, format!("{v} must be finite and nonnegative")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DenseOracle,
    EigSplit,
    StrangRk4,
}

impl Method {
    /// Exact diagonal or eigen-split when possible, otherwise the dense oracle
    /// for small dense operators and RK4 splitting for matrix-free ones.
    pub fn auto(l: &OperatorHandle) -> Self {
        if l.is_diagonal() || l.eig().is_some() {
            Method::EigSplit
        } else if !l.is_matrix_free() && l.dim() <= super::ORACLE_MAX_DIM {
            Method::DenseOracle
        } else {
            Method::StrangRk4
        }
    }
}

/// Growth bound `B(t)` with `‖e^{iLt}ψ‖₁ ≤ B(t)‖ψ‖₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthBound {
    Unity,
    LipschitzExp { rate: f64 },
}

impl GrowthBound {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            GrowthBound::Unity => 1.0,
            GrowthBound::LipschitzExp { rate } => (rate * t).exp(),
        }
    }

    /// `∫₀^τ B(t)² dt`.
    pub fn integral_of_square(&self, tau: f64) -> f64 {
        match *self {
            GrowthBound::Unity => tau,
            GrowthBound::LipschitzExp { rate: 0.0 } => tau,
            GrowthBound::LipschitzExp { rate } => ((2.0 * rate * tau).exp() - 1.0) / (2.0 * rate),
        }
    }
}

fn default_stride() -> usize {
    1
}

fn default_cfl() -> f64 {
    1.0
}

fn default_bound() -> GrowthBound {
    GrowthBound::Unity
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub scaling: Scaling,
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    /// Full states are kept every `sample_stride` steps.
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    #[serde(default = "default_bound")]
    pub growth_bound: GrowthBound,
    /// Inner RK4 step limit `h·a·‖L‖ ≤ cfl`.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

impl EvolutionConfig {
    pub fn new(scaling: Scaling, t_end: f64, dt: f64, method: Method) -> Self {
        Self {
            scaling,
            t_end,
            dt,
            method,
            sample_stride: 1,
            growth_bound: GrowthBound::Unity,
            cfl: 1.0,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.scaling.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::param("t_end", format!("{} must be nonnegative", self.t_end)));
        }
        if self.sample_stride == 0 {
            return Err(Error::param("sample_stride", "must be at least 1"));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::param("cfl", "must be positive"));
        }
        Ok(())
    }

    /// Number of steps and the effective step `t_end / steps`.
    pub fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let n = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }
}

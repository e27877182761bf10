use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for temperatures just outside `[0, 1]`.
pub const RANGE_TOL: f64 = 1e-12;

/// `f(T) = rate · 4(T − θ₀)(1 − T)/(1 − θ₀)²` on `[θ₀, 1]`, zero below `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IgnitionNonlinearity {
    pub theta0: f64,
    /// Multiplier on the default shape; `0` switches the reaction off.
    #[serde(default = "unit")]
    pub rate: f64,
}

fn unit() -> f64 {
    1.0
}

impl IgnitionNonlinearity {
    pub fn new(theta0: f64) -> Result<Self> {
        Self::with_rate(theta0, 1.0)
    }

    pub fn with_rate(theta0: f64, rate: f64) -> Result<Self> {
        let f = Self { theta0, rate };
        f.validate()?;
        Ok(f)
    }

    pub fn inert(theta0: f64) -> Result<Self> {
        Self::with_rate(theta0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta0 > 0.0 && self.theta0 < 1.0) {
            return Err(Error::param("theta0", "must lie in (0, 1)"));
        }
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(Error::param("rate", "must be finite and nonnegative"));
        }
        Ok(())
    }

    pub fn is_inert(&self) -> bool {
        self.rate == 0.0
    }

    /// Lipschitz constant on `[0, 1]`, attained at `θ₀`.
    pub fn lipschitz(&self) -> f64 {
        4.0 * self.rate / (1.0 - self.theta0)
    }

    /// `sup f(T)/T`, attained at `T = √θ₀`.
    pub fn ratio_bound(&self) -> f64 {
        4.0 * self.rate / (1.0 + self.theta0.sqrt()).powi(2)
    }

    /// Shape continued polynomially above `1` so stage values slightly out of range stay smooth.
    pub(crate) fn eval_extended(&self, t: f64) -> f64 {
        if t <= self.theta0 {
            0.0
        } else {
            let d = 1.0 - self.theta0;
            self.rate * 4.0 * (t - self.theta0) * (1.0 - t) / (d * d)
        }
    }
}

/// `f(T)` for `T ∈ [0, 1]`.
pub fn ignition_eval(f: &IgnitionNonlinearity, t: f64) -> Result<f64> {
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&t) {
        return Err(Error::param("T", format!("{t} outside [0, 1]")));
    }
    Ok(f.eval_extended(t.clamp(0.0, 1.0)))
}

use super::QuenchTrajectory;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Slack for the pointwise comparison `T ≤ e^{ct} φ`.
pub const COMPARISON_SLACK: f64 = 1e-8;
/// Allowed rise of `sup T` after a quench verdict.
pub const FINALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Balance {
    /// `max_t |∫T(t) − ∫T(0) − ∫₀ᵗ∫f| / ∫T(0)` with trapezoid time quadrature.
    pub residual: f64,
    /// Largest drop of `∫T` between consecutive samples.
    pub max_decrease: f64,
}

impl L1Balance {
    pub fn nondecreasing(&self, tol: f64) -> bool {
        self.max_decrease <= tol
    }
}

pub fn l1_balance_residual(traj: &QuenchTrajectory) -> L1Balance {
    let s = &traj.samples;
    let scale = s.first().map_or(1.0, |x| x.int_t.abs()).max(f64::MIN_POSITIVE);
    let mut cum = 0.0;
    let mut residual: f64 = 0.0;
    let mut max_decrease: f64 = 0.0;
    for w in s.windows(2) {
        cum += 0.5 * (w[1].t - w[0].t) * (w[0].int_f + w[1].int_f);
        residual = residual.max((w[1].int_t - s[0].int_t - cum).abs());
        max_decrease = max_decrease.max(w[0].int_t - w[1].int_t);
    }
    L1Balance {
        residual: residual / scale,
        max_decrease,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub c: f64,
    /// `max (T − e^{ct} φ)` over samples and grid points.
    pub worst_excess: f64,
    pub worst_time: f64,
    pub pass: bool,
}

/// Pointwise `T ≤ e^{ct} φ + slack` at every common sample.
pub fn comparison_bound_check(
    reacting: &QuenchTrajectory,
    linear: &QuenchTrajectory,
    c: f64,
) -> Result<ComparisonReport> {
    if reacting.fields.is_empty() || reacting.fields.len() != linear.fields.len() {
        return Err(Error::Precondition(
            "both trajectories need grid snapshots at the same samples".into(),
        ));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_time = 0.0;
    for ((s, a), (r, b)) in reacting
        .samples
        .iter()
        .zip(&reacting.fields)
        .zip(linear.samples.iter().zip(&linear.fields))
    {
        if (s.t - r.t).abs() > 1e-12 * s.t.max(1.0) || a.len() != b.len() {
            return Err(Error::Precondition("sample times or grids differ".into()));
        }
        let g = (c * s.t).exp();
        let e = a
            .iter()
            .zip(b)
            .map(|(t, p)| t - g * p)
            .fold(f64::NEG_INFINITY, f64::max);
        if e > worst {
            worst = e;
            worst_time = s.t;
        }
    }
    Ok(ComparisonReport {
        c,
        worst_excess: worst,
        worst_time,
        pass: worst <= COMPARISON_SLACK,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum QuenchVerdict {
    Quenched { t_q: f64 },
    Burning { t_max: f64 },
}

impl QuenchVerdict {
    pub fn is_quenched(&self) -> bool {
        matches!(self, QuenchVerdict::Quenched { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchReport {
    pub verdict: QuenchVerdict,
    /// Whether `sup T` stayed nonincreasing after the quench sample.
    pub final_ok: bool,
}

/// First sample with `sup T ≤ θ₀`.
pub fn quench_detector(traj: &QuenchTrajectory, theta0: f64) -> QuenchReport {
    let s = &traj.samples;
    match s.iter().position(|x| x.sup_t <= theta0) {
        Some(i) => QuenchReport {
            verdict: QuenchVerdict::Quenched { t_q: s[i].t },
            final_ok: s[i..].windows(2).all(|w| w[1].sup_t <= w[0].sup_t + FINALITY_TOL),
        },
        None => QuenchReport {
            verdict: QuenchVerdict::Burning {
                t_max: s.last().map_or(0.0, |x| x.t),
            },
            final_ok: true,
        },
    }
}

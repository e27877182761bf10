use super::{free_evolve, GrowthBound, Method, Propagator, Scaling};
use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use crate::spectral::{norm_sqr, GammaLadder, SpectralState};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub times: Vec<f64>,
    /// `‖φ^ε(t) − φ⁰(t)‖²` at each sample.
    pub gaps: Vec<f64>,
    /// Running maximum of `gaps`.
    pub running_max: Vec<f64>,
    pub measured: f64,
    /// `(ε/2)‖φ₀‖₁² ∫₀^τ B²`.
    pub bound: f64,
    /// Whether `B` is known to hold exactly for this operator.
    pub exact_bound: bool,
}

/// Compare the damped rescaled evolution with the free one on `[0, τ]`.
pub fn free_vs_damped_gap(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    epsilon: f64,
    tau: f64,
    phi0: &SpectralState,
    growth: GrowthBound,
    samples: usize,
) -> Result<GapReport> {
    l.check(phi0)?;
    l.check_ladder(ladder)?;
    if samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    let exact_bound = matches!(growth, GrowthBound::Unity) && l.commutes_with_gamma();
    if matches!(growth, GrowthBound::Unity) && !l.commutes_with_gamma() {
        return Err(Error::Precondition(format!(
            "growth bound `unity` is only valid for generators preserving H¹ norms; `{}` does not",
            l.tag()
        )));
    }
    let h1_sq = ladder.weighted_sqr(phi0.coeffs(), 1.0);
    let bound = 0.5 * epsilon * h1_sq * growth.integral_of_square(tau);

    let method = Method::auto(l);
    let h = tau / samples as f64;
    let dt = h / (h / 1e-3).ceil().max(1.0);
    let mut prop = Propagator::new(l, ladder, Scaling::Epsilon(epsilon), method, dt, 1.0)?;
    let mut damped = phi0.coeffs().to_vec();

    let mut report = GapReport {
        times: vec![0.0],
        gaps: vec![0.0],
        running_max: vec![0.0],
        measured: 0.0,
        bound,
        exact_bound,
    };
    for s in 1..=samples {
        let t = s as f64 * h;
        let free = free_evolve(l, t, phi0)?;
        let gap = if epsilon == 0.0 {
            0.0
        } else {
            prop.advance(&mut damped, h)?;
            let diff: Vec<_> = damped.iter().zip(free.coeffs()).map(|(a, b)| a - b).collect();
            norm_sqr(&diff)
        };
        report.times.push(t);
        report.gaps.push(gap);
        report.measured = report.measured.max(gap);
        report.running_max.push(report.measured);
    }
    if exact_bound && report.measured > bound * (1.0 + 1e-6) {
        return Err(Error::BoundViolated {
            measured: report.measured,
            bound,
        });
    }
    Ok(report)
}

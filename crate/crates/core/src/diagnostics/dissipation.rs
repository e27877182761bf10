use crate::engine::{Method, Propagator, Scaling};
use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use crate::parallel;
use crate::spectral::{norm_sqr, GammaLadder, SpectralState};
use serde::{Deserialize, Serialize};

/// Relative bracket width at which bisection stops.
pub const BISECTION_RTOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DissipationTime {
    Reached { tau: f64 },
    NotReached { t_max: f64 },
}

impl DissipationTime {
    pub fn tau(&self) -> Option<f64> {
        match *self {
            DissipationTime::Reached { tau } => Some(tau),
            DissipationTime::NotReached { .. } => None,
        }
    }
}

/// Time budget and sampling for [`dissipation_time`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayBudget {
    /// Horizon; `None` uses `1.01·ln(1/δ)/λ₁`, which always suffices because
    /// `‖φ(t)‖ ≤ e^{−λ₁t}‖φ₀‖`.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub method: Option<Method>,
    /// Step for splitting methods.
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_samples() -> usize {
    256
}

fn default_dt() -> f64 {
    1e-3
}

impl Default for DecayBudget {
    fn default() -> Self {
        Self {
            t_max: None,
            samples: default_samples(),
            method: None,
            dt: default_dt(),
        }
    }
}

fn method_for(l: &OperatorHandle, requested: Option<Method>) -> Method {
    requested.unwrap_or_else(|| {
        if l.is_diagonal() {
            Method::EigSplit
        } else if !l.is_matrix_free() && l.dim() <= crate::engine::ORACLE_MAX_DIM {
            Method::DenseOracle
        } else {
            Method::auto(l)
        }
    })
}

/// First time with `‖φ^A(t)‖ ≤ δ‖φ₀‖`: sampled, then bisected to 1e−3
/// relative, then interpolated log-linearly inside the final bracket.
pub fn dissipation_time(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    amplitude: f64,
    delta: f64,
    phi0: &SpectralState,
    budget: &DecayBudget,
) -> Result<DissipationTime> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} outside (0, 1)")));
    }
    if budget.samples == 0 {
        return Err(Error::param("samples", "must be positive"));
    }
    l.check(phi0)?;
    let n0 = phi0.norm();
    if n0 == 0.0 {
        return Err(Error::Degenerate("initial state has zero norm".into()));
    }
    let target = delta * n0;
    let t_max = budget
        .t_max
        .unwrap_or(1.01 * (1.0 / delta).ln() / ladder.first());
    let method = method_for(l, budget.method);
    let mut prop = Propagator::new(l, ladder, Scaling::Amplitude(amplitude), method, budget.dt, 1.0)?;

    let h = t_max / budget.samples as f64;
    let mut lo = (0.0, phi0.coeffs().to_vec(), n0);
    let mut hi = None;
    for s in 1..=budget.samples {
        let mut x = lo.1.clone();
        prop.advance(&mut x, h)?;
        let n = norm_sqr(&x).sqrt();
        let t = s as f64 * h;
        if n <= target {
            hi = Some((t, n));
            break;
        }
        if n > lo.2 * (1.0 + 1e-12) {
            return Err(Error::Invariant(format!(
                "norm increased from {:.6e} to {n:.6e} at t = {t}",
                lo.2
            )));
        }
        lo = (t, x, n);
    }
    let Some(mut hi) = hi else {
        return Ok(DissipationTime::NotReached { t_max });
    };
    while hi.0 - lo.0 > BISECTION_RTOL * hi.0 {
        let mid = 0.5 * (lo.0 + hi.0);
        let mut x = lo.1.clone();
        prop.advance(&mut x, mid - lo.0)?;
        let n = norm_sqr(&x).sqrt();
        if n <= target {
            hi = (mid, n);
        } else {
            lo = (mid, x, n);
        }
    }
    let (l0, l1) = (lo.2.ln(), hi.1.ln());
    let tau = if l1 < l0 {
        lo.0 + (target.ln() - l0) / (l1 - l0) * (hi.0 - lo.0)
    } else {
        hi.0
    };
    Ok(DissipationTime::Reached {
        tau: tau.clamp(lo.0, hi.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub amplitude: f64,
    pub result: DissipationTime,
}

/// `(A, τ_δ)` pairs for one operator and initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub operator: String,
    pub ladder: String,
    pub dim: usize,
    pub delta: f64,
    pub points: Vec<DecayPoint>,
}

impl DecayCurve {
    pub fn taus(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.result.tau()).collect()
    }

    /// Whether every reached `τ_δ` is no larger than the previous one.
    pub fn is_nonincreasing(&self) -> bool {
        let taus: Vec<f64> = self.taus().into_iter().flatten().collect();
        taus.len() == self.points.len() && taus.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Dissipation times over a strictly increasing amplitude grid, in parallel.
pub fn decay_curve(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    amplitudes: &[f64],
    delta: f64,
    phi0: &SpectralState,
    budget: &DecayBudget,
) -> Result<DecayCurve> {
    if amplitudes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("amplitudes", "must be strictly increasing"));
    }
    let results = parallel::map_slice(amplitudes, |_, &a| {
        dissipation_time(l, ladder, a, delta, phi0, budget)
    });
    let points = amplitudes
        .iter()
        .zip(results)
        .map(|(&amplitude, r)| r.map(|result| DecayPoint { amplitude, result }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayCurve {
        operator: l.tag().to_string(),
        ladder: ladder.label().to_string(),
        dim: l.dim(),
        delta,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_heat_closed_form() {
        let ladder = GammaLadder::linear(8).unwrap();
        let l = OperatorHandle::diagonal("zero", &ladder, vec![0.0; 8]).unwrap();
        for j in [1usize, 3, 8] {
            let phi = SpectralState::basis_vector(&ladder, j).unwrap();
            let t = dissipation_time(&l, &ladder, 0.0, 0.5, &phi, &DecayBudget::default()).unwrap();
            let want = 2f64.ln() / j as f64;
            assert!((t.tau().unwrap() - want).abs() < 1e-6 * want, "{t:?}");
        }
    }

    #[test]
    fn short_budget_yields_sentinel() {
        let ladder = GammaLadder::linear(4).unwrap();
        let l = OperatorHandle::diagonal("zero", &ladder, vec![0.0; 4]).unwrap();
        let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
        let budget = DecayBudget {
            t_max: Some(0.1),
            ..DecayBudget::default()
        };
        let t = dissipation_time(&l, &ladder, 0.0, 0.5, &phi, &budget).unwrap();
        assert_eq!(t, DissipationTime::NotReached { t_max: 0.1 });
    }

    #[test]
    fn smaller_delta_takes_longer() {
        let ladder = GammaLadder::linear(6).unwrap();
        let l = OperatorHandle::diagonal("d", &ladder, vec![0.3, -1.0, 2.0, 0.0, 1.0, 0.5]).unwrap();
        let phi = SpectralState::from_real(&ladder, &[0.6, 0.0, 0.0, 0.8, 0.0, 0.0]).unwrap();
        let b = DecayBudget::default();
        let t1 = dissipation_time(&l, &ladder, 5.0, 0.5, &phi, &b).unwrap().tau().unwrap();
        let t2 = dissipation_time(&l, &ladder, 5.0, 0.25, &phi, &b).unwrap().tau().unwrap();
        assert!(t2 >= t1);
    }
}

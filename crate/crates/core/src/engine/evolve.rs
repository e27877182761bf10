use super::propagator::{rk4_step, unitary_exact, RK4_GROWTH_TOL};
use super::{EnergyLedger, EvolutionConfig, Propagator};
use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use crate::spectral::{norm_sqr, GammaLadder, SpectralState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Step cap for [`evolve_adaptive`].
pub const ADAPTIVE_STEP_CAP: usize = 1 << 20;

/// Adaptive refinement stops once the ledger residual per unit time is below this.
pub const ADAPTIVE_TARGET: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norm_l2: Vec<f64>,
    pub norm_h1: Vec<f64>,
    pub norm_hminus1: Vec<f64>,
    /// Running ledger residual at each step.
    pub energy_residual: Vec<f64>,
    /// Full states every `sample_stride` steps, plus the initial and final ones.
    pub states: Vec<(f64, SpectralState)>,
    pub ledger: EnergyLedger,
    /// Effective step `t_end / steps`.
    pub dt: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &SpectralState {
        &self.states.last().expect("trajectory holds the initial state").1
    }
}

/// Integrate from `φ₀` over `[0, t_end]` with the configured method.
pub fn evolve(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    cfg: &EvolutionConfig,
    phi0: &SpectralState,
) -> Result<Trajectory> {
    cfg.validate()?;
    l.check(phi0)?;
    ladder.check(phi0)?;
    if phi0.norm() == 0.0 {
        return Err(Error::Degenerate("initial state has zero norm".into()));
    }
    let (steps, dt) = cfg.steps();
    let mut prop = Propagator::new(l, ladder, cfg.scaling, cfg.method, dt, cfg.cfl)?;
    let mut x = phi0.coeffs().to_vec();

    let lambdas = ladder;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        norm_l2: Vec::with_capacity(steps + 1),
        norm_h1: Vec::with_capacity(steps + 1),
        norm_hminus1: Vec::with_capacity(steps + 1),
        energy_residual: Vec::with_capacity(steps + 1),
        states: vec![(0.0, phi0.clone())],
        ledger: EnergyLedger::new(
            cfg.scaling.diffusion(),
            0.0,
            norm_sqr(&x),
            lambdas.weighted_sqr(&x, 1.0),
        ),
        dt,
    };
    let record = |traj: &mut Trajectory, t: f64, x: &[Complex64], push: bool| {
        let l2 = norm_sqr(x);
        let h1 = lambdas.weighted_sqr(x, 1.0);
        if push {
            traj.ledger.push(t, l2, h1);
        }
        traj.times.push(t);
        traj.norm_l2.push(l2.sqrt());
        traj.norm_h1.push(h1.sqrt());
        traj.norm_hminus1.push(lambdas.weighted_sqr(x, -1.0).sqrt());
        let i = traj.ledger.len() - 1;
        traj.energy_residual.push(traj.ledger.residual_at(i));
    };
    record(&mut traj, 0.0, &x, false);

    for s in 1..=steps {
        prop.step(&mut x, dt)?;
        if x.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invariant(format!("non-finite state at step {s}")));
        }
        let t = if s == steps { cfg.t_end } else { s as f64 * dt };
        record(&mut traj, t, &x, true);
        if s % cfg.sample_stride == 0 || s == steps {
            traj.states.push((t, phi0.clone().with_coeffs(x.clone())));
        }
    }
    Ok(traj)
}

/// Halve `dt` until the ledger residual per unit time drops below 1e−7.
pub fn evolve_adaptive(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    cfg: &EvolutionConfig,
    phi0: &SpectralState,
) -> Result<Trajectory> {
    let mut c = cfg.clone();
    loop {
        if c.steps().0 > ADAPTIVE_STEP_CAP {
            return Err(Error::StepBudget(ADAPTIVE_STEP_CAP));
        }
        let traj = evolve(l, ladder, &c, phi0)?;
        if traj.ledger.residual_per_unit_time() < ADAPTIVE_TARGET {
            return Ok(traj);
        }
        c.dt *= 0.5;
    }
}

/// `e^{iLt} φ₀`: exact through the eigensystem when available, otherwise
/// renormalized RK4 at unit CFL.
pub fn free_evolve(l: &OperatorHandle, t: f64, phi0: &SpectralState) -> Result<SpectralState> {
    l.check(phi0)?;
    let mut x = phi0.coeffs().to_vec();
    if t == 0.0 {
        return Ok(phi0.clone());
    }
    if l.is_diagonal() || l.eig().is_some() {
        unitary_exact(l, &mut x, t);
        return Ok(phi0.clone().with_coeffs(x));
    }
    let theta = t.abs() * l.norm_bound();
    let inner = theta.ceil().max(1.0) as usize;
    let k = t / inner as f64;
    let norm0 = norm_sqr(&x).sqrt();
    let mut scratch = vec![vec![Complex64::new(0.0, 0.0); x.len()]; 5];
    for _ in 0..inner {
        let before = norm_sqr(&x).sqrt();
        rk4_step(l, &mut x, k, &mut scratch);
        let after = norm_sqr(&x).sqrt();
        if before > 0.0 && after > before * (1.0 + RK4_GROWTH_TOL) {
            return Err(Error::StepSize {
                growth: after / before,
            });
        }
    }
    let norm1 = norm_sqr(&x).sqrt();
    if norm1 > 0.0 {
        x.iter_mut().for_each(|c| *c *= norm0 / norm1);
    }
    Ok(phi0.clone().with_coeffs(x))
}

use super::ignition::{IgnitionNonlinearity, RANGE_TOL};
use crate::engine::{Method, Propagator, Scaling, ORACLE_MAX_DIM};
use crate::error::{Error, Result};
use crate::fourier::Fft2;
use crate::operators::{build_advection_generator, build_constant_flow_generator, collocation_size, OperatorHandle, VelocityField};
use crate::spectral::{GammaLadder, SpectralState, TorusLattice};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Linear part `−A u·∇ + Δ` on a torus lattice plus the grid for the reaction.
pub struct ReactionSystem {
    lattice: TorusLattice,
    ladder: GammaLadder,
    l: OperatorHandle,
    method: Method,
    amplitude: f64,
    fft: Fft2,
    slots: Vec<usize>,
}

impl ReactionSystem {
    /// Dense exact linear steps when the lattice is small enough, matrix-free RK4 otherwise.
    pub fn new(u: &VelocityField, k_max: usize, amplitude: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::param("amplitude", "must be finite and nonnegative"));
        }
        let lattice = TorusLattice::new(k_max);
        let ladder = GammaLadder::torus(&lattice);
        let still = amplitude == 0.0 || u.sup_bound() == 0.0;
        let (l, method) = if still {
            (build_constant_flow_generator([0.0, 0.0], k_max)?, Method::EigSplit)
        } else {
            let l = build_advection_generator(u, k_max)?;
            if l.dim() <= ORACLE_MAX_DIM {
                let dense = l.to_dense()?;
                (OperatorHandle::dense(l.tag().to_string(), &ladder, dense)?, Method::DenseOracle)
            } else {
                (l, Method::StrangRk4)
            }
        };
        let m = collocation_size(k_max, 0);
        let fft = Fft2::new(m);
        let slots = lattice.modes().iter().map(|&k| fft.slot(k)).collect();
        Ok(Self {
            lattice,
            ladder,
            l,
            method,
            amplitude,
            fft,
            slots,
        })
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn ladder(&self) -> &GammaLadder {
        &self.ladder
    }

    pub fn grid_size(&self) -> usize {
        self.fft.size()
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Truncated state from values sampled at `(i₁/M, i₂/M)`.
    pub fn state_from_fn(&self, f: impl Fn(f64, f64) -> f64) -> SpectralState {
        let m = self.grid_size();
        let mut g: Vec<Complex64> = (0..m * m)
            .map(|i| Complex64::new(f((i / m) as f64 / m as f64, (i % m) as f64 / m as f64), 0.0))
            .collect();
        self.fft.analyze(&mut g);
        let coeffs = self.slots.iter().map(|&s| g[s]).collect();
        SpectralState::from_coeffs(&self.ladder, coeffs)
            .expect("lattice-sized state")
            .with_mean(Complex64::new(g[0].re, 0.0))
    }

    /// Real grid values of a state.
    pub fn grid_values(&self, state: &SpectralState) -> Vec<f64> {
        self.synthesize(state.coeffs(), state.mean())
    }

    fn synthesize(&self, coeffs: &[Complex64], mean: Complex64) -> Vec<f64> {
        let m = self.grid_size();
        let mut g = vec![ZERO; m * m];
        g[0] = mean;
        for (&s, &c) in self.slots.iter().zip(coeffs) {
            g[s] = c;
        }
        self.fft.synthesize(&mut g);
        g.into_iter().map(|z| z.re).collect()
    }

    fn propagator(&self, dt: f64) -> Result<Propagator<'_>> {
        Propagator::new(&self.l, &self.ladder, Scaling::Amplitude(self.amplitude), self.method, dt, 1.0)
    }
}

/// Collocation temperature with its spectral mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionState {
    pub time: f64,
    pub spectral: SpectralState,
    pub grid: Vec<f64>,
}

fn check_range(values: &mut [f64], time: f64) -> Result<()> {
    for (i, v) in values.iter_mut().enumerate() {
        if !(*v >= -RANGE_TOL && *v <= 1.0 + RANGE_TOL) {
            return Err(Error::RangeViolation {
                value: *v,
                index: i,
                time,
            });
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(())
}

impl ReactionState {
    pub fn new(system: &ReactionSystem, spectral: SpectralState) -> Result<Self> {
        system.l.check(&spectral)?;
        let mut grid = system.grid_values(&spectral);
        check_range(&mut grid, 0.0)?;
        Ok(Self {
            time: 0.0,
            spectral,
            grid,
        })
    }

    /// Grid mean of `T`.
    pub fn integral(&self) -> f64 {
        self.spectral.mean().re
    }

    pub fn sup(&self) -> f64 {
        self.grid.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.grid.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Grid mean of `f(T)`.
    pub fn reaction_integral(&self, f: &IgnitionNonlinearity) -> f64 {
        self.grid.iter().map(|&t| f.eval_extended(t)).sum::<f64>() / self.grid.len() as f64
    }
}

fn rk4_pointwise(f: &IgnitionNonlinearity, t: f64, h: f64) -> f64 {
    let k1 = f.eval_extended(t);
    let k2 = f.eval_extended(t + 0.5 * h * k1);
    let k3 = f.eval_extended(t + 0.5 * h * k2);
    let k4 = f.eval_extended(t + h * k3);
    t + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Strang step: half linear step, pointwise RK4 reaction over `dt` with the
/// increment re-truncated to the lattice, half linear step.
pub fn react_step(
    system: &ReactionSystem,
    prop: &mut Propagator<'_>,
    state: &mut ReactionState,
    f: &IgnitionNonlinearity,
    dt: f64,
) -> Result<()> {
    prop.advance(state.spectral.coeffs_mut(), 0.5 * dt)?;
    if !f.is_inert() {
        let mut grid = system.synthesize(state.spectral.coeffs(), state.spectral.mean());
        check_range(&mut grid, state.time + 0.5 * dt)?;
        let mut inc: Vec<Complex64> = grid
            .iter()
            .map(|&t| Complex64::new(rk4_pointwise(f, t, dt) - t, 0.0))
            .collect();
        if inc.iter().any(|z| z.re != 0.0) {
            system.fft.analyze(&mut inc);
            for (c, &s) in state.spectral.coeffs_mut().iter_mut().zip(&system.slots) {
                *c += inc[s];
            }
            let mean = state.spectral.mean() + inc[0].re;
            state.spectral.set_mean(mean);
        }
    }
    prop.advance(state.spectral.coeffs_mut(), 0.5 * dt)?;
    state.time += dt;
    state.grid = system.grid_values(&state.spectral);
    check_range(&mut state.grid, state.time)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSample {
    pub t: f64,
    pub sup_t: f64,
    pub min_t: f64,
    pub int_t: f64,
    pub int_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Run to `t_end`.
    Never,
    /// Stop once `sup T ≤ θ₀` or `∫T > θ₀`, after which the verdict cannot change.
    OnVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub sample_stride: usize,
    #[serde(default = "never")]
    pub stop: StopRule,
    /// Keep grid snapshots at every sample.
    #[serde(default)]
    pub keep_fields: bool,
}

fn one() -> usize {
    1
}

fn never() -> StopRule {
    StopRule::Never
}

impl QuenchConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            sample_stride: 1,
            stop: StopRule::Never,
            keep_fields: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", "must be positive and finite"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::param("t_end", "must be nonnegative and finite"));
        }
        if self.sample_stride == 0 {
            return Err(Error::param("sample_stride", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchTrajectory {
    pub amplitude: f64,
    pub theta0: f64,
    pub dt: f64,
    pub grid: usize,
    pub samples: Vec<QuenchSample>,
    pub final_state: SpectralState,
    /// Grid snapshots aligned with `samples` when requested.
    #[serde(skip)]
    pub fields: Vec<Vec<f64>>,
}

fn sample(state: &ReactionState, f: &IgnitionNonlinearity) -> QuenchSample {
    QuenchSample {
        t: state.time,
        sup_t: state.sup(),
        min_t: state.min(),
        int_t: state.integral(),
        int_f: state.reaction_integral(f),
    }
}

/// Evolve `T_t + A u·∇T − ΔT = f(T)` from `t0`.
pub fn quench_run(
    system: &ReactionSystem,
    f: &IgnitionNonlinearity,
    t0: &SpectralState,
    cfg: &QuenchConfig,
) -> Result<QuenchTrajectory> {
    cfg.validate()?;
    f.validate()?;
    let mut state = ReactionState::new(system, t0.clone())?;
    let mut prop = system.propagator(cfg.dt)?;
    let n = (cfg.t_end / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let h = if n == 0 { 0.0 } else { cfg.t_end / n as f64 };
    let mut traj = QuenchTrajectory {
        amplitude: system.amplitude,
        theta0: f.theta0,
        dt: h,
        grid: system.grid_size(),
        samples: vec![sample(&state, f)],
        final_state: t0.clone(),
        fields: Vec::new(),
    };
    if cfg.keep_fields {
        traj.fields.push(state.grid.clone());
    }
    let decided = |s: &QuenchSample| s.sup_t <= f.theta0 || s.int_t > f.theta0;
    if cfg.stop == StopRule::OnVerdict && decided(&traj.samples[0]) {
        return Ok(traj);
    }
    for i in 1..=n {
        react_step(system, &mut prop, &mut state, f, h)?;
        state.time = i as f64 * h;
        if i % cfg.sample_stride == 0 || i == n {
            let s = sample(&state, f);
            traj.samples.push(s);
            if cfg.keep_fields {
                traj.fields.push(state.grid.clone());
            }
            if cfg.stop == StopRule::OnVerdict && decided(&s) {
                break;
            }
        }
    }
    traj.final_state = state.spectral;
    Ok(traj)
}

use super::{quench_detector, quench_run, IgnitionNonlinearity, QuenchConfig, QuenchVerdict, ReactionSystem, StopRule};
use crate::error::{Error, Result};
use crate::operators::VelocityField;
use crate::spectral::SpectralState;
use serde::{Deserialize, Serialize};

pub const DEFAULT_AMPLITUDE_GRID: [f64; 11] = [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub k_max: usize,
    pub a_max: f64,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_bisection")]
    pub bisection_steps: usize,
    pub run: QuenchConfig,
}

fn default_grid() -> Vec<f64> {
    DEFAULT_AMPLITUDE_GRID.to_vec()
}

fn default_bisection() -> usize {
    6
}

impl SearchConfig {
    pub fn new(k_max: usize, a_max: f64, run: QuenchConfig) -> Self {
        Self {
            k_max,
            a_max,
            grid: default_grid(),
            bisection_steps: default_bisection(),
            run,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub amplitude: f64,
    pub verdict: QuenchVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CriticalAmplitude {
    /// First quenching amplitude found, with the burning amplitude just below it.
    FirstQuench { a_star: f64, burning_below: Option<f64> },
    NoQuenchUpTo { a_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub result: CriticalAmplitude,
    /// Grid probes in grid order, then bisection probes in evaluation order.
    pub probes: Vec<Probe>,
}

fn probe(
    u: &VelocityField,
    f: &IgnitionNonlinearity,
    t0: &SpectralState,
    cfg: &SearchConfig,
    amplitude: f64,
) -> Result<Probe> {
    let sys = ReactionSystem::new(u, cfg.k_max, amplitude)?;
    let mut run = cfg.run.clone();
    run.stop = StopRule::OnVerdict;
    run.keep_fields = false;
    let traj = quench_run(&sys, f, t0, &run)?;
    Ok(Probe {
        amplitude,
        verdict: quench_detector(&traj, f.theta0).verdict,
    })
}

/// Scan the amplitude grid in parallel, then bisect between the last burning
/// and the first quenching grid point. No monotonicity in `A` is assumed.
pub fn critical_amplitude_search(
    u: &VelocityField,
    f: &IgnitionNonlinearity,
    t0: &SpectralState,
    cfg: &SearchConfig,
) -> Result<SearchReport> {
    if !(t0.mean().re < f.theta0) {
        return Err(Error::Precondition(format!(
            "mean temperature {} must be below theta0 = {}",
            t0.mean().re,
            f.theta0
        )));
    }
    let sys0 = ReactionSystem::new(u, cfg.k_max, 0.0)?;
    let sup0 = sys0.grid_values(t0).into_iter().fold(f64::NEG_INFINITY, f64::max);
    if sup0 <= f.theta0 {
        return Ok(SearchReport {
            result: CriticalAmplitude::FirstQuench {
                a_star: 0.0,
                burning_below: None,
            },
            probes: Vec::new(),
        });
    }
    let grid: Vec<f64> = cfg.grid.iter().copied().filter(|&a| a <= cfg.a_max).collect();
    let mut probes = crate::parallel::map_slice(&grid, |_, &a| probe(u, f, t0, cfg, a))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let Some(i) = probes.iter().position(|p| p.verdict.is_quenched()) else {
        return Ok(SearchReport {
            result: CriticalAmplitude::NoQuenchUpTo { a_max: cfg.a_max },
            probes,
        });
    };
    if i == 0 {
        return Ok(SearchReport {
            result: CriticalAmplitude::FirstQuench {
                a_star: grid[0],
                burning_below: None,
            },
            probes,
        });
    }
    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
    for _ in 0..cfg.bisection_steps {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let p = probe(u, f, t0, cfg, mid)?;
        probes.push(p);
        if p.verdict.is_quenched() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SearchReport {
        result: CriticalAmplitude::FirstQuench {
            a_star: hi,
            burning_below: Some(lo),
        },
        probes,
    })
}

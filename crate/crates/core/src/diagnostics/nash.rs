use crate::engine::{Method, Propagator, Scaling};
use crate::error::{Error, Result};
use crate::fourier::Fft2;
use crate::operators::{build_advection_generator, build_constant_flow_generator, collocation_size, VelocityField};
use crate::spectral::{GammaLadder, SpectralState, TorusLattice};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashFit {
    /// Fitted `p` in `ratio ≈ C t^{−p}`.
    pub exponent: f64,
    /// Least-squares constant.
    pub constant: f64,
    /// Smallest `C` with `ratio ≤ C t^{−p}` at every window sample.
    pub envelope: f64,
    pub window: [f64; 2],
    pub points: usize,
}

/// Least-squares slope of `log ratio` against `log t` inside `window`.
pub fn nash_exponent_fit(samples: &[(f64, f64)], window: [f64; 2]) -> Result<NashFit> {
    let t_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12;
    if samples.is_empty()
        || window[0] > window[1]
        || window[0] < t_min * (1.0 - slack)
        || window[1] > t_max * (1.0 + slack)
    {
        return Err(Error::WindowOutOfRange {
            lo: window[0],
            hi: window[1],
        });
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, r)| {
            *t >= window[0] * (1.0 - slack) && *t <= window[1] * (1.0 + slack) && *r > 0.0
        })
        .map(|&(t, r)| (t.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::WindowOutOfRange {
            lo: window[0],
            hi: window[1],
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let exponent = -slope;
    let constant = (my - slope * mx).exp();
    let envelope = pts
        .iter()
        .map(|&(lt, lr)| (lr + exponent * lt).exp())
        .fold(0.0, f64::max);
    Ok(NashFit {
        exponent,
        constant,
        envelope,
        window,
        points: pts.len(),
    })
}

/// Mean-zero periodized Gaussian of width `sigma` on the lattice.
pub fn gaussian_bump(lattice: &TorusLattice, sigma: f64) -> SpectralState {
    let ladder = GammaLadder::torus(lattice);
    let coeffs = lattice
        .modes()
        .iter()
        .map(|&(a, b)| {
            let r2 = (a * a + b * b) as f64;
            Complex64::new((-2.0 * PI * PI * sigma * sigma * r2).exp(), 0.0)
        })
        .collect();
    SpectralState::from_coeffs(&ladder, coeffs).expect("lattice-sized state")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashRunConfig {
    pub amplitude: f64,
    /// Lattice cutoff `K`.
    pub k_max: usize,
    pub sigma: f64,
    /// Sample times, increasing.
    pub times: Vec<f64>,
    /// Outer steps per sampling interval.
    pub steps_per_interval: usize,
}

/// `‖φ(t)‖_∞ / ‖φ₀‖_{L¹}` at each sample time, sup and L¹ on the collocation grid.
pub fn nash_run(u: &VelocityField, cfg: &NashRunConfig) -> Result<Vec<(f64, f64)>> {
    if cfg.times.windows(2).any(|w| w[1] <= w[0]) || cfg.times.first().is_some_and(|t| *t <= 0.0) {
        return Err(Error::param("times", "must be positive and increasing"));
    }
    let lattice = TorusLattice::new(cfg.k_max);
    let ladder = GammaLadder::torus(&lattice);
    let still = cfg.amplitude == 0.0 || u.sup_bound() == 0.0;
    let l = if still {
        build_constant_flow_generator([0.0, 0.0], cfg.k_max)?
    } else {
        build_advection_generator(u, cfg.k_max)?
    };
    let method = if still { Method::EigSplit } else { Method::StrangRk4 };
    let m = collocation_size(cfg.k_max, u.band());
    let fft = Fft2::new(m);
    let slots: Vec<usize> = lattice.modes().iter().map(|&k| fft.slot(k)).collect();
    let grid = |x: &[Complex64]| {
        let mut g = vec![Complex64::new(0.0, 0.0); m * m];
        for (c, &s) in x.iter().zip(&slots) {
            g[s] = *c;
        }
        fft.synthesize(&mut g);
        g
    };

    let phi0 = gaussian_bump(&lattice, cfg.sigma);
    let l1: f64 = grid(phi0.coeffs()).iter().map(|z| z.re.abs()).sum::<f64>() / (m * m) as f64;
    let mut x = phi0.coeffs().to_vec();
    let mut prop = Propagator::new(&l, &ladder, Scaling::Amplitude(cfg.amplitude), method, f64::INFINITY, 1.0)?;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(cfg.times.len());
    for &ts in &cfg.times {
        let n = cfg.steps_per_interval.max(1);
        let h = (ts - t) / n as f64;
        for _ in 0..n {
            prop.step(&mut x, h)?;
        }
        t = ts;
        let sup = grid(&x).iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        out.push((t, sup / l1));
    }
    Ok(out)
}

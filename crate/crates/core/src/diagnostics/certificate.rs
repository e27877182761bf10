use crate::engine::{Method, Propagator, Scaling};
use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use crate::parallel;
use crate::spectral::{dot, norm_sqr, GammaLadder, SpectralState};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificateOptions {
    /// Sampled times per amplitude on `[0, τ*]`.
    pub samples: usize,
    /// Slack below 1/2 allowed for the overlap.
    pub tol: f64,
    /// Largest accepted `‖Lφ₀ − Eφ₀‖`.
    pub eigen_tol: f64,
    pub method: Option<Method>,
    pub dt: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self {
            samples: 32,
            tol: 1e-6,
            eigen_tol: 1e-8,
            method: None,
            dt: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificatePoint {
    pub amplitude: f64,
    /// `‖φ^A(τ*)‖`.
    pub norm_at_tau: f64,
    /// `min_{t ≤ τ*} |⟨φ^A(t), φ₀⟩|`.
    pub min_overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `1 / (2‖φ₀‖₁²)`.
    pub tau_star: f64,
    pub eigenvalue: f64,
    pub eigen_residual: f64,
    pub points: Vec<CertificatePoint>,
    pub min_norm: f64,
    pub min_overlap: f64,
    pub pass: bool,
}

/// Certify that an H¹ eigenvector of `L` keeps `|⟨φ^A(t), φ₀⟩| ≥ 1/2` up to
/// `τ* = 1/(2‖φ₀‖₁²)` for every listed amplitude.
pub fn obstruction_certificate(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    phi0: &SpectralState,
    amplitudes: &[f64],
    opts: &CertificateOptions,
) -> Result<Certificate> {
    l.check(phi0)?;
    l.check_ladder(ladder)?;
    if (phi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!(
            "initial state must be normalized (norm {})",
            phi0.norm()
        )));
    }
    let lphi = l.apply(phi0)?;
    let eigenvalue = dot(phi0.coeffs(), lphi.coeffs()).re;
    let resid: Vec<_> = lphi
        .coeffs()
        .iter()
        .zip(phi0.coeffs())
        .map(|(a, b)| a - b * eigenvalue)
        .collect();
    let eigen_residual = norm_sqr(&resid).sqrt();
    if eigen_residual > opts.eigen_tol {
        return Err(Error::Precondition(format!(
            "initial state is not an eigenvector: ‖Lφ₀ − Eφ₀‖ = {eigen_residual:.3e} (E = {eigenvalue:.6e})"
        )));
    }
    let h1_sq = ladder.weighted_sqr(phi0.coeffs(), 1.0);
    if !h1_sq.is_finite() || h1_sq == 0.0 {
        return Err(Error::Precondition("H¹ norm must be finite and nonzero".into()));
    }
    let tau_star = 0.5 / h1_sq;
    let method = opts.method.unwrap_or(if l.is_diagonal() {
        Method::EigSplit
    } else if !l.is_matrix_free() && l.dim() <= crate::engine::ORACLE_MAX_DIM {
        Method::DenseOracle
    } else {
        Method::StrangRk4
    });
    let h = tau_star / opts.samples.max(1) as f64;

    let results = parallel::map_slice(amplitudes, |_, &a| -> Result<CertificatePoint> {
        let mut prop = Propagator::new(l, ladder, Scaling::Amplitude(a), method, opts.dt.min(h), 1.0)?;
        let mut x = phi0.coeffs().to_vec();
        let mut min_overlap = 1.0f64;
        for _ in 0..opts.samples.max(1) {
            prop.advance(&mut x, h)?;
            min_overlap = min_overlap.min(dot(&x, phi0.coeffs()).norm());
        }
        Ok(CertificatePoint {
            amplitude: a,
            norm_at_tau: norm_sqr(&x).sqrt(),
            min_overlap,
        })
    });
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    let min_norm = points.iter().map(|p| p.norm_at_tau).fold(f64::INFINITY, f64::min);
    let min_overlap = points.iter().map(|p| p.min_overlap).fold(f64::INFINITY, f64::min);
    Ok(Certificate {
        tau_star,
        eigenvalue,
        eigen_residual,
        pass: min_overlap >= 0.5 - opts.tol,
        points,
        min_norm,
        min_overlap,
    })
}

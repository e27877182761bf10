use crate::error::{Error, Result};
use crate::operators::OperatorHandle;
use crate::spectral::{norm_sqr, GammaLadder};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Rule for flagging eigenvectors as rough.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Roughness {
    /// Rough when `‖w‖₁² > threshold`.
    Absolute { threshold: f64 },
    /// Rough when `‖w‖₁² > κ · median_j ‖w_j‖₁²`.
    MedianMultiple { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportThresholds {
    pub band: [f64; 2],
    pub roughness: Roughness,
    /// Kernel tolerance for first-integral detection.
    pub kernel_tol: f64,
    /// Detect first integrals (eigenvalue-0 vectors of advection generators).
    pub first_integrals: bool,
}

impl Default for ReportThresholds {
    fn default() -> Self {
        Self {
            band: [-2.0, 2.0],
            roughness: Roughness::MedianMultiple { kappa: 4.0 },
            kernel_tol: 1e-8,
            first_integrals: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    /// 1-based position in ascending order.
    pub j: usize,
    pub energy: f64,
    pub h1_norm: f64,
    pub band_interior: bool,
    pub rough: bool,
    pub first_integral: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub operator: String,
    pub thresholds: ReportThresholds,
    /// Resolved `‖w‖₁²` roughness threshold.
    pub roughness_threshold: f64,
    pub records: Vec<EigenRecord>,
    pub groups: Vec<Range<usize>>,
}

impl SpectralReport {
    pub fn first_integral_indices(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| r.first_integral)
            .map(|r| r.j - 1)
            .collect()
    }
}

/// Eigenpairs with H¹ norms and band, roughness and first-integral flags.
pub fn eigenreport(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    thresholds: &ReportThresholds,
) -> Result<SpectralReport> {
    l.check_ladder(ladder)?;
    let owned;
    let l = if l.eig().is_some() {
        l
    } else {
        owned = l.clone().diagonalized()?;
        &owned
    };
    let eig = l.eig().ok_or(Error::MissingCapability("eigensystem"))?;
    let n = eig.len();
    let h1_sq: Vec<f64> = (0..n)
        .map(|j| ladder.weighted_sqr(&eig.vector(j), 1.0))
        .collect();
    let roughness_threshold = match thresholds.roughness {
        Roughness::Absolute { threshold } => threshold,
        Roughness::MedianMultiple { kappa } => {
            let mut s = h1_sq.clone();
            s.sort_by(f64::total_cmp);
            let median = if n % 2 == 1 {
                s[n / 2]
            } else {
                0.5 * (s[n / 2 - 1] + s[n / 2])
            };
            kappa * median
        }
    };
    let scale = l.norm_bound().max(1.0);
    let records = (0..n)
        .map(|j| {
            let e = eig.values()[j];
            let first_integral = thresholds.first_integrals && e.abs() <= thresholds.kernel_tol * scale && {
                let w = eig.vector(j);
                let mut lw = vec![Complex64::new(0.0, 0.0); n];
                l.apply_slice(&w, &mut lw);
                norm_sqr(&lw).sqrt() <= thresholds.kernel_tol * scale
            };
            EigenRecord {
                j: j + 1,
                energy: e,
                h1_norm: h1_sq[j].sqrt(),
                band_interior: e >= thresholds.band[0] && e <= thresholds.band[1],
                rough: h1_sq[j] > roughness_threshold,
                first_integral,
            }
        })
        .collect();
    Ok(SpectralReport {
        operator: l.tag().to_string(),
        thresholds: thresholds.clone(),
        roughness_threshold,
        records,
        groups: eig.groups().to_vec(),
    })
}

use crate::error::Result;
use crate::operators::VelocityField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Comparison flows given by a stream function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StreamKind {
    /// `u = (sin 2πy, 0)`.
    Shear,
    /// `ψ_s = (1/2π) sin 2πx sin 2πy`.
    Cellular,
    /// Stream-function coefficients `ψ_k` on `e^{−2πik·x}`.
    Custom { coefficients: Vec<((i64, i64), Complex64)> },
}

/// Velocity of the given stream function, keeping modes with `|k|_∞ ≤ k_max`.
pub fn stream_function_flow(kind: &StreamKind, k_max: usize) -> Result<VelocityField> {
    let coefficients = match kind {
        StreamKind::Shear => {
            let c = Complex64::new(-1.0 / (4.0 * std::f64::consts::PI), 0.0);
            vec![((0, -1), c), ((0, 1), c)]
        }
        StreamKind::Cellular => VelocityField::cellular_stream_function(),
        StreamKind::Custom { coefficients } => coefficients.clone(),
    };
    let kept: Vec<_> = coefficients
        .into_iter()
        .filter(|(k, _)| k.0.unsigned_abs() as usize <= k_max && k.1.unsigned_abs() as usize <= k_max)
        .collect();
    let band = kept
        .iter()
        .map(|(k, _)| k.0.unsigned_abs().max(k.1.unsigned_abs()) as usize)
        .max()
        .unwrap_or(0);
    let side = 2 * band + 1;
    let b = band as i64;
    let mut psi = vec![Complex64::new(0.0, 0.0); side * side];
    for (k, c) in kept {
        psi[(k.0 + b) as usize * side + (k.1 + b) as usize] += c;
    }
    let label = match kind {
        StreamKind::Shear => "shear".to_string(),
        StreamKind::Cellular => "cellular".to_string(),
        StreamKind::Custom { .. } => format!("stream[K={k_max}]"),
    };
    VelocityField::from_stream_function(label, band, &psi)
}

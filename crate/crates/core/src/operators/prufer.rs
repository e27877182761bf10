use super::JacobiOperator;
use crate::error::{Error, Result};
use crate::spectral::SpectralState;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruferEntry {
    /// 1-based site index.
    pub n: usize,
    /// `u_n² + u_{n−1}² − E u_n u_{n−1}`.
    pub amplitude: f64,
    /// `|a_n − 1| + |a_{n−1} − 1| + |v_n|`.
    pub perturbation: f64,
    /// `R_{n+1} / R_n`, absent at the last site or when `R_n = 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruferTrace {
    pub energy: f64,
    pub entries: Vec<PruferEntry>,
    /// Tail start: first site after which every perturbation is below 1/2.
    pub n0: usize,
    /// Smallest `C ≥ 0` with `R_n ≥ R_{n0} e^{−C√n}` for all `n ≥ n0`.
    pub fitted_c: f64,
}

/// Prüfer amplitudes of `u` at energy `E ∈ (−2, 2)`.
pub fn prufer_trace(j: &JacobiOperator, energy: f64, u: &SpectralState) -> Result<PruferTrace> {
    if !(energy > -2.0 && energy < 2.0) {
        return Err(Error::param("E", format!("{energy} outside (-2, 2)")));
    }
    if u.len() != j.len() {
        return Err(Error::DimensionMismatch {
            expected: j.len(),
            found: u.len(),
        });
    }
    if u.norm() == 0.0 {
        return Err(Error::Degenerate("zero vector has no Prüfer amplitude".into()));
    }
    let x: Vec<f64> = u.coeffs().iter().map(|c| c.re).collect();
    let n = x.len();
    let mut entries = Vec::with_capacity(n);
    for site in 1..=n {
        let un = x[site - 1];
        let prev = if site >= 2 { x[site - 2] } else { 0.0 };
        let r = un * un + prev * prev - energy * un * prev;
        if r <= 0.0 && (un != 0.0 || prev != 0.0) {
            return Err(Error::Invariant(format!(
                "Prüfer amplitude R_{site} = {r:.3e} is not positive"
            )));
        }
        let c = (j.a_at(site) - 1.0).abs() + (j.a_at(site - 1) - 1.0).abs() + j.v_at(site).abs();
        entries.push(PruferEntry {
            n: site,
            amplitude: r,
            perturbation: c,
            ratio: None,
        });
    }
    for i in 0..n.saturating_sub(1) {
        let (r0, r1) = (entries[i].amplitude, entries[i + 1].amplitude);
        entries[i].ratio = (r0 != 0.0).then(|| r1 / r0);
    }

    let last_large = entries.iter().rposition(|e| e.perturbation >= 0.5);
    let n0 = last_large.map_or(1, |i| (i + 2).min(n));
    let r_ref = entries[n0 - 1].amplitude;
    let mut fitted_c = 0.0f64;
    if r_ref > 0.0 {
        for e in &entries[n0 - 1..] {
            if e.amplitude > 0.0 {
                fitted_c = fitted_c.max(-(e.amplitude / r_ref).ln() / (e.n as f64).sqrt());
            }
        }
    }
    Ok(PruferTrace {
        energy,
        entries,
        n0,
        fitted_c,
    })
}

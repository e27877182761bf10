//! Γ ladders, coefficient states, Sobolev norms and low-mode projections.
//!
//! Public APIs index basis vectors from 1 (`e_1, e_2, ...`); storage is 0-based.

mod lattice;
mod state;

pub use lattice::TorusLattice;
pub use state::SpectralState;

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Nondecreasing positive eigenvalues of the dissipative operator Γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaLadder {
    lambdas: Vec<f64>,
    label: String,
}

impl GammaLadder {
    pub fn new(lambdas: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::size("ladder", "empty"));
        }
        if !(lambdas[0] > 0.0) || lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::param("lambdas", "entries must be finite and positive"));
        }
        if lambdas.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("lambdas", "entries must be nondecreasing"));
        }
        Ok(Self {
            lambdas,
            label: label.into(),
        })
    }

    /// The ladder `λ_n = n`, n = 1..=N.
    pub fn linear(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|j| j as f64).collect(), format!("diag-n-{n}"))
    }

    /// Laplacian eigenvalues `4π²|k|²` over the nonzero modes of `lattice`.
    pub fn torus(lattice: &TorusLattice) -> Self {
        let lambdas = lattice
            .modes()
            .iter()
            .map(|&(k1, k2)| {
                let r2 = (k1 * k1 + k2 * k2) as f64;
                4.0 * std::f64::consts::PI * std::f64::consts::PI * r2
            })
            .collect();
        Self {
            lambdas,
            label: lattice.label(),
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `λ_j` for 1-based `j`.
    pub fn lambda(&self, j: usize) -> f64 {
        self.lambdas[j - 1]
    }

    pub fn first(&self) -> f64 {
        self.lambdas[0]
    }

    pub(crate) fn check(&self, state: &SpectralState) -> Result<()> {
        if state.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: state.len(),
            });
        }
        Ok(())
    }

    /// `Σ λ_j^m |c_j|²` over raw coefficients.
    pub fn weighted_sqr(&self, coeffs: &[Complex64], m: f64) -> f64 {
        if m == 0.0 {
            return coeffs.iter().map(|c| c.norm_sqr()).sum();
        }
        if m == 1.0 {
            return coeffs
                .iter()
                .zip(&self.lambdas)
                .map(|(c, l)| l * c.norm_sqr())
                .sum();
        }
        coeffs
            .iter()
            .zip(&self.lambdas)
            .map(|(c, l)| l.powf(m) * c.norm_sqr())
            .sum()
    }
}

/// Orthogonal projection `P_N` onto the first `cutoff` basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeProjection {
    cutoff: usize,
}

impl ModeProjection {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::param("cutoff", "must be positive"));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
}

/// `‖φ‖_m = sqrt(Σ λ_j^m |c_j|²)`, for `m ∈ [-2, 2]`.
pub fn sobolev_norm(state: &SpectralState, ladder: &GammaLadder, m: f64) -> Result<f64> {
    if !(-2.0..=2.0).contains(&m) {
        return Err(Error::param("m", format!("{m} outside [-2, 2]")));
    }
    ladder.check(state)?;
    Ok(ladder.weighted_sqr(state.coeffs(), m).sqrt())
}

pub fn project_low_modes(state: &SpectralState, p: ModeProjection) -> Result<SpectralState> {
    if p.cutoff > state.len() {
        return Err(Error::DimensionMismatch {
            expected: state.len(),
            found: p.cutoff,
        });
    }
    let mut out = state.clone();
    for c in &mut out.coeffs_mut()[p.cutoff..] {
        *c = Complex64::new(0.0, 0.0);
    }
    Ok(out)
}

/// `⟨a, b⟩ = Σ conj(a_j) b_j`, conjugating the first slot.
pub fn inner_product(a: &SpectralState, b: &SpectralState) -> Result<Complex64> {
    a.check_same_basis(b)?;
    Ok(dot(a.coeffs(), b.coeffs()))
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

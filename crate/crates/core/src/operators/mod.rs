//! Self-adjoint generators `L`: Jacobi matrices, torus flow generators and
//! the band-projected surrogate.

mod eigensystem;
mod jacobi;
mod projection;
mod prufer;
mod torus;
mod velocity;

pub use eigensystem::{EigenVectors, Eigensystem};
pub use jacobi::{build_free_jacobi, build_wvn_schrodinger, wvn_zero_mode, JacobiOperator};
pub use projection::{project_out_band_exterior, ProjectedSystem};
pub use prufer::{prufer_trace, PruferEntry, PruferTrace};
pub use torus::{
    build_advection_generator, build_constant_flow_generator, collocation_size, lattice_state,
    AdvectionGenerator,
};
pub use velocity::VelocityField;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::spectral::{dot, GammaLadder, SpectralState};
use num_complex::Complex64;
use rand::Rng;
use std::sync::Arc;

/// Largest dimension for which a matrix-free operator is materialized densely.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone)]
pub(crate) enum Action {
    Diagonal(Arc<Vec<f64>>),
    Tridiagonal(Arc<JacobiOperator>),
    Dense(Arc<CMatrix>),
    Advection(Arc<AdvectionGenerator>),
}

/// A self-adjoint operator acting on states of one basis.
#[derive(Debug, Clone)]
pub struct OperatorHandle {
    tag: String,
    basis: String,
    dim: usize,
    action: Action,
    eig: Option<Arc<Eigensystem>>,
    norm_bound: f64,
}

impl OperatorHandle {
    /// Diagonal operator with the given entries.
    pub fn diagonal(tag: impl Into<String>, ladder: &GammaLadder, entries: Vec<f64>) -> Result<Self> {
        check_len(ladder, entries.len())?;
        let norm_bound = entries.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        Ok(Self {
            tag: tag.into(),
            basis: ladder.label().to_string(),
            dim: entries.len(),
            action: Action::Diagonal(Arc::new(entries)),
            eig: None,
            norm_bound,
        })
    }

    /// Dense operator; `matrix` should be Hermitian to rounding.
    pub fn dense(tag: impl Into<String>, ladder: &GammaLadder, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::size("dense operator", "matrix must be square"));
        }
        check_len(ladder, matrix.nrows())?;
        let defect = (&matrix - matrix.adjoint()).norm();
        if defect > 1e-10 * matrix.norm().max(1.0) {
            return Err(Error::param(
                "matrix",
                format!("not Hermitian (defect {defect:.3e})"),
            ));
        }
        let frob = matrix.norm();
        let norm_bound = frob.min(linalg::one_norm(&matrix));
        Ok(Self {
            tag: tag.into(),
            basis: ladder.label().to_string(),
            dim: matrix.nrows(),
            action: Action::Dense(Arc::new(matrix)),
            eig: None,
            norm_bound,
        })
    }

    pub fn from_jacobi(jacobi: &JacobiOperator, ladder: &GammaLadder) -> Result<Self> {
        check_len(ladder, jacobi.len())?;
        Ok(Self {
            tag: jacobi.tag().to_string(),
            basis: ladder.label().to_string(),
            dim: jacobi.len(),
            action: Action::Tridiagonal(Arc::new(jacobi.clone())),
            eig: None,
            norm_bound: jacobi.gershgorin_bound(),
        })
    }

    pub(crate) fn advection(gen: AdvectionGenerator, ladder: &GammaLadder) -> Result<Self> {
        check_len(ladder, gen.len())?;
        Ok(Self {
            tag: "advection".to_string(),
            basis: ladder.label().to_string(),
            dim: gen.len(),
            norm_bound: gen.norm_bound(),
            action: Action::Advection(Arc::new(gen)),
            eig: None,
        })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    /// Attach a precomputed eigensystem.
    pub fn with_eigensystem(mut self, eig: Eigensystem) -> Result<Self> {
        if eig.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: eig.len(),
            });
        }
        self.eig = Some(Arc::new(eig));
        Ok(self)
    }

    /// Compute and attach the eigensystem (dense track).
    pub fn diagonalized(self) -> Result<Self> {
        if self.eig.is_some() {
            return Ok(self);
        }
        let eig = match &self.action {
            Action::Diagonal(d) => Eigensystem::from_diagonal(d),
            _ => {
                let (values, vectors) = linalg::hermitian_eigen(&self.to_dense()?)?;
                Eigensystem::new(values, EigenVectors::Dense(vectors))?
            }
        };
        self.with_eigensystem(eig)
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn basis(&self) -> &str {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eig(&self) -> Option<&Eigensystem> {
        self.eig.as_deref()
    }

    /// Upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.action, Action::Diagonal(_))
    }

    pub fn diagonal_entries(&self) -> Option<&[f64]> {
        match &self.action {
            Action::Diagonal(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_matrix_free(&self) -> bool {
        matches!(self.action, Action::Advection(_))
    }

    /// Whether `L` commutes with Γ, i.e. `e^{iLt}` preserves every `H^m` norm.
    pub fn commutes_with_gamma(&self) -> bool {
        self.is_diagonal()
    }

    /// The stored dense matrix, if the operator is held densely.
    pub fn dense_matrix(&self) -> Option<&CMatrix> {
        match &self.action {
            Action::Dense(m) => Some(m),
            _ => None,
        }
    }

    /// Dense matrix of the operator, built column by column when needed.
    pub fn to_dense(&self) -> Result<CMatrix> {
        match &self.action {
            Action::Dense(m) => Ok((**m).clone()),
            Action::Diagonal(d) => Ok(CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                d.len(),
                d.iter().map(|&x| Complex64::new(x, 0.0)),
            ))),
            Action::Tridiagonal(j) => Ok(linalg::to_complex(&j.to_dense())),
            Action::Advection(g) => {
                if self.dim > MAX_DENSE_DIM {
                    return Err(Error::OracleSize {
                        dim: self.dim,
                        max: MAX_DENSE_DIM,
                    });
                }
                let cols = crate::parallel::map_range(self.dim, |j| {
                    let mut e = vec![Complex64::new(0.0, 0.0); self.dim];
                    e[j] = Complex64::new(1.0, 0.0);
                    let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
                    g.apply(&e, &mut out);
                    out
                });
                let mut m = CMatrix::from_fn(self.dim, self.dim, |i, j| cols[j][i]);
                let adj = m.adjoint();
                m = (m + adj) * Complex64::new(0.5, 0.0);
                Ok(m)
            }
        }
    }

    /// Apply to raw coefficients.
    pub fn apply_slice(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        match &self.action {
            Action::Diagonal(d) => {
                for ((yi, xi), di) in y.iter_mut().zip(x).zip(d.iter()) {
                    *yi = xi * di;
                }
            }
            Action::Tridiagonal(j) => j.apply_complex(x, y),
            Action::Dense(m) => linalg::matvec(m, x, y),
            Action::Advection(g) => g.apply(x, y),
        }
    }

    pub fn apply(&self, state: &SpectralState) -> Result<SpectralState> {
        self.check(state)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_slice(state.coeffs(), &mut out);
        Ok(SpectralState::with_basis(&self.basis, out))
    }

    pub(crate) fn check(&self, state: &SpectralState) -> Result<()> {
        if state.basis() != self.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.clone(),
                right: state.basis().to_string(),
            });
        }
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_ladder(&self, ladder: &GammaLadder) -> Result<()> {
        if ladder.label() != self.basis {
            return Err(Error::BasisMismatch {
                left: self.basis.clone(),
                right: ladder.label().to_string(),
            });
        }
        check_len(ladder, self.dim)
    }

    /// Largest `|⟨Lf, g⟩ − ⟨f, Lg⟩|` over random unit pairs.
    pub fn hermiticity_defect<R: Rng>(&self, probes: usize, rng: &mut R) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let f = random_unit(self.dim, rng);
            let g = random_unit(self.dim, rng);
            let mut lf = vec![Complex64::new(0.0, 0.0); self.dim];
            let mut lg = lf.clone();
            self.apply_slice(&f, &mut lf);
            self.apply_slice(&g, &mut lg);
            worst = worst.max((dot(&lf, &g) - dot(&f, &lg)).norm());
        }
        worst
    }

    /// Empirical ratio `‖Lψ‖ / ‖ψ‖_1` maximized over random probes.
    pub fn relative_bound_estimate<R: Rng>(
        &self,
        ladder: &GammaLadder,
        probes: usize,
        rng: &mut R,
    ) -> Result<f64> {
        self.check_ladder(ladder)?;
        let mut best = 0.0f64;
        for _ in 0..probes {
            let f = random_unit(self.dim, rng);
            let mut lf = vec![Complex64::new(0.0, 0.0); self.dim];
            self.apply_slice(&f, &mut lf);
            let h1 = ladder.weighted_sqr(&f, 1.0).sqrt();
            best = best.max(linalg_norm(&lf) / h1);
        }
        Ok(best)
    }
}

fn linalg_norm(x: &[Complex64]) -> f64 {
    crate::spectral::norm_sqr(x).sqrt()
}

fn check_len(ladder: &GammaLadder, n: usize) -> Result<()> {
    if ladder.len() != n {
        return Err(Error::DimensionMismatch {
            expected: ladder.len(),
            found: n,
        });
    }
    Ok(())
}

pub(crate) fn random_unit<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let s = 1.0 / linalg_norm(&v);
    v.iter_mut().for_each(|z| *z *= s);
    v
}

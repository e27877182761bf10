use super::Scaling;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::operators::OperatorHandle;
use crate::spectral::{GammaLadder, SpectralState};
use num_complex::Complex64;

pub const ORACLE_MAX_DIM: usize = 1024;

/// Dense generator `i a L − g Γ`.
pub fn generator_matrix(l: &OperatorHandle, ladder: &GammaLadder, scaling: Scaling) -> Result<CMatrix> {
    l.check_ladder(ladder)?;
    if l.dim() > ORACLE_MAX_DIM {
        return Err(Error::OracleSize {
            dim: l.dim(),
            max: ORACLE_MAX_DIM,
        });
    }
    let a = scaling.advection();
    let g = scaling.diffusion();
    let mut m = if a == 0.0 {
        CMatrix::zeros(l.dim(), l.dim())
    } else {
        l.to_dense()? * Complex64::new(0.0, a)
    };
    for (i, lam) in ladder.lambdas().iter().enumerate() {
        m[(i, i)] -= g * lam;
    }
    Ok(m)
}

/// `exp(t(iAL − Γ)) φ₀` by scaling and squaring.
pub fn dense_oracle_evolve(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    amplitude: f64,
    t: f64,
    phi0: &SpectralState,
) -> Result<SpectralState> {
    l.check(phi0)?;
    let g = generator_matrix(l, ladder, Scaling::Amplitude(amplitude))?;
    let p = linalg::expm(&(g * Complex64::new(t, 0.0)));
    let mut out = vec![Complex64::new(0.0, 0.0); l.dim()];
    linalg::matvec(&p, phi0.coeffs(), &mut out);
    Ok(phi0.clone().with_coeffs(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::build_free_jacobi;

    #[test]
    fn zero_generator_gives_heat_factors() {
        let ladder = GammaLadder::linear(6).unwrap();
        let l = OperatorHandle::diagonal("zero", &ladder, vec![0.0; 6]).unwrap();
        let phi = SpectralState::from_real(&ladder, &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let out = dense_oracle_evolve(&l, &ladder, 3.0, 0.7, &phi).unwrap();
        for (j, c) in out.coeffs().iter().enumerate() {
            let want = (-(j as f64 + 1.0) * 0.7).exp();
            assert!((c.re - want).abs() < 1e-13 * want.max(1e-3) && c.im.abs() < 1e-15);
        }
        let same = dense_oracle_evolve(&l, &ladder, 3.0, 0.0, &phi).unwrap();
        assert_eq!(same, phi);
    }

    #[test]
    fn semigroup_property() {
        let n = 32;
        let ladder = GammaLadder::linear(n).unwrap();
        let l = OperatorHandle::from_jacobi(&build_free_jacobi(n).unwrap(), &ladder).unwrap();
        let phi = SpectralState::basis_vector(&ladder, 3).unwrap();
        let a = 5.0;
        let whole = dense_oracle_evolve(&l, &ladder, a, 0.9, &phi).unwrap();
        let half = dense_oracle_evolve(&l, &ladder, a, 0.4, &phi).unwrap();
        let two = dense_oracle_evolve(&l, &ladder, a, 0.5, &half).unwrap();
        assert!(whole.sub(&two).unwrap().norm() < 1e-10 * whole.norm());
    }

    #[test]
    fn oversized_operator_rejected() {
        let n = ORACLE_MAX_DIM + 1;
        let ladder = GammaLadder::linear(n).unwrap();
        let l = OperatorHandle::diagonal("big", &ladder, vec![0.0; n]).unwrap();
        let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
        assert!(matches!(
            dense_oracle_evolve(&l, &ladder, 1.0, 1.0, &phi),
            Err(Error::OracleSize { .. })
        ));
    }
}

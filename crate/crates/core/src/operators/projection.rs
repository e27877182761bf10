use super::{EigenVectors, Eigensystem, JacobiOperator, OperatorHandle};
use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eigen};
use crate::spectral::{GammaLadder, SpectralState};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Truncated operator with the eigenvectors outside a spectral band removed.
///
/// Three coordinate systems are involved: the ambient basis `e_n`, the
/// retained eigenvectors `W` of `L̃`, and the eigenbasis `V` of the compressed
/// Γ. Evolution runs in the last one, where Γ is diagonal.
#[derive(Debug, Clone)]
pub struct ProjectedSystem {
    /// `PΓ̃P` in retained-eigenvector coordinates.
    pub gamma: OperatorHandle,
    /// `PL̃P` in retained-eigenvector coordinates (diagonal).
    pub generator: OperatorHandle,
    /// Eigenvalues of the compressed Γ.
    pub ladder: GammaLadder,
    /// `PL̃P` in the compressed-Γ eigenbasis, with its eigensystem attached.
    pub ladder_generator: OperatorHandle,
    /// Ambient coordinates of the ladder basis (`N × r`).
    pub embedding: DMatrix<f64>,
    pub retained: Vec<f64>,
    pub discarded: Vec<f64>,
}

impl ProjectedSystem {
    pub fn dim(&self) -> usize {
        self.retained.len()
    }

    /// Ambient vector compressed into the ladder basis.
    pub fn restrict(&self, ambient: &[Complex64]) -> Result<SpectralState> {
        if ambient.len() != self.embedding.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.embedding.nrows(),
                found: ambient.len(),
            });
        }
        let coeffs = (0..self.dim())
            .map(|c| {
                self.embedding
                    .column(c)
                    .iter()
                    .zip(ambient)
                    .map(|(w, z)| z * *w)
                    .sum()
            })
            .collect();
        SpectralState::from_coeffs(&self.ladder, coeffs)
    }

    /// Ladder-basis state written in ambient coordinates.
    pub fn embed(&self, state: &SpectralState) -> Result<Vec<Complex64>> {
        self.ladder_generator.check(state)?;
        let n = self.embedding.nrows();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (c, z) in state.coeffs().iter().enumerate() {
            for (o, w) in out.iter_mut().zip(self.embedding.column(c).iter()) {
                *o += z * *w;
            }
        }
        Ok(out)
    }

    /// Retained eigenpair whose eigenvalue is closest to `target`, in the ladder basis.
    pub fn eigenvector_near(&self, target: f64) -> Result<(f64, SpectralState)> {
        let eig = self
            .ladder_generator
            .eig()
            .ok_or(Error::MissingCapability("eigensystem"))?;
        let (idx, e) = eig
            .values()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .ok_or_else(|| Error::Degenerate("empty retained span".into()))?;
        let v = SpectralState::from_coeffs(&self.ladder, eig.vector(idx))?;
        Ok((*e, v))
    }
}

/// Discard eigenvectors of `L̃` whose eigenvalues fall outside `band`.
pub fn project_out_band_exterior(
    jacobi: &JacobiOperator,
    ladder: &GammaLadder,
    band: [f64; 2],
) -> Result<ProjectedSystem> {
    let n = jacobi.len();
    if ladder.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: ladder.len(),
        });
    }
    if !(band[0] <= band[1]) {
        return Err(Error::param("band", "lower edge exceeds upper edge"));
    }
    let (values, vectors) = symmetric_eigen(&jacobi.to_dense())?;
    let keep: Vec<usize> = (0..n)
        .filter(|&i| values[i] >= band[0] && values[i] <= band[1])
        .collect();
    if keep.is_empty() {
        return Err(Error::Degenerate(format!(
            "no eigenvalues of {} inside [{}, {}]",
            jacobi.tag(),
            band[0],
            band[1]
        )));
    }
    let discarded = (0..n)
        .filter(|i| !keep.contains(i))
        .map(|i| values[i])
        .collect();
    let retained: Vec<f64> = keep.iter().map(|&i| values[i]).collect();
    let r = keep.len();
    let w = DMatrix::from_fn(n, r, |row, c| vectors[(row, keep[c])]);

    let scaled = DMatrix::from_fn(n, r, |row, c| ladder.lambdas()[row] * w[(row, c)]);
    let mut gamma_w = w.transpose() * scaled;
    gamma_w = (&gamma_w + gamma_w.transpose()) * 0.5;
    let (mu, v) = symmetric_eigen(&gamma_w)?;
    let tag = format!("band-projected-{}", jacobi.tag());
    let span_tag = format!("{tag}-span");
    let span = GammaLadder::new(vec![1.0; r], span_tag.clone())?;
    let proj_ladder = GammaLadder::new(mu, format!("{tag}-ladder"))?;

    let gamma = OperatorHandle::dense(
        format!("{tag}-gamma"),
        &span,
        linalg::to_complex(&gamma_w),
    )?;
    let generator = OperatorHandle::diagonal(tag.clone(), &span, retained.clone())?;

    let vt = v.transpose();
    let scaled_v = DMatrix::from_fn(r, r, |row, c| retained[row] * v[(row, c)]);
    let mut l_ladder = &vt * scaled_v;
    l_ladder = (&l_ladder + l_ladder.transpose()) * 0.5;
    let eig = Eigensystem::new(retained.clone(), EigenVectors::Dense(linalg::to_complex(&vt)))?;
    let ladder_generator = OperatorHandle::dense(tag, &proj_ladder, linalg::to_complex(&l_ladder))?
        .with_eigensystem(eig)?;

    Ok(ProjectedSystem {
        gamma,
        generator,
        ladder: proj_ladder,
        ladder_generator,
        embedding: &w * &v,
        retained,
        discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_free_jacobi, build_wvn_schrodinger, wvn_zero_mode};

    #[test]
    fn free_jacobi_keeps_everything() {
        let j = build_free_jacobi(20).unwrap();
        let ladder = GammaLadder::linear(20).unwrap();
        let p = project_out_band_exterior(&j, &ladder, [-2.0, 2.0]).unwrap();
        assert_eq!(p.dim(), 20);
        assert!(p.discarded.is_empty());
        for (a, b) in p.ladder.lambdas().iter().zip(1..=20) {
            assert!((a - b as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_band_is_degenerate() {
        let j = build_free_jacobi(10).unwrap();
        let ladder = GammaLadder::linear(10).unwrap();
        assert!(matches!(
            project_out_band_exterior(&j, &ladder, [5.0, 6.0]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn wvn_zero_eigenvalue_survives() {
        let n = 128;
        let j = build_wvn_schrodinger(n).unwrap();
        let ladder = GammaLadder::linear(n).unwrap();
        let p = project_out_band_exterior(&j, &ladder, [-2.0, 2.0]).unwrap();
        assert_eq!(p.dim() + p.discarded.len(), n);
        assert!(p.discarded.iter().all(|e| e.abs() > 2.0));
        let (e, v) = p.eigenvector_near(0.0).unwrap();
        assert!(e.abs() < 1e-2, "{e}");
        let u = wvn_zero_mode(n).unwrap().normalized().unwrap();
        let ambient = p.embed(&v).unwrap();
        let overlap: Complex64 = u.coeffs().iter().zip(&ambient).map(|(a, b)| a.conj() * b).sum();
        assert!(overlap.norm() > 0.99, "{}", overlap.norm());
        let back = p.restrict(&ambient).unwrap();
        assert!(back.sub(&v).unwrap().norm() < 1e-12);
    }
}

use super::{is_real, to_complex, CMatrix};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Eigenpairs of a real symmetric matrix, ascending.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenSolver("non-finite matrix entry".into()));
    }
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenSolver("symmetric QR iteration did not converge".into()))?;
    let order = ascending(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenpairs of a Hermitian matrix, ascending; real input takes the real path.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if is_real(a) {
        let (values, vectors) = symmetric_eigen(&a.map(|z| z.re))?;
        return Ok((values, to_complex(&vectors)));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenSolver("non-finite matrix entry".into()));
    }
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenSolver("Hermitian QR iteration did not converge".into()))?;
    let order = ascending(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

fn ascending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn sorted_and_reconstructs() {
        let a = CMatrix::from_fn(6, 6, |i, j| {
            let re = 1.0 / (1.0 + i as f64 + j as f64);
            let im = if i == j { 0.0 } else { 0.1 * (i as f64 - j as f64) };
            Complex64::new(re, im)
        });
        let (e, v) = hermitian_eigen(&a).unwrap();
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            6,
            e.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let recon = &v * d * v.adjoint();
        assert!((recon - a).norm() < 1e-12);
    }
}

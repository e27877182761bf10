//! Dense linear algebra helpers over nalgebra.

mod eigen;
mod expm;
mod quadrature;

pub use eigen::{hermitian_eigen, symmetric_eigen};
pub use expm::expm;
pub use quadrature::{gauss_legendre, GaussLegendre};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

fn split(a: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|c| c.re), a.map(|c| c.im))
}

/// Complex product computed from four real products, which run far faster
/// than nalgebra's generic complex kernel.
pub fn cmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, Complex64::new)
}

/// Real matrix times complex matrix.
pub fn rcmul(a: &DMatrix<f64>, b: &CMatrix) -> CMatrix {
    let (br, bi) = split(b);
    let re = a * br;
    let im = a * bi;
    re.zip_map(&im, Complex64::new)
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

pub fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn is_real(a: &CMatrix) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

/// `y = A x` for a dense complex matrix and a coefficient slice.
pub fn matvec(a: &CMatrix, x: &[Complex64], y: &mut [Complex64]) {
    let n = a.nrows();
    y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for (j, xj) in x.iter().enumerate() {
        if *xj == Complex64::new(0.0, 0.0) {
            continue;
        }
        let col = a.column(j);
        for i in 0..n {
            y[i] += col[i] * xj;
        }
    }
}

/// `y = A† x`.
pub fn adjoint_matvec(a: &CMatrix, x: &[Complex64], y: &mut [Complex64]) {
    for (j, yj) in y.iter_mut().enumerate() {
        let col = a.column(j);
        *yj = col.iter().zip(x).map(|(c, v)| c.conj() * v).sum();
    }
}

use crate::error::{Error, Result};
use crate::operators::{Eigensystem, OperatorHandle};
use crate::spectral::{GammaLadder, ModeProjection, SpectralState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Eigen-subspace selection `P_sel` over an operator's eigensystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Selection {
    Nothing,
    Full,
    /// Eigenvectors with eigenvalue in `[lo, hi]`.
    Band { lo: f64, hi: f64 },
    /// Explicit 0-based eigen-indices.
    Indices { indices: Vec<usize> },
}

impl Selection {
    fn contains(&self, idx: usize, e: f64) -> bool {
        match self {
            Selection::Nothing => false,
            Selection::Full => true,
            Selection::Band { lo, hi } => e >= *lo && e <= *hi,
            Selection::Indices { indices } => indices.contains(&idx),
        }
    }
}

/// `(e^{iωT} − 1)/(iωT)`, equal to 1 at `ω = 0`.
fn time_average_factor(omega: f64, t: f64) -> Complex64 {
    let x = omega * t;
    if x == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if x.abs() < 1e-6 {
        return Complex64::new(1.0 - x * x / 6.0, x / 2.0);
    }
    (Complex64::new(0.0, x).exp() - 1.0) / Complex64::new(0.0, x)
}

/// Low blocks `P_N Q_J φ` for each selected degeneracy group, with the group energy.
fn grouped_low_blocks(
    eig: &Eigensystem,
    phi: &[Complex64],
    sel: &Selection,
    n_low: usize,
) -> Vec<(f64, Vec<Complex64>)> {
    let c = eig.analyze(phi);
    let mut out = Vec::with_capacity(eig.groups().len());
    for g in eig.groups() {
        let mut block = vec![Complex64::new(0.0, 0.0); n_low];
        let mut any = false;
        for j in g.clone() {
            if !sel.contains(j, eig.values()[j]) || c[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            any = true;
            let w = eig.vector(j);
            for (b, wn) in block.iter_mut().zip(&w[..n_low]) {
                *b += wn * c[j];
            }
        }
        if any {
            let e = g.clone().map(|j| eig.values()[j]).sum::<f64>() / g.len() as f64;
            out.push((e, block));
        }
    }
    out
}

/// `Σ_{J,K} s(E_K − E_J) ⟨g_J, W g_K⟩` with weights `W` on the low block.
fn averaged_quadratic(blocks: &[(f64, Vec<Complex64>)], weights: &[f64], t: f64) -> (f64, f64) {
    let mut total = 0.0;
    let mut diag = 0.0;
    for (j, (ej, gj)) in blocks.iter().enumerate() {
        for (k, (ek, gk)) in blocks.iter().enumerate() {
            let form: Complex64 = gj
                .iter()
                .zip(gk)
                .zip(weights)
                .map(|((a, b), w)| a.conj() * b * *w)
                .sum();
            if j == k {
                diag += form.re;
                total += form.re;
            } else if k > j {
                // The (k, j) term is the complex conjugate of (j, k).
                total += 2.0 * (time_average_factor(ek - ej, t) * form).re;
            }
        }
    }
    (total, diag)
}

fn eig_of(l: &OperatorHandle) -> Result<&Eigensystem> {
    l.eig().ok_or(Error::MissingCapability("eigensystem"))
}

fn check_inputs(l: &OperatorHandle, phi: &SpectralState, n_low: usize, t: f64) -> Result<()> {
    l.check(phi)?;
    ModeProjection::new(n_low)?;
    if n_low > l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: n_low,
        });
    }
    if !(t > 0.0) {
        return Err(Error::param("T", "must be positive"));
    }
    Ok(())
}

/// `(1/T)∫₀^T ‖P_N e^{iLt} P_sel φ‖² dt`, evaluated as an exact eigen-sum.
pub fn rage_average(
    l: &OperatorHandle,
    phi: &SpectralState,
    selection: &Selection,
    n_low: usize,
    t: f64,
) -> Result<f64> {
    let eig = eig_of(l)?;
    check_inputs(l, phi, n_low, t)?;
    let blocks = grouped_low_blocks(eig, phi.coeffs(), selection, n_low);
    Ok(averaged_quadratic(&blocks, &vec![1.0; n_low], t).0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Growth {
    /// `(1/T)∫₀^T ‖P_N e^{iLt} φ‖₁² dt`.
    pub value: f64,
    /// `Σ_J ‖P_N Q_J φ‖₁²`.
    pub limit: f64,
    pub off_diagonal: f64,
    /// `λ_N · N`.
    pub apriori_bound: f64,
    /// Smallest gap between distinct group energies.
    pub min_gap: f64,
}

/// Time-averaged low-mode H¹ energy of the free evolution and its long-time limit.
pub fn h1_growth_average(
    l: &OperatorHandle,
    ladder: &GammaLadder,
    phi: &SpectralState,
    n_low: usize,
    t: f64,
) -> Result<H1Growth> {
    let eig = eig_of(l)?;
    l.check_ladder(ladder)?;
    check_inputs(l, phi, n_low, t)?;
    let blocks = grouped_low_blocks(eig, phi.coeffs(), &Selection::Full, n_low);
    let (value, limit) = averaged_quadratic(&blocks, &ladder.lambdas()[..n_low], t);
    let energies: Vec<f64> = eig
        .groups()
        .iter()
        .map(|g| g.clone().map(|j| eig.values()[j]).sum::<f64>() / g.len() as f64)
        .collect();
    let min_gap = energies
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok(H1Growth {
        value,
        limit,
        off_diagonal: value - limit,
        apriori_bound: ladder.lambda(n_low) * n_low as f64,
        min_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::build_free_jacobi;

    fn free(n: usize) -> (OperatorHandle, GammaLadder) {
        let ladder = GammaLadder::linear(n).unwrap();
        let l = OperatorHandle::from_jacobi(&build_free_jacobi(n).unwrap(), &ladder)
            .unwrap()
            .diagonalized()
            .unwrap();
        (l, ladder)
    }

    #[test]
    fn factor_limits() {
        assert_eq!(time_average_factor(0.0, 5.0), Complex64::new(1.0, 0.0));
        let z = time_average_factor(1e-9, 1.0);
        assert!((z - Complex64::new(1.0, 5e-10)).norm() < 1e-15);
        let z = time_average_factor(2.0, 3.0);
        let direct = (Complex64::new(0.0, 6.0).exp() - 1.0) / Complex64::new(0.0, 6.0);
        assert!((z - direct).norm() < 1e-15);
    }

    #[test]
    fn empty_selection_and_eigenvector_cases() {
        let (l, ladder) = free(24);
        let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
        assert_eq!(rage_average(&l, &phi, &Selection::Nothing, 4, 10.0).unwrap(), 0.0);

        let eig = l.eig().unwrap();
        let w = SpectralState::from_coeffs(&ladder, eig.vector(5)).unwrap();
        let want: f64 = w.coeffs()[..4].iter().map(|c| c.norm_sqr()).sum();
        for t in [1.0, 100.0] {
            let v = rage_average(&l, &w, &Selection::Full, 4, t).unwrap();
            assert!((v - want).abs() < 1e-14);
        }
        let complement = Selection::Indices { indices: vec![0, 1, 2] };
        assert!(rage_average(&l, &w, &complement, 4, 10.0).unwrap() < 1e-28);
    }

    #[test]
    fn rage_average_matches_time_quadrature() {
        let (l, ladder) = free(20);
        let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
        let t_end = 7.0;
        let n = 7000;
        let mut acc = 0.0;
        for i in 0..=n {
            let t = t_end * i as f64 / n as f64;
            let x = crate::engine::free_evolve(&l, t, &phi).unwrap();
            let v: f64 = x.coeffs()[..3].iter().map(|c| c.norm_sqr()).sum();
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * v;
        }
        let quad = acc / n as f64;
        let exact = rage_average(&l, &phi, &Selection::Full, 3, t_end).unwrap();
        assert!((quad - exact).abs() < 1e-6, "{quad} vs {exact}");
    }

    #[test]
    fn single_eigenvector_h1_growth_is_constant() {
        let (l, ladder) = free(16);
        let w = SpectralState::from_coeffs(&ladder, l.eig().unwrap().vector(3)).unwrap();
        let a = h1_growth_average(&l, &ladder, &w, 6, 1.0).unwrap();
        let b = h1_growth_average(&l, &ladder, &w, 6, 1e4).unwrap();
        assert!((a.value - b.value).abs() < 1e-14);
        assert!(a.off_diagonal.abs() < 1e-14);
    }

    #[test]
    fn missing_eigensystem_is_reported() {
        let ladder = GammaLadder::linear(8).unwrap();
        let l = OperatorHandle::from_jacobi(&build_free_jacobi(8).unwrap(), &ladder).unwrap();
        let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
        assert!(matches!(
            rage_average(&l, &phi, &Selection::Full, 2, 1.0),
            Err(Error::MissingCapability(_))
        ));
    }
}

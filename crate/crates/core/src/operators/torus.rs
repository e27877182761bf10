use super::{OperatorHandle, VelocityField};
use crate::error::{Error, Result};
use crate::fourier::Fft2;
use crate::spectral::{GammaLadder, SpectralState, TorusLattice};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Smallest FFT-friendly grid that resolves the product of a band-`k` field
/// with a band-`k_u` velocity without aliasing into the retained band, and is
/// at least `3k`.
pub fn collocation_size(k: usize, k_u: usize) -> usize {
    let need = (3 * k).max(2 * k + k_u + 1).max(4);
    let mut m = need;
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 && m.is_multiple_of(2) {
            return m;
        }
        m += 1;
    }
}

/// State on the torus lattice from `(k, c_k)` pairs; `k = 0` sets the mean.
pub fn lattice_state(
    lattice: &TorusLattice,
    entries: &[((i64, i64), Complex64)],
) -> Result<SpectralState> {
    let ladder = GammaLadder::torus(lattice);
    let mut s = SpectralState::zeros(&ladder);
    let mut mean = Complex64::new(0.0, 0.0);
    for &(k, c) in entries {
        if k == (0, 0) {
            mean += c;
            continue;
        }
        let i = lattice
            .index_of(k)
            .ok_or_else(|| Error::param("k", format!("mode {k:?} outside |k| <= {}", lattice.k_max())))?;
        s.coeffs_mut()[i] += c;
    }
    Ok(s.with_mean(mean))
}

/// Diagonal generator with entry `2π α·k` on lattice mode `k`.
pub fn build_constant_flow_generator(alpha: [f64; 2], k: usize) -> Result<OperatorHandle> {
    let lattice = TorusLattice::new(k);
    let ladder = GammaLadder::torus(&lattice);
    let entries = lattice
        .modes()
        .iter()
        .map(|&(k1, k2)| 2.0 * PI * (alpha[0] * k1 as f64 + alpha[1] * k2 as f64))
        .collect();
    Ok(OperatorHandle::diagonal("constant-flow", &ladder, entries)?
        .with_tag(format!("constant-flow[{},{}]", alpha[0], alpha[1])))
}

/// Matrix-free pseudospectral action of `L = i u·∇` on the lattice modes.
#[derive(Debug, Clone)]
pub struct AdvectionGenerator {
    lattice: TorusLattice,
    fft: Fft2,
    slots: Vec<usize>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    sup: f64,
    lip: f64,
}

impl AdvectionGenerator {
    pub fn new(u: &VelocityField, k: usize) -> Result<Self> {
        u.validate()?;
        let lattice = TorusLattice::new(k);
        let m = collocation_size(k, u.band());
        let fft = Fft2::new(m);
        let (u1, u2) = u.sample_grid(m)?;
        let slots = lattice.modes().iter().map(|&q| fft.slot(q)).collect();
        Ok(Self {
            lattice,
            fft,
            slots,
            u1,
            u2,
            sup: u.sup_bound(),
            lip: u.lip(),
        })
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn grid_size(&self) -> usize {
        self.fft.size()
    }

    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub(crate) fn norm_bound(&self) -> f64 {
        self.sup * 2.0 * PI * std::f64::consts::SQRT_2 * self.lattice.k_max() as f64
    }

    /// `y = i u·∇x` restricted to the retained band.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n2 = self.fft.size().pow(2);
        let zero = Complex64::new(0.0, 0.0);
        let mut gx = vec![zero; n2];
        let mut gy = vec![zero; n2];
        for ((&(k1, k2), &s), &c) in self.lattice.modes().iter().zip(&self.slots).zip(x) {
            let d = Complex64::new(0.0, -2.0 * PI) * c;
            gx[s] = d * k1 as f64;
            gy[s] = d * k2 as f64;
        }
        self.fft.synthesize(&mut gx);
        self.fft.synthesize(&mut gy);
        for ((a, b), (v1, v2)) in gx.iter_mut().zip(&gy).zip(self.u1.iter().zip(&self.u2)) {
            *a = *a * *v1 + *b * *v2;
        }
        self.fft.analyze(&mut gx);
        for (yi, &s) in y.iter_mut().zip(&self.slots) {
            *yi = Complex64::new(0.0, 1.0) * gx[s];
        }
    }

    /// `u·∇f` sampled on the collocation grid for a lattice state.
    pub fn transport_on_grid(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.apply(x, &mut y);
        y.iter().map(|z| z * Complex64::new(0.0, -1.0)).collect()
    }
}

/// `L = i u·∇` on `|k|_∞ ≤ K`, acting on the torus ladder basis.
pub fn build_advection_generator(u: &VelocityField, k: usize) -> Result<OperatorHandle> {
    let gen = AdvectionGenerator::new(u, k)?;
    let ladder = GammaLadder::torus(gen.lattice());
    Ok(OperatorHandle::advection(gen, &ladder)?.with_tag(format!("advection[{}]", u.label())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn collocation_sizes_are_smooth_and_large_enough() {
        assert_eq!(collocation_size(8, 1), 24);
        assert_eq!(collocation_size(16, 1), 48);
        let m = collocation_size(85, 1);
        assert!(m >= 255 && m.is_multiple_of(2), "{m}");
    }

    #[test]
    fn constant_flow_eigenvalues() {
        let alpha = [0.3, 0.7];
        let l = build_constant_flow_generator(alpha, 3).unwrap();
        let lattice = TorusLattice::new(3);
        let d = l.diagonal_entries().unwrap();
        let i = lattice.index_of((1, 0)).unwrap();
        assert!((d[i] - 2.0 * PI * alpha[0]).abs() < 1e-15);
    }

    #[test]
    fn advection_with_constant_velocity_matches_diagonal_generator() {
        let alpha = [0.41421356, 0.7320508];
        let k = 6;
        let diag = build_constant_flow_generator(alpha, k).unwrap();
        let adv = build_advection_generator(&VelocityField::constant(alpha), k).unwrap();
        let d = diag.diagonal_entries().unwrap();
        for j in 0..adv.dim() {
            let mut e = vec![Complex64::new(0.0, 0.0); adv.dim()];
            e[j] = Complex64::new(1.0, 0.0);
            let mut out = e.clone();
            adv.apply_slice(&e, &mut out);
            for (i, z) in out.iter().enumerate() {
                let want = if i == j { d[j] } else { 0.0 };
                assert!((z - want).norm() < 1e-12, "mode {j} row {i}: {z}");
            }
        }
    }

    #[test]
    fn shear_generator_is_symmetric_and_real_preserving() {
        let l = build_advection_generator(&VelocityField::shear(), 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(l.hermiticity_defect(100, &mut rng) < 1e-10);
        assert!(l.norm_bound() > 0.0);
    }
}

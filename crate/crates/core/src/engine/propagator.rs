use super::{generator_matrix, Method, Scaling};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::operators::OperatorHandle;
use crate::spectral::{norm_sqr, GammaLadder};
use num_complex::Complex64;

/// Growth of one RK4 inner step beyond which the step size is rejected.
pub const RK4_GROWTH_TOL: f64 = 1e-6;

/// Advances raw coefficient vectors under `dφ/dt = (iaL − gΓ)φ`.
pub struct Propagator<'a> {
    l: &'a OperatorHandle,
    lambdas: Vec<f64>,
    a: f64,
    g: f64,
    method: Method,
    dt: f64,
    cfl: f64,
    generator: Option<CMatrix>,
    cached: Option<(u64, CMatrix)>,
    scratch: Vec<Vec<Complex64>>,
}

impl<'a> Propagator<'a> {
    pub fn new(
        l: &'a OperatorHandle,
        ladder: &GammaLadder,
        scaling: Scaling,
        method: Method,
        dt: f64,
        cfl: f64,
    ) -> Result<Self> {
        l.check_ladder(ladder)?;
        scaling.validate()?;
        let generator = match method {
            Method::DenseOracle => Some(generator_matrix(l, ladder, scaling)?),
            Method::EigSplit if l.eig().is_none() && !l.is_diagonal() => {
                return Err(Error::MissingCapability("eigensystem for eigsplit"))
            }
            _ => None,
        };
        let n = l.dim();
        Ok(Self {
            l,
            lambdas: ladder.lambdas().to_vec(),
            a: scaling.advection(),
            g: scaling.diffusion(),
            method,
            dt,
            cfl,
            generator,
            cached: None,
            scratch: vec![vec![Complex64::new(0.0, 0.0); n]; 5],
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Whether one step of any length is exact.
    pub fn is_exact(&self) -> bool {
        match self.method {
            Method::DenseOracle => true,
            Method::EigSplit => self.a == 0.0 || self.l.commutes_with_gamma(),
            Method::StrangRk4 => self.a == 0.0,
        }
    }

    /// Advance by `duration`, subdividing into steps no longer than `dt`.
    pub fn advance(&mut self, x: &mut [Complex64], duration: f64) -> Result<()> {
        if duration == 0.0 {
            return Ok(());
        }
        if self.is_exact() {
            return self.step(x, duration);
        }
        let n = (duration / self.dt - 1e-9).ceil().max(1.0) as usize;
        let h = duration / n as f64;
        for _ in 0..n {
            self.step(x, h)?;
        }
        Ok(())
    }

    /// One step of length `h`.
    pub fn step(&mut self, x: &mut [Complex64], h: f64) -> Result<()> {
        match self.method {
            Method::DenseOracle => self.dense_step(x, h),
            Method::EigSplit => {
                self.heat(x, 0.5 * h);
                self.eigen_unitary(x, h);
                self.heat(x, 0.5 * h);
                Ok(())
            }
            Method::StrangRk4 => {
                self.heat(x, 0.5 * h);
                self.rk4_unitary(x, h)?;
                self.heat(x, 0.5 * h);
                Ok(())
            }
        }
    }

    fn dense_step(&mut self, x: &mut [Complex64], h: f64) -> Result<()> {
        let key = h.to_bits();
        if self.cached.as_ref().map(|c| c.0) != Some(key) {
            let g = self.generator.as_ref().expect("dense generator");
            let p = linalg::expm(&(g * Complex64::new(h, 0.0)));
            self.cached = Some((key, p));
        }
        let p = &self.cached.as_ref().unwrap().1;
        let y = &mut self.scratch[0];
        linalg::matvec(p, x, y);
        x.copy_from_slice(y);
        Ok(())
    }

    fn heat(&self, x: &mut [Complex64], h: f64) {
        if self.g == 0.0 {
            return;
        }
        for (c, lam) in x.iter_mut().zip(&self.lambdas) {
            *c *= (-self.g * lam * h).exp();
        }
    }

    /// Exact `e^{iahL}` through the eigensystem or the diagonal entries.
    pub(crate) fn eigen_unitary(&self, x: &mut [Complex64], h: f64) {
        unitary_exact(self.l, x, self.a * h);
    }

    fn rk4_unitary(&mut self, x: &mut [Complex64], h: f64) -> Result<()> {
        let theta = self.a * h * self.l.norm_bound();
        if theta == 0.0 {
            return Ok(());
        }
        let inner = (theta / self.cfl - 1e-12).ceil().max(1.0) as usize;
        let k = self.a * h / inner as f64;
        let norm0 = norm_sqr(x).sqrt();
        for _ in 0..inner {
            let before = norm_sqr(x).sqrt();
            rk4_step(self.l, x, k, &mut self.scratch);
            let after = norm_sqr(x).sqrt();
            if before > 0.0 && after > before * (1.0 + RK4_GROWTH_TOL) {
                return Err(Error::StepSize {
                    growth: after / before,
                });
            }
        }
        let norm1 = norm_sqr(x).sqrt();
        if norm1 > 0.0 {
            let s = norm0 / norm1;
            x.iter_mut().for_each(|c| *c *= s);
        }
        Ok(())
    }
}

/// `x ← e^{iθL} x` exactly, for diagonal operators or ones with an eigensystem.
pub(crate) fn unitary_exact(l: &OperatorHandle, x: &mut [Complex64], theta: f64) {
    if theta == 0.0 {
        return;
    }
    if let Some(d) = l.diagonal_entries() {
        for (c, e) in x.iter_mut().zip(d) {
            *c *= Complex64::from_polar(1.0, theta * e);
        }
        return;
    }
    let eig = l.eig().expect("eigensystem checked at construction");
    let mut c = eig.analyze(x);
    for (ci, e) in c.iter_mut().zip(eig.values()) {
        *ci *= Complex64::from_polar(1.0, theta * e);
    }
    x.copy_from_slice(&eig.synthesize(&c));
}

/// One classical RK4 step of `ψ' = iLψ` with step `k`.
pub(crate) fn rk4_step(l: &OperatorHandle, x: &mut [Complex64], k: f64, scratch: &mut [Vec<Complex64>]) {
    let i = Complex64::new(0.0, 1.0);
    let n = x.len();
    let (k1, rest) = scratch.split_at_mut(1);
    let (k2, rest) = rest.split_at_mut(1);
    let (k3, rest) = rest.split_at_mut(1);
    let (k4, rest) = rest.split_at_mut(1);
    let tmp = &mut rest[0];
    let (k1, k2, k3, k4) = (&mut k1[0], &mut k2[0], &mut k3[0], &mut k4[0]);

    l.apply_slice(x, k1);
    k1.iter_mut().for_each(|z| *z *= i);
    for j in 0..n {
        tmp[j] = x[j] + k1[j] * (0.5 * k);
    }
    l.apply_slice(tmp, k2);
    k2.iter_mut().for_each(|z| *z *= i);
    for j in 0..n {
        tmp[j] = x[j] + k2[j] * (0.5 * k);
    }
    l.apply_slice(tmp, k3);
    k3.iter_mut().for_each(|z| *z *= i);
    for j in 0..n {
        tmp[j] = x[j] + k3[j] * k;
    }
    l.apply_slice(tmp, k4);
    k4.iter_mut().for_each(|z| *z *= i);
    for j in 0..n {
        x[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (k / 6.0);
    }
}

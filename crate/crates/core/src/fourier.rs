//! Square 2-D FFTs on an `M × M` collocation grid.
//!
//! Grid values are stored row-major with index `i1 * M + i2`, where `i1`
//! samples `x = i1 / M` and `i2` samples `y = i2 / M`. A coefficient `c_k`
//! multiplies `e^{-2πi k·x}`, so synthesis is a forward transform and
//! analysis is an inverse transform divided by `M²`.

use crate::parallel;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

const ROWS_PER_TASK: usize = 16;

#[derive(Clone)]
pub struct Fft2 {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("m", &self.m).finish()
    }
}

impl Fft2 {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// Grid index holding the coefficient of mode `k`.
    pub fn slot(&self, k: (i64, i64)) -> usize {
        let m = self.m as i64;
        (k.0.rem_euclid(m) as usize) * self.m + k.1.rem_euclid(m) as usize
    }

    /// Coefficients to grid values (`Σ c_k e^{-2πi k·x_j}`).
    pub fn synthesize(&self, data: &mut [Complex64]) {
        self.transform(&self.fwd, data);
    }

    /// Grid values to coefficients, including the `1/M²` factor.
    pub fn analyze(&self, data: &mut [Complex64]) {
        self.transform(&self.inv, data);
        let s = 1.0 / (self.m * self.m) as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    fn transform(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let m = self.m;
        assert_eq!(data.len(), m * m);
        let rows = |buf: &mut [Complex64]| {
            parallel::for_each_chunk(buf, m * ROWS_PER_TASK, |_, chunk| plan.process(chunk));
        };
        rows(data);
        let mut t = transpose(data, m);
        rows(&mut t);
        let back = transpose(&t, m);
        data.copy_from_slice(&back);
    }
}

fn transpose(data: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    const B: usize = 32;
    for ib in (0..m).step_by(B) {
        for jb in (0..m).step_by(B) {
            for i in ib..(ib + B).min(m) {
                for j in jb..(jb + B).min(m) {
                    out[j * m + i] = data[i * m + j];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn synthesis_follows_negative_exponent_convention() {
        let m = 8;
        let f = Fft2::new(m);
        let mut grid = vec![Complex64::new(0.0, 0.0); m * m];
        grid[f.slot((1, -2))] = Complex64::new(1.0, 0.0);
        f.synthesize(&mut grid);
        for i1 in 0..m {
            for i2 in 0..m {
                let (x, y) = (i1 as f64 / m as f64, i2 as f64 / m as f64);
                let want = Complex64::from_polar(1.0, -2.0 * PI * (x - 2.0 * y));
                assert!((grid[i1 * m + i2] - want).norm() < 1e-13);
            }
        }
        f.analyze(&mut grid);
        for (i, z) in grid.iter().enumerate() {
            let want = if i == f.slot((1, -2)) { 1.0 } else { 0.0 };
            assert!((z - want).norm() < 1e-14);
        }
    }
}

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use num_complex::Complex64;
use std::ops::Range;

/// Eigenvalue grouping tolerance relative to the spectral diameter.
pub const GROUP_TOL: f64 = 1e-9;

/// Orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub enum EigenVectors {
    Dense(CMatrix),
    /// Column `c` is the basis vector `e_{perm[c]}`.
    Permutation(Vec<usize>),
}

/// Ascending eigenvalues `E_j`, eigenvectors and degeneracy groups.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    values: Vec<f64>,
    vectors: EigenVectors,
    groups: Vec<Range<usize>>,
}

impl Eigensystem {
    pub fn new(values: Vec<f64>, vectors: EigenVectors) -> Result<Self> {
        let n = values.len();
        let cols = match &vectors {
            EigenVectors::Dense(m) => m.ncols(),
            EigenVectors::Permutation(p) => p.len(),
        };
        if cols != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: cols,
            });
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("values", "eigenvalues must be ascending"));
        }
        let groups = group_by_tolerance(&values);
        Ok(Self {
            values,
            vectors,
            groups,
        })
    }

    /// Eigensystem of a diagonal operator.
    pub fn from_diagonal(entries: &[f64]) -> Self {
        let mut perm: Vec<usize> = (0..entries.len()).collect();
        perm.sort_by(|&i, &j| entries[i].total_cmp(&entries[j]));
        let values: Vec<f64> = perm.iter().map(|&i| entries[i]).collect();
        let groups = group_by_tolerance(&values);
        Self {
            values,
            vectors: EigenVectors::Permutation(perm),
            groups,
        }
    }

    /// Replace the automatic grouping with explicit contiguous groups.
    pub fn with_groups(mut self, groups: Vec<Range<usize>>) -> Result<Self> {
        let mut next = 0;
        for g in &groups {
            if g.start != next || g.end <= g.start {
                return Err(Error::Grouping(format!(
                    "group {g:?} overlaps or leaves a gap after index {next}"
                )));
            }
            next = g.end;
        }
        if next != self.values.len() {
            return Err(Error::Grouping(format!(
                "groups cover {next} of {} eigenvalues",
                self.values.len()
            )));
        }
        self.groups = groups;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &EigenVectors {
        &self.vectors
    }

    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    pub fn diameter(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Column `c` as a coefficient vector.
    pub fn vector(&self, c: usize) -> Vec<Complex64> {
        match &self.vectors {
            EigenVectors::Dense(m) => m.column(c).iter().copied().collect(),
            EigenVectors::Permutation(p) => {
                let mut v = vec![Complex64::new(0.0, 0.0); p.len()];
                v[p[c]] = Complex64::new(1.0, 0.0);
                v
            }
        }
    }

    /// Spectral coordinates `U† x`.
    pub fn analyze(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.vectors {
            EigenVectors::Dense(m) => {
                let mut y = vec![Complex64::new(0.0, 0.0); m.ncols()];
                linalg::adjoint_matvec(m, x, &mut y);
                y
            }
            EigenVectors::Permutation(p) => p.iter().map(|&i| x[i]).collect(),
        }
    }

    /// `U c` from spectral coordinates.
    pub fn synthesize(&self, c: &[Complex64]) -> Vec<Complex64> {
        match &self.vectors {
            EigenVectors::Dense(m) => {
                let mut y = vec![Complex64::new(0.0, 0.0); m.nrows()];
                linalg::matvec(m, c, &mut y);
                y
            }
            EigenVectors::Permutation(p) => {
                let mut y = vec![Complex64::new(0.0, 0.0); p.len()];
                for (ci, &i) in c.iter().zip(p) {
                    y[i] = *ci;
                }
                y
            }
        }
    }

    /// `‖M − Σ E_j Q_j‖_F` for a dense reference matrix `M`.
    pub fn reconstruction_error(&self, m: &CMatrix) -> f64 {
        let u = match &self.vectors {
            EigenVectors::Dense(u) => u.clone(),
            EigenVectors::Permutation(_) => {
                let n = self.len();
                CMatrix::from_fn(n, n, |r, c| self.vector(c)[r])
            }
        };
        let scaled = CMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, c)] * self.values[c]);
        (linalg::cmul(&scaled, &u.adjoint()) - m).norm()
    }
}

fn group_by_tolerance(values: &[f64]) -> Vec<Range<usize>> {
    let diameter = match (values.first(), values.last()) {
        (Some(a), Some(b)) => b - a,
        _ => return Vec::new(),
    };
    let tol = GROUP_TOL * diameter;
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > tol {
            groups.push(start..i);
            start = i;
        }
    }
    groups.push(start..values.len());
    groups
}

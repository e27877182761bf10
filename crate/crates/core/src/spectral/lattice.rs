use serde::{Deserialize, Serialize};

/// Nonzero Fourier modes `k ∈ Z²` with `max(|k₁|, |k₂|) ≤ K`.
///
/// Ordered by `|k|²`, ties broken lexicographically on `(k₁, k₂)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "usize", into = "usize")]
pub struct TorusLattice {
    k_max: usize,
    modes: Vec<(i64, i64)>,
    lookup: Vec<usize>,
}

impl From<usize> for TorusLattice {
    fn from(k_max: usize) -> Self {
        Self::new(k_max)
    }
}

impl From<TorusLattice> for usize {
    fn from(l: TorusLattice) -> usize {
        l.k_max
    }
}

impl TorusLattice {
    pub fn new(k_max: usize) -> Self {
        let kk = k_max as i64;
        let mut modes: Vec<(i64, i64)> = (-kk..=kk)
            .flat_map(|a| (-kk..=kk).map(move |b| (a, b)))
            .filter(|&k| k != (0, 0))
            .collect();
        modes.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
        let side = 2 * k_max + 1;
        let mut lookup = vec![usize::MAX; side * side];
        for (i, &(a, b)) in modes.iter().enumerate() {
            lookup[((a + kk) as usize) * side + (b + kk) as usize] = i;
        }
        Self {
            k_max,
            modes,
            lookup,
        }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[(i64, i64)] {
        &self.modes
    }

    pub fn label(&self) -> String {
        format!("torus-laplacian-{}", self.k_max)
    }

    /// 0-based storage index of mode `k`, if retained.
    pub fn index_of(&self, k: (i64, i64)) -> Option<usize> {
        let kk = self.k_max as i64;
        if k.0.abs() > kk || k.1.abs() > kk {
            return None;
        }
        let side = 2 * self.k_max + 1;
        let i = self.lookup[((k.0 + kk) as usize) * side + (k.1 + kk) as usize];
        (i != usize::MAX).then_some(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_by_radius_then_lexicographic() {
        let l = TorusLattice::new(2);
        assert_eq!(l.len(), 24);
        assert_eq!(&l.modes()[..4], &[(-1, 0), (0, -1), (0, 1), (1, 0)]);
        for (i, &k) in l.modes().iter().enumerate() {
            assert_eq!(l.index_of(k), Some(i));
        }
        assert_eq!(l.index_of((0, 0)), None);
        assert_eq!(l.index_of((3, 0)), None);
    }
}

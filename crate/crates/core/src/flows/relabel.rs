use super::Density;
use crate::error::{Error, Result};
use crate::linalg::gauss_legendre;
use crate::operators::VelocityField;
use serde::{Deserialize, Serialize};

const ROOT_TOL: f64 = 1e-13;
const ROOT_ITERS: usize = 200;

/// Quadrature layout for the cumulative integrals along one vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelabelSettings {
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Panels per unit length in `y`.
    pub panels: usize,
}

impl Default for RelabelSettings {
    fn default() -> Self {
        Self {
            order: 12,
            panels: 80,
        }
    }
}

/// Cumulative `∫₀^y F(x, z) dz` and `∫₀^y F_x(x, z) dz` at panel edges for fixed `x`.
struct Column<'a, D: ?Sized> {
    density: &'a D,
    x: f64,
    nodes: &'a [f64],
    weights: &'a [f64],
    edges: &'a [f64],
    cum: Vec<f64>,
    cum_x: Vec<f64>,
}

impl<'a, D: Density + ?Sized> Column<'a, D> {
    fn new(density: &'a D, x: f64, rule: &'a Rule) -> Self {
        let mut col = Self {
            density,
            x,
            nodes: &rule.nodes,
            weights: &rule.weights,
            edges: &rule.edges,
            cum: Vec::with_capacity(rule.edges.len()),
            cum_x: Vec::with_capacity(rule.edges.len()),
        };
        let (mut c, mut cx) = (0.0, 0.0);
        col.cum.push(0.0);
        col.cum_x.push(0.0);
        for w in rule.edges.windows(2) {
            let (a, b) = col.partial(w[0], w[1]);
            c += a;
            cx += b;
            col.cum.push(c);
            col.cum_x.push(cx);
        }
        col
    }

    fn partial(&self, a: f64, b: f64) -> (f64, f64) {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut s, mut sx) = (0.0, 0.0);
        for (t, w) in self.nodes.iter().zip(self.weights) {
            let z = mid + half * t;
            s += w * self.density.value(self.x, z);
            sx += w * self.density.dx(self.x, z);
        }
        (half * s, half * sx)
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn panel_of(&self, y: f64) -> usize {
        let j = self.edges.partition_point(|&e| e <= y);
        j.clamp(1, self.edges.len() - 1) - 1
    }

    /// `(∫₀^y F, ∫₀^y F_x)`.
    fn integrals(&self, y: f64) -> (f64, f64) {
        let j = self.panel_of(y);
        let (a, b) = self.partial(self.edges[j], y);
        (self.cum[j] + a, self.cum_x[j] + b)
    }

    /// Solve `∫₀^y F = target` by safeguarded Newton inside the bracketing panel.
    fn invert(&self, target: f64) -> Result<f64> {
        let j = self.cum.partition_point(|&c| c <= target).clamp(1, self.cum.len() - 1) - 1;
        let (mut lo, mut hi) = (self.edges[j], self.edges[j + 1]);
        let mut y = lo + (hi - lo) * ((target - self.cum[j]) / (self.cum[j + 1] - self.cum[j])).clamp(0.0, 1.0);
        for _ in 0..ROOT_ITERS {
            let g = self.cum[j] + self.partial(self.edges[j], y).0 - target;
            if g > 0.0 {
                hi = y;
            } else {
                lo = y;
            }
            let f = self.density.value(self.x, y);
            let mut next = y - g / f;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= ROOT_TOL || hi - lo <= ROOT_TOL {
                return Ok(next);
            }
            y = next;
        }
        Err(Error::Resolution(format!(
            "vertical relabeling did not converge at x = {}",
            self.x
        )))
    }
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    edges: Vec<f64>,
}

impl Rule {
    fn new<D: Density + ?Sized>(density: &D, settings: &RelabelSettings) -> Result<Self> {
        if settings.order == 0 || settings.panels == 0 {
            return Err(Error::param("relabel", "order and panels must be positive"));
        }
        let mut cuts = vec![0.0];
        let mut bps: Vec<f64> = density
            .breakpoints()
            .into_iter()
            .filter(|b| *b > 0.0 && *b < 1.0)
            .collect();
        bps.sort_by(f64::total_cmp);
        cuts.extend(bps);
        cuts.push(1.0);
        let mut edges = vec![0.0];
        for w in cuts.windows(2) {
            let n = ((w[1] - w[0]) * settings.panels as f64).ceil().max(1.0) as usize;
            for i in 1..=n {
                edges.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
            }
        }
        let (nodes, weights) = gauss_legendre(settings.order);
        Ok(Self {
            nodes,
            weights,
            edges,
        })
    }
}

/// Change of variables `Z(x, y) = (p(x), q(x, y))` with `p = ∫₀^x F̄`, `q = ∫₀^y F / F̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelabelMap {
    pub n: usize,
    pub settings: RelabelSettings,
    /// `x = p⁻¹(i₁/n)`.
    pub x: Vec<f64>,
    /// `y` with `q(x_{i₁}, y) = i₂/n`, row-major in `i₁`.
    pub y: Vec<f64>,
}

impl RelabelMap {
    /// Evaluate `Z` at `(x, y)` with `x, y ∈ [0, 1]`.
    pub fn forward<D: Density + ?Sized>(&self, density: &D, x: f64, y: f64) -> Result<(f64, f64)> {
        let rule = Rule::new(density, &self.settings)?;
        let col = Column::new(density, x, &rule);
        Ok((density.marginal(x).p, col.integrals(y).0 / col.total()))
    }

    /// Inverse sample `Z⁻¹(i₁/n, i₂/n)`.
    pub fn inverse(&self, i1: usize, i2: usize) -> (f64, f64) {
        (self.x[i1], self.y[i1 * self.n + i2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelabelReport {
    pub n: usize,
    pub band: usize,
    pub alpha: f64,
    /// Spectral divergence of the sampled field before projection.
    pub divergence_before: f64,
    /// Norm removed by the Leray projection.
    pub projection_removed: f64,
    pub divergence_after: f64,
    pub min_density: f64,
}

fn invert_p<D: Density + ?Sized>(density: &D, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x = target;
    for _ in 0..ROOT_ITERS {
        let mg = density.marginal(x);
        let g = mg.p - target;
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - g / mg.fbar;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= ROOT_TOL || hi - lo <= ROOT_TOL {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Resolution(format!("horizontal relabeling did not converge at p = {target}")))
}

/// One `(p, q)` grid line: inverse samples and pushed-forward velocity.
struct Line {
    x: f64,
    y: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    min_f: f64,
}

fn relabel_line<D: Density + ?Sized>(density: &D, rule: &Rule, n: usize, i1: usize) -> Result<Line> {
    let alpha = density.alpha();
    let x = invert_p(density, i1 as f64 / n as f64)?;
    let col = Column::new(density, x, rule);
    let mg = density.marginal(x);
    let total = col.total();
    let mut line = Line {
        x,
        y: Vec::with_capacity(n),
        u1: Vec::with_capacity(n),
        u2: Vec::with_capacity(n),
        min_f: f64::INFINITY,
    };
    for i2 in 0..n {
        let qt = i2 as f64 / n as f64;
        let y = col.invert(qt * total)?;
        let f = density.value(x, y);
        if !(f > 0.0) {
            return Err(Error::param("F", format!("nonpositive density {f} at ({x}, {y})")));
        }
        let g_x = col.integrals(y).1;
        let dq_dx = (g_x - qt * mg.dfbar) / mg.fbar;
        line.y.push(y);
        line.u1.push(mg.fbar * alpha / f);
        line.u2.push(alpha * dq_dx / f + 1.0 / mg.fbar);
        line.min_f = line.min_f.min(f);
    }
    Ok(line)
}

/// Push `w = (α/F, 1/F)` forward under `Z`, sample on the `n × n` grid in `(p, q)`,
/// truncate to `band` and project onto divergence-free fields.
pub fn relabel_to_lebesgue<D: Density + ?Sized>(
    density: &D,
    n: usize,
    band: usize,
    settings: &RelabelSettings,
) -> Result<(RelabelMap, VelocityField, RelabelReport)> {
    if n < 4 {
        return Err(Error::size("relabel grid", "need at least 4 points per side"));
    }
    let rule = Rule::new(density, settings)?;
    let lines = crate::parallel::map_range(n, |i1| relabel_line(density, &rule, n, i1));
    let mut map = RelabelMap {
        n,
        settings: *settings,
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n * n),
    };
    let mut u1 = Vec::with_capacity(n * n);
    let mut u2 = Vec::with_capacity(n * n);
    let mut min_density = f64::INFINITY;
    for line in lines {
        let line = line?;
        map.x.push(line.x);
        map.y.extend(line.y);
        u1.extend(line.u1);
        u2.extend(line.u2);
        min_density = min_density.min(line.min_f);
    }
    let label = format!("relabeled[alpha={:.6},n={n}]", density.alpha());
    let mut u = VelocityField::from_grid_samples(label, n, &u1, &u2, band)?;
    let divergence_before = u.divergence_norm();
    let projection_removed = u.leray_project();
    let divergence_after = u.divergence_norm();
    u.validate()?;
    let report = RelabelReport {
        n,
        band,
        alpha: density.alpha(),
        divergence_before,
        projection_removed,
        divergence_after,
        min_density,
    };
    Ok((map, u, report))
}

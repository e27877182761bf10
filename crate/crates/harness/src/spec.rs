//! Versioned JSON experiment description.

use crate::error::HarnessError;
use dissipator_core::diagnostics::{CertificateOptions, DecayBudget, ReportThresholds, Selection};
use dissipator_core::engine::{Method, Scaling};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; the CLI flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Simulate(SimulateSpec),
    Sweep(SweepSpec),
    Spectrum(SpectrumSpec),
    Rage(RageSpec),
    Nash(NashSpec),
    Quench(QuenchSpec),
    Flow(FlowSpec),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Simulate(_) => "simulate",
            Experiment::Sweep(_) => "sweep",
            Experiment::Spectrum(_) => "spectrum",
            Experiment::Rage(_) => "rage",
            Experiment::Nash(_) => "nash",
            Experiment::Quench(_) => "quench",
            Experiment::Flow(_) => "flow",
        }
    }
}

/// Velocity fields on T².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FlowSource {
    Zero,
    Shear,
    Cellular,
    Constant { alpha: [f64; 2] },
    /// Stream-function modes `ψ_k`.
    Stream { modes: Vec<Mode> },
    TimeChanged(TimeChangedParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeChangedParams {
    /// Rotation number; defaults to the truncated Liouville series.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Lacunary density modulation `1 + c Σ 2^{−j} cos(2π f_j ξ)`; defaults to the built-in profile.
    #[serde(default)]
    pub q: Option<LacunaryQ>,
    #[serde(default)]
    pub psi: Option<BumpParams>,
    /// Density floor; defaults to half of `min Q`.
    #[serde(default)]
    pub m: Option<f64>,
    /// Sampling grid for the relabeled field.
    pub grid: usize,
    /// Retained velocity band.
    pub band: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LacunaryQ {
    pub c: f64,
    pub frequencies: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpParams {
    pub a: f64,
    pub b: f64,
    pub power: u32,
}

/// One Fourier mode `c_k` on `e^{−2πik·x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub k: [i64; 2],
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Mode {
    pub fn entry(&self) -> ((i64, i64), Complex64) {
        ((self.k[0], self.k[1]), Complex64::new(self.re, self.im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum OperatorSpec {
    FreeJacobi { n: usize },
    Wvn { n: usize },
    /// Wigner–von Neumann operator with the spectrum outside `band` removed.
    WvnProjected {
        n: usize,
        #[serde(default = "default_band")]
        band: [f64; 2],
    },
    /// Diagonal `L` on the ladder `λ_n = n`, or on `ladder` when given.
    Diagonal {
        entries: Vec<f64>,
        #[serde(default)]
        ladder: Option<Vec<f64>>,
    },
    ConstantFlow { alpha: [f64; 2], k: usize },
    Advection { flow: FlowSource, k: usize },
}

fn default_band() -> [f64; 2] {
    [-2.0, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum InitialSpec {
    /// `e_j`, 1-based.
    Basis { j: usize },
    /// The operator's zero mode (Wigner–von Neumann operators only).
    ZeroMode,
    /// Lattice modes; `k = (0, 0)` sets the mean.
    Modes { modes: Vec<Mode> },
    /// Mean-zero periodized Gaussian on the lattice.
    Gaussian { sigma: f64 },
    /// Real coefficients in the ladder basis.
    Coefficients { values: Vec<f64> },
    /// Seeded random unit vector.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub operator: OperatorSpec,
    pub initial: InitialSpec,
    pub scaling: Scaling,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default = "one")]
    pub sample_stride: usize,
    #[serde(default = "half")]
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub operator: OperatorSpec,
    pub initial: InitialSpec,
    pub amplitudes: Vec<f64>,
    #[serde(default = "half")]
    pub delta: f64,
    #[serde(default)]
    pub budget: DecayBudget,
    /// Fail the run when `τ_δ(A)` increases along the grid.
    #[serde(default)]
    pub assert_nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    pub initial: InitialSpec,
    pub amplitudes: Vec<f64>,
    #[serde(default)]
    pub options: CertificateOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub operator: OperatorSpec,
    #[serde(default)]
    pub thresholds: ReportThresholds,
    #[serde(default)]
    pub certificate: Option<CertificateSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RageSpec {
    pub operator: OperatorSpec,
    pub initial: InitialSpec,
    pub n_low: usize,
    pub times: Vec<f64>,
    #[serde(default = "full")]
    pub selection: Selection,
}

fn full() -> Selection {
    Selection::Full
}

/// Log-spaced sample times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogTimes {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl LogTimes {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.t_min];
        }
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        (0..self.count)
            .map(|i| (a + (b - a) * i as f64 / (self.count - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NashSpec {
    pub flow: FlowSource,
    pub k: usize,
    pub amplitude: f64,
    pub sigma: f64,
    pub times: LogTimes,
    #[serde(default = "ten")]
    pub steps_per_interval: usize,
    pub window: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TemperatureSpec {
    /// `base + height (1 + cos 2πx)(1 + cos 2πy)/4`.
    RaisedCosine { base: f64, height: f64 },
    /// `base + height ((1 + cos 2πy)/2)^power`.
    YProfile { base: f64, height: f64, power: i32 },
}

impl TemperatureSpec {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            TemperatureSpec::RaisedCosine { base, height } => {
                base + height * (1.0 + (2.0 * PI * x).cos()) * (1.0 + (2.0 * PI * y).cos()) / 4.0
            }
            TemperatureSpec::YProfile { base, height, power } => {
                base + height * (0.5 * (1.0 + (2.0 * PI * y).cos())).powi(power)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub a_max: f64,
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    #[serde(default = "six")]
    pub bisection_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchSpec {
    pub flow: FlowSource,
    pub k: usize,
    #[serde(default = "half")]
    pub theta0: f64,
    #[serde(default = "unit")]
    pub rate: f64,
    pub initial: TemperatureSpec,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub sample_stride: usize,
    pub amplitudes: Vec<f64>,
    #[serde(default)]
    pub search: Option<SearchSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub flow: TimeChangedParams,
}

fn one() -> usize {
    1
}

fn six() -> usize {
    6
}

fn ten() -> usize {
    10
}

fn half() -> f64 {
    0.5
}

fn unit() -> f64 {
    1.0
}

struct Check(Vec<(String, String)>);

impl Check {
    fn require(&mut self, ok: bool, path: &str, reason: &str) {
        if !ok {
            self.0.push((path.to_string(), reason.to_string()));
        }
    }

    fn positive(&mut self, v: f64, path: &str) {
        self.require(v > 0.0 && v.is_finite(), path, "must be positive and finite");
    }

    fn nonnegative(&mut self, v: f64, path: &str) {
        self.require(v >= 0.0 && v.is_finite(), path, "must be nonnegative and finite");
    }

    fn amplitudes(&mut self, a: &[f64], path: &str) {
        self.require(!a.is_empty(), path, "must not be empty");
        for (i, &x) in a.iter().enumerate() {
            self.nonnegative(x, &format!("{path}[{i}]"));
        }
    }

    fn flow(&mut self, f: &FlowSource, path: &str) {
        if let FlowSource::TimeChanged(p) = f {
            self.time_changed(p, path);
        }
    }

    fn time_changed(&mut self, p: &TimeChangedParams, path: &str) {
        self.require(p.grid >= 4, &format!("{path}.grid"), "must be at least 4");
        self.require(2 * p.band < p.grid, &format!("{path}.band"), "must be below grid/2");
    }

    fn operator(&mut self, op: &OperatorSpec, path: &str) {
        match op {
            OperatorSpec::FreeJacobi { n } | OperatorSpec::Wvn { n } | OperatorSpec::WvnProjected { n, .. } => {
                self.require(*n >= 4, &format!("{path}.n"), "must be at least 4")
            }
            OperatorSpec::Diagonal { entries, ladder } => {
                self.require(!entries.is_empty(), &format!("{path}.entries"), "must not be empty");
                if let Some(l) = ladder {
                    self.require(l.len() == entries.len(), &format!("{path}.ladder"), "length must match entries");
                }
            }
            OperatorSpec::ConstantFlow { k, .. } => self.require(*k >= 1, &format!("{path}.k"), "must be at least 1"),
            OperatorSpec::Advection { flow, k } => {
                self.require(*k >= 1, &format!("{path}.k"), "must be at least 1");
                self.flow(flow, &format!("{path}.flow"));
            }
        }
    }

    fn finish(self) -> Result<(), HarnessError> {
        match self.0.into_iter().next() {
            None => Ok(()),
            Some((path, reason)) => Err(HarnessError::Schema(format!("{path}: {reason}"))),
        }
    }
}

impl ExperimentSpec {
    /// Semantic checks beyond the JSON shape, reported with field paths.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut c = Check(Vec::new());
        c.require(
            self.schema_version == SCHEMA_VERSION,
            "schema_version",
            "unsupported schema version",
        );
        let e = "experiment";
        match &self.experiment {
            Experiment::Simulate(s) => {
                c.operator(&s.operator, &format!("{e}.operator"));
                c.nonnegative(s.t_end, &format!("{e}.t_end"));
                c.positive(s.dt, &format!("{e}.dt"));
                c.require(s.sample_stride > 0, &format!("{e}.sample_stride"), "must be positive");
                c.require(s.delta > 0.0 && s.delta < 1.0, &format!("{e}.delta"), "must lie in (0, 1)");
                let (a, g) = (s.scaling.advection(), s.scaling.diffusion());
                c.require(a.is_finite() && g.is_finite() && a >= 0.0 && g >= 0.0, &format!("{e}.scaling"), "must be finite and nonnegative");
            }
            Experiment::Sweep(s) => {
                c.operator(&s.operator, &format!("{e}.operator"));
                c.amplitudes(&s.amplitudes, &format!("{e}.amplitudes"));
                c.require(s.delta > 0.0 && s.delta < 1.0, &format!("{e}.delta"), "must lie in (0, 1)");
                c.positive(s.budget.dt, &format!("{e}.budget.dt"));
                c.require(s.budget.samples >= 2, &format!("{e}.budget.samples"), "must be at least 2");
                if let Some(t) = s.budget.t_max {
                    c.positive(t, &format!("{e}.budget.t_max"));
                }
            }
            Experiment::Spectrum(s) => {
                c.operator(&s.operator, &format!("{e}.operator"));
                if let Some(cert) = &s.certificate {
                    c.amplitudes(&cert.amplitudes, &format!("{e}.certificate.amplitudes"));
                    c.positive(cert.options.dt, &format!("{e}.certificate.options.dt"));
                }
            }
            Experiment::Rage(s) => {
                c.operator(&s.operator, &format!("{e}.operator"));
                c.require(s.n_low > 0, &format!("{e}.n_low"), "must be positive");
                c.require(!s.times.is_empty(), &format!("{e}.times"), "must not be empty");
                for (i, &t) in s.times.iter().enumerate() {
                    c.positive(t, &format!("{e}.times[{i}]"));
                }
            }
            Experiment::Nash(s) => {
                c.flow(&s.flow, &format!("{e}.flow"));
                c.require(s.k >= 1, &format!("{e}.k"), "must be at least 1");
                c.nonnegative(s.amplitude, &format!("{e}.amplitude"));
                c.positive(s.sigma, &format!("{e}.sigma"));
                c.positive(s.times.t_min, &format!("{e}.times.t_min"));
                c.require(s.times.t_max > s.times.t_min, &format!("{e}.times.t_max"), "must exceed t_min");
                c.require(s.times.count >= 2, &format!("{e}.times.count"), "must be at least 2");
                c.require(s.steps_per_interval > 0, &format!("{e}.steps_per_interval"), "must be positive");
            }
            Experiment::Quench(s) => {
                c.flow(&s.flow, &format!("{e}.flow"));
                c.require(s.k >= 1, &format!("{e}.k"), "must be at least 1");
                c.require(s.theta0 > 0.0 && s.theta0 < 1.0, &format!("{e}.theta0"), "must lie in (0, 1)");
                c.nonnegative(s.rate, &format!("{e}.rate"));
                c.positive(s.dt, &format!("{e}.dt"));
                c.nonnegative(s.t_end, &format!("{e}.t_end"));
                c.require(s.sample_stride > 0, &format!("{e}.sample_stride"), "must be positive");
                c.amplitudes(&s.amplitudes, &format!("{e}.amplitudes"));
                if let Some(search) = &s.search {
                    c.nonnegative(search.a_max, &format!("{e}.search.a_max"));
                }
            }
            Experiment::Flow(s) => c.time_changed(&s.flow, &format!("{e}.flow")),
        }
        c.finish()
    }
}

/// Parse JSON text; type errors carry the field path.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ExperimentSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        HarnessError::Schema(format!("{path}: {}", e.into_inner()))
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Schema(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIMULATE: &str = r#"{
        "schema_version": 1,
        "seed": 3,
        "experiment": {
            "kind": "simulate",
            "operator": {"type": "diagonal", "entries": [0, 0, 0, 0]},
            "initial": {"type": "basis", "j": 1},
            "scaling": {"amplitude": 0.0},
            "t_end": 1.0,
            "dt": 0.01
        }
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let spec = parse_spec(SIMULATE).unwrap();
        assert_eq!(spec.experiment.kind(), "simulate");
        let again = parse_spec(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn negative_dt_names_the_field() {
        let text = SIMULATE.replace("\"dt\": 0.01", "\"dt\": -0.01");
        let err = parse_spec(&text).unwrap_err();
        assert!(matches!(err, HarnessError::Schema(_)));
        assert!(err.to_string().contains("experiment.dt"), "{err}");
    }

    #[test]
    fn unknown_fields_and_versions_are_rejected() {
        let text = SIMULATE.replace("\"dt\": 0.01", "\"dt\": 0.01, \"dtt\": 1");
        assert!(parse_spec(&text).is_err());
        let text = SIMULATE.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(parse_spec(&text).unwrap_err().to_string().contains("schema_version"));
    }

    #[test]
    fn type_errors_carry_a_path() {
        let text = SIMULATE.replace("\"seed\": 3", "\"seed\": \"x\"");
        assert!(parse_spec(&text).unwrap_err().to_string().contains("seed"));
    }

    #[test]
    fn log_times_are_geometric() {
        let t = LogTimes { t_min: 1e-4, t_max: 1e-2, count: 3 }.values();
        assert!((t[1] - 1e-3).abs() < 1e-15);
        assert!((t[2] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn time_changed_flow_source_parses() {
        let f: FlowSource = serde_json::from_str(r#"{"type": "time-changed", "grid": 64, "band": 10}"#).unwrap();
        assert!(matches!(f, FlowSource::TimeChanged(TimeChangedParams { grid: 64, band: 10, .. })));
    }
}

use crate::spec::{ExperimentSpec, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Outcome of one grid point inside a multi-point experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub amplitude: f64,
    pub summary: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub kind: String,
    pub spec: ExperimentSpec,
    pub code_version: String,
    pub wall_time_s: f64,
    /// Artifact file names relative to the output directory.
    pub artifacts: Vec<String>,
    pub summary: BTreeMap<String, f64>,
    /// Asserted invariants; the run fails if any is false.
    pub invariants: BTreeMap<String, bool>,
    /// Some time budget ran out before the target was reached.
    pub budget_exhausted: bool,
    #[serde(default)]
    pub points: Vec<PointRecord>,
}

/// A record without its wall time, stable across identical runs.
#[derive(Serialize)]
struct SummaryView<'a> {
    schema_version: u32,
    kind: &'a str,
    spec: &'a ExperimentSpec,
    code_version: &'a str,
    artifacts: &'a [String],
    summary: &'a BTreeMap<String, f64>,
    invariants: &'a BTreeMap<String, bool>,
    budget_exhausted: bool,
    points: &'a [PointRecord],
}

impl RunRecord {
    pub fn new(spec: &ExperimentSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: spec.experiment.kind().to_string(),
            spec: spec.clone(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: 0.0,
            artifacts: Vec::new(),
            summary: BTreeMap::new(),
            invariants: BTreeMap::new(),
            budget_exhausted: false,
            points: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn assert(&mut self, name: &str, ok: bool) {
        self.invariants.insert(name.to_string(), ok);
    }

    pub fn passed(&self) -> bool {
        self.invariants.values().all(|&ok| ok)
    }

    pub fn failed_invariants(&self) -> Vec<&str> {
        self.invariants
            .iter()
            .filter(|(_, ok)| !**ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn summary_json(&self) -> String {
        let view = SummaryView {
            schema_version: self.schema_version,
            kind: &self.kind,
            spec: &self.spec,
            code_version: &self.code_version,
            artifacts: &self.artifacts,
            summary: &self.summary,
            invariants: &self.invariants,
            budget_exhausted: self.budget_exhausted,
            points: &self.points,
        };
        serde_json::to_string_pretty(&view).expect("summary serializes")
    }
}

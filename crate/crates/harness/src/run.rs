//! Experiment execution.

use crate::build::{build_flow, build_initial, build_operator, relabeled_flow, Built};
use crate::dsvf::VelocityDump;
use crate::error::HarnessError;
use crate::export::{decay_csv, write_csv, DecayRow};
use crate::io::atomic_write;
use crate::record::{PointRecord, RunRecord};
use crate::spec::*;
use dissipator_core::diagnostics::{
    dissipation_time, eigenreport, h1_growth_average, nash_exponent_fit, nash_run,
    obstruction_certificate, rage_average, DecayBudget, DissipationTime, NashRunConfig,
};
use dissipator_core::engine::{evolve, EvolutionConfig, Method, Scaling};
use dissipator_core::operators::{OperatorHandle, VelocityField};
use dissipator_core::parallel;
use dissipator_core::quench::{
    critical_amplitude_search, l1_balance_residual, quench_detector, quench_run, CriticalAmplitude,
    IgnitionNonlinearity, QuenchConfig, QuenchVerdict, ReactionSystem, SearchConfig,
};
use dissipator_core::spectral::SpectralState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;
use std::time::Instant;

/// Stream reserved for operator probes, disjoint from point streams.
const PROBE_STREAM: u64 = u64::MAX;

/// Generator for sweep point `index`: the spec seed on its own stream.
pub fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Output of a decay sweep before anything is written.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub points: Vec<PointRecord>,
    pub rows: Vec<DecayRow>,
}

struct Out<'a> {
    dir: &'a Path,
    record: RunRecord,
}

impl Out<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), HarnessError> {
        atomic_write(&self.dir.join(name), bytes)?;
        self.record.artifacts.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), HarnessError> {
        write_csv(&self.dir.join(name), header, rows)?;
        self.record.artifacts.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(value)?;
        self.write(name, text.as_bytes())
    }
}

/// Run one experiment, writing artifacts plus `record.json` and `summary.json` into `dir`.
pub fn run_experiment(spec: &ExperimentSpec, dir: &Path) -> Result<RunRecord, HarnessError> {
    spec.validate()?;
    std::fs::create_dir_all(dir)?;
    let start = Instant::now();
    let mut out = Out {
        dir,
        record: RunRecord::new(spec),
    };
    match &spec.experiment {
        Experiment::Simulate(s) => simulate(s, spec.seed, &mut out)?,
        Experiment::Sweep(s) => run_sweep(s, spec.seed, &mut out)?,
        Experiment::Spectrum(s) => spectrum(s, spec.seed, &mut out)?,
        Experiment::Rage(s) => rage(s, spec.seed, &mut out)?,
        Experiment::Nash(s) => nash(s, &mut out)?,
        Experiment::Quench(s) => quench(s, &mut out)?,
        Experiment::Flow(s) => flow(s, &mut out)?,
    }
    let mut record = out.record;
    record.artifacts.push("record.json".into());
    record.artifacts.push("summary.json".into());
    record.wall_time_s = start.elapsed().as_secs_f64();
    atomic_write(&dir.join("summary.json"), record.summary_json().as_bytes())?;
    atomic_write(
        &dir.join("record.json"),
        serde_json::to_string_pretty(&record)?.as_bytes(),
    )?;
    Ok(record)
}

/// `τ_δ` under either scaling; the ε form is the amplitude form at `A = 1/ε` in slow time.
fn scaled_dissipation_time(
    b: &Built,
    scaling: Scaling,
    delta: f64,
    phi0: &SpectralState,
    budget: &DecayBudget,
) -> Result<DissipationTime, HarnessError> {
    Ok(match scaling {
        Scaling::Amplitude(a) => dissipation_time(&b.handle, &b.ladder, a, delta, phi0, budget)?,
        Scaling::Epsilon(e) => {
            let fast = DecayBudget {
                t_max: budget.t_max.map(|t| t * e),
                dt: budget.dt * e,
                ..budget.clone()
            };
            match dissipation_time(&b.handle, &b.ladder, 1.0 / e, delta, phi0, &fast)? {
                DissipationTime::Reached { tau } => DissipationTime::Reached { tau: tau / e },
                DissipationTime::NotReached { t_max } => DissipationTime::NotReached { t_max: t_max / e },
            }
        }
    })
}

fn simulate(s: &SimulateSpec, seed: u64, out: &mut Out) -> Result<(), HarnessError> {
    let b = build_operator(&s.operator)?;
    let phi0 = build_initial(&s.initial, &b, &mut point_rng(seed, 0))?;
    let method = s.method.unwrap_or_else(|| Method::auto(&b.handle));
    let cfg = EvolutionConfig::new(s.scaling, s.t_end, s.dt, method).with_stride(s.sample_stride);
    let traj = evolve(&b.handle, &b.ladder, &cfg, &phi0)?;
    let rows: Vec<Vec<f64>> = (0..traj.times.len())
        .map(|i| {
            vec![
                traj.times[i],
                traj.norm_l2[i],
                traj.norm_h1[i],
                traj.norm_hminus1[i],
                traj.energy_residual[i],
            ]
        })
        .collect();
    out.csv(
        "trajectory.csv",
        &["t", "norm_l2", "norm_h1", "norm_hminus1", "energy_residual"],
        &rows,
    )?;
    let budget = DecayBudget {
        method: s.method,
        dt: s.dt,
        ..DecayBudget::default()
    };
    let tau = scaled_dissipation_time(&b, s.scaling, s.delta, &phi0, &budget)?;
    let c_est = b
        .handle
        .relative_bound_estimate(&b.ladder, 32, &mut point_rng(seed, PROBE_STREAM))?;
    let r = &mut out.record;
    r.set("relative_bound_estimate", c_est);
    match tau {
        DissipationTime::Reached { tau } => {
            r.set("tau_delta", tau);
            r.set("reached", 1.0);
        }
        DissipationTime::NotReached { t_max } => {
            r.set("tau_delta", t_max);
            r.set("reached", 0.0);
            r.budget_exhausted = true;
        }
    }
    let bound = traj.ledger.dissipation_integral();
    r.set("final_norm_l2", *traj.norm_l2.last().unwrap_or(&phi0.norm()));
    r.set("energy_residual", traj.ledger.residual());
    r.set("energy_residual_per_time", traj.ledger.residual_per_unit_time());
    r.set("dissipation_integral", bound);
    r.set("max_norm_increase", traj.ledger.max_increase());
    r.set("dt", traj.dt);
    r.assert("dissipation_integral_bound", bound <= 0.5 + 1e-6);
    Ok(())
}

/// Dissipation times over the amplitude grid, one isolated job per point.
pub fn sweep(s: &SweepSpec, seed: u64) -> Result<SweepOutcome, HarnessError> {
    let b = build_operator(&s.operator)?;
    let phi0 = build_initial(&s.initial, &b, &mut point_rng(seed, 0))?;
    let results = parallel::map_slice(&s.amplitudes, |_, &a| {
        dissipation_time(&b.handle, &b.ladder, a, s.delta, &phi0, &s.budget)
    });
    let mut points = Vec::with_capacity(results.len());
    let mut rows = Vec::with_capacity(results.len());
    for (index, (&amplitude, res)) in s.amplitudes.iter().zip(results).enumerate() {
        let mut p = PointRecord {
            index,
            amplitude,
            summary: Default::default(),
            error: None,
        };
        let row = match res {
            Ok(DissipationTime::Reached { tau }) => DecayRow { amplitude, tau_delta: tau, reached: true },
            Ok(DissipationTime::NotReached { t_max }) => DecayRow { amplitude, tau_delta: t_max, reached: false },
            Err(e) => {
                p.error = Some(e.to_string());
                DecayRow { amplitude, tau_delta: f64::NAN, reached: false }
            }
        };
        if p.error.is_none() {
            p.summary.insert("tau_delta".into(), row.tau_delta);
            p.summary.insert("reached".into(), row.reached as u8 as f64);
        }
        points.push(p);
        rows.push(row);
    }
    Ok(SweepOutcome { points, rows })
}

fn run_sweep(s: &SweepSpec, seed: u64, out: &mut Out) -> Result<(), HarnessError> {
    let SweepOutcome { points, rows } = sweep(s, seed)?;
    out.write("decay.csv", &decay_csv(&rows)?)?;
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    let reached: Vec<f64> = rows.iter().filter(|r| r.reached).map(|r| r.tau_delta).collect();
    let nonincreasing = reached.len() == rows.len() && reached.windows(2).all(|w| w[1] <= w[0]);
    let r = &mut out.record;
    r.set("points", rows.len() as f64);
    r.set("reached", reached.len() as f64);
    r.set("failed", failed as f64);
    r.set("nonincreasing", nonincreasing as u8 as f64);
    if let (Some(first), Some(last)) = (reached.first(), reached.last()) {
        r.set("tau_first", *first);
        r.set("tau_last", *last);
    }
    r.budget_exhausted = rows.iter().zip(&points).any(|(row, p)| !row.reached && p.error.is_none());
    r.assert("points_ok", failed == 0);
    if s.assert_nonincreasing {
        r.assert("nonincreasing", nonincreasing);
    }
    r.points = points;
    Ok(())
}

fn with_eigensystem(h: &OperatorHandle) -> Result<OperatorHandle, HarnessError> {
    Ok(if h.eig().is_some() { h.clone() } else { h.clone().diagonalized()? })
}

fn spectrum(s: &SpectrumSpec, seed: u64, out: &mut Out) -> Result<(), HarnessError> {
    let b = build_operator(&s.operator)?;
    let report = eigenreport(&b.handle, &b.ladder, &s.thresholds)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["j", "E_j", "h1_norm", "band_interior"])?;
    for e in &report.records {
        w.write_record([
            e.j.to_string(),
            crate::export::fmt_float(e.energy),
            crate::export::fmt_float(e.h1_norm),
            (e.band_interior as u8).to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))?;
    out.write("spectrum.csv", &bytes)?;
    out.json("spectrum.json", &report)?;
    let count = |f: fn(&dissipator_core::diagnostics::EigenRecord) -> bool| {
        report.records.iter().filter(|e| f(e)).count() as f64
    };
    let r = &mut out.record;
    r.set("eigenvalues", report.records.len() as f64);
    r.set("band_interior", count(|e| e.band_interior));
    r.set("rough", count(|e| e.rough));
    r.set("first_integrals", count(|e| e.first_integral));
    r.set("roughness_threshold", report.roughness_threshold);
    if let Some(c) = &s.certificate {
        let phi0 = build_initial(&c.initial, &b, &mut point_rng(seed, 0))?;
        let cert = obstruction_certificate(&b.handle, &b.ladder, &phi0, &c.amplitudes, &c.options)?;
        out.json("certificate.json", &cert)?;
        let r = &mut out.record;
        r.set("certificate_tau_star", cert.tau_star);
        r.set("certificate_eigenvalue", cert.eigenvalue);
        r.set("certificate_min_norm", cert.min_norm);
        r.set("certificate_min_overlap", cert.min_overlap);
        r.assert("certificate", cert.pass);
    }
    Ok(())
}

fn rage(s: &RageSpec, seed: u64, out: &mut Out) -> Result<(), HarnessError> {
    let b = build_operator(&s.operator)?;
    let l = with_eigensystem(&b.handle)?;
    let phi0 = build_initial(&s.initial, &b, &mut point_rng(seed, 0))?;
    let results = parallel::map_slice(&s.times, |_, &t| {
        let avg = rage_average(&l, &phi0, &s.selection, s.n_low, t)?;
        let h1 = h1_growth_average(&l, &b.ladder, &phi0, s.n_low, t)?;
        Ok::<_, dissipator_core::Error>((t, avg, h1))
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut within_bound = true;
    let mut last = None;
    for res in results {
        let (t, avg, h1) = res?;
        within_bound &= h1.off_diagonal.abs() <= h1.apriori_bound;
        rows.push(vec![t, avg, h1.value, h1.limit, h1.off_diagonal]);
        last = Some((avg, h1));
    }
    out.csv("rage.csv", &["T", "rage", "h1_value", "h1_limit", "off_diagonal"], &rows)?;
    let r = &mut out.record;
    if let Some((avg, h1)) = last {
        r.set("rage_last", avg);
        r.set("h1_value_last", h1.value);
        r.set("h1_limit", h1.limit);
        r.set("h1_relative_gap_last", (h1.value - h1.limit).abs() / h1.limit);
        r.set("apriori_bound", h1.apriori_bound);
        r.set("min_gap", h1.min_gap);
    }
    r.assert("off_diagonal_bound", within_bound);
    Ok(())
}

fn nash(s: &NashSpec, out: &mut Out) -> Result<(), HarnessError> {
    let (u, _) = build_flow(&s.flow, s.k)?;
    let cfg = NashRunConfig {
        amplitude: s.amplitude,
        k_max: s.k,
        sigma: s.sigma,
        times: s.times.values(),
        steps_per_interval: s.steps_per_interval,
    };
    let samples = nash_run(&u, &cfg)?;
    let rows: Vec<Vec<f64>> = samples.iter().map(|&(t, q)| vec![t, q]).collect();
    out.csv("nash.csv", &["t", "ratio"], &rows)?;
    let fit = nash_exponent_fit(&samples, s.window)?;
    out.json("nash_fit.json", &fit)?;
    let r = &mut out.record;
    r.set("exponent", fit.exponent);
    r.set("constant", fit.constant);
    r.set("envelope", fit.envelope);
    r.set("fit_points", fit.points as f64);
    Ok(())
}

#[derive(Serialize)]
struct VerdictEntry {
    amplitude: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<QuenchVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn quench(s: &QuenchSpec, out: &mut Out) -> Result<(), HarnessError> {
    let (u, _) = build_flow(&s.flow, s.k)?;
    let f = IgnitionNonlinearity::with_rate(s.theta0, s.rate)?;
    let mut cfg = QuenchConfig::new(s.dt, s.t_end);
    cfg.sample_stride = s.sample_stride;
    let init = s.initial;
    let runs = parallel::map_slice(&s.amplitudes, |_, &a| {
        let sys = ReactionSystem::new(&u, s.k, a)?;
        let t0 = sys.state_from_fn(|x, y| init.eval(x, y));
        quench_run(&sys, &f, &t0, &cfg)
    });
    let mut verdicts = Vec::new();
    let mut points = Vec::new();
    for (index, (&amplitude, run)) in s.amplitudes.iter().zip(runs).enumerate() {
        let mut p = PointRecord {
            index,
            amplitude,
            summary: Default::default(),
            error: None,
        };
        match run {
            Ok(traj) => {
                let rows: Vec<Vec<f64>> = traj
                    .samples
                    .iter()
                    .map(|q| vec![q.t, q.sup_t, q.int_t, q.int_f])
                    .collect();
                out.csv(&format!("quench_{index}.csv"), &["t", "sup_T", "int_T", "int_f"], &rows)?;
                let rep = quench_detector(&traj, s.theta0);
                let bal = l1_balance_residual(&traj);
                let last = traj.samples.last().expect("trajectory has samples");
                let (quenched, t_event) = match rep.verdict {
                    QuenchVerdict::Quenched { t_q } => (1.0, t_q),
                    QuenchVerdict::Burning { t_max } => (0.0, t_max),
                };
                p.summary.insert("quenched".into(), quenched);
                p.summary.insert("t_event".into(), t_event);
                p.summary.insert("final_sup_T".into(), last.sup_t);
                p.summary.insert("final_int_T".into(), last.int_t);
                p.summary.insert("min_T".into(), traj.samples.iter().map(|q| q.min_t).fold(f64::INFINITY, f64::min));
                p.summary.insert("l1_balance_residual".into(), bal.residual);
                verdicts.push(VerdictEntry {
                    amplitude,
                    verdict: Some(rep.verdict),
                    final_ok: Some(rep.final_ok),
                    error: None,
                });
            }
            Err(e) => {
                p.error = Some(e.to_string());
                verdicts.push(VerdictEntry {
                    amplitude,
                    verdict: None,
                    final_ok: None,
                    error: Some(e.to_string()),
                });
            }
        }
        points.push(p);
    }
    out.json("verdicts.json", &verdicts)?;
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    out.record.set("runs", points.len() as f64);
    out.record.set(
        "quenched",
        points.iter().filter(|p| p.summary.get("quenched") == Some(&1.0)).count() as f64,
    );
    out.record.assert("points_ok", failed == 0);
    if let Some(search) = &s.search {
        let t0 = ReactionSystem::new(&u, s.k, 0.0)?.state_from_fn(|x, y| init.eval(x, y));
        let mut sc = SearchConfig::new(s.k, search.a_max, cfg.clone());
        if let Some(g) = &search.grid {
            sc.grid = g.clone();
        }
        sc.bisection_steps = search.bisection_steps;
        let rep = critical_amplitude_search(&u, &f, &t0, &sc)?;
        out.json("search.json", &rep)?;
        match rep.result {
            CriticalAmplitude::FirstQuench { a_star, .. } => out.record.set("a_star", a_star),
            CriticalAmplitude::NoQuenchUpTo { a_max } => {
                out.record.set("a_star", f64::INFINITY);
                out.record.set("search_a_max", a_max);
                out.record.budget_exhausted = true;
            }
        }
    }
    out.record.points = points;
    Ok(())
}

#[derive(Serialize)]
struct FlowMeta {
    alpha: f64,
    m: f64,
    band: usize,
    grid: usize,
    divergence_before: f64,
    projection_removed: f64,
    divergence_after: f64,
    min_density: f64,
    sup_bound: f64,
    lip: f64,
    dump: &'static str,
}

/// Divergence accepted for a written field.
const DIVERGENCE_TOL: f64 = 1e-10;

fn flow(s: &FlowSpec, out: &mut Out) -> Result<(), HarnessError> {
    let (density, u, report) = relabeled_flow(&s.flow)?;
    write_flow(out, &u, s.flow.grid)?;
    let meta = FlowMeta {
        alpha: report.alpha,
        m: density.m,
        band: report.band,
        grid: report.n,
        divergence_before: report.divergence_before,
        projection_removed: report.projection_removed,
        divergence_after: report.divergence_after,
        min_density: report.min_density,
        sup_bound: u.sup_bound(),
        lip: u.lip(),
        dump: "flow.dsvf",
    };
    out.json("flow.json", &meta)?;
    let r = &mut out.record;
    r.set("alpha", meta.alpha);
    r.set("m", meta.m);
    r.set("divergence_before", meta.divergence_before);
    r.set("projection_removed", meta.projection_removed);
    r.set("divergence_after", meta.divergence_after);
    r.set("min_density", meta.min_density);
    r.set("sup_bound", meta.sup_bound);
    r.set("lip", meta.lip);
    r.assert("divergence_free", meta.divergence_after <= DIVERGENCE_TOL);
    Ok(())
}

fn write_flow(out: &mut Out, u: &VelocityField, n: usize) -> Result<(), HarnessError> {
    let (u1, u2) = u.sample_grid(n)?;
    let dump = VelocityDump {
        n,
        band: u.band(),
        u1,
        u2,
    };
    out.write("flow.dsvf", &dump.to_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(experiment: Experiment) -> ExperimentSpec {
        ExperimentSpec {
            schema_version: SCHEMA_VERSION,
            seed: 11,
            output: None,
            experiment,
        }
    }

    fn heat(j: usize, amplitude: f64) -> SimulateSpec {
        SimulateSpec {
            operator: OperatorSpec::Diagonal { entries: vec![0.0; 6], ladder: None },
            initial: InitialSpec::Basis { j },
            scaling: Scaling::Amplitude(amplitude),
            t_end: 1.0,
            dt: 1e-3,
            method: None,
            sample_stride: 10,
            delta: 0.5,
        }
    }

    #[test]
    fn heat_dissipation_time_is_ln2() {
        let dir = tempfile::tempdir().unwrap();
        let rec = run_experiment(&spec(Experiment::Simulate(heat(1, 0.0))), dir.path()).unwrap();
        assert!((rec.summary["tau_delta"] - 2f64.ln()).abs() < 1e-6);
        assert!(rec.passed());
        for a in ["trajectory.csv", "record.json", "summary.json"] {
            assert!(dir.path().join(a).exists(), "{a}");
        }
    }

    #[test]
    fn identical_specs_give_identical_summaries() {
        let s = spec(Experiment::Simulate(SimulateSpec {
            initial: InitialSpec::Random,
            ..heat(1, 3.0)
        }));
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_experiment(&s, d1.path()).unwrap();
        run_experiment(&s, d2.path()).unwrap();
        let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("summary.json")).unwrap();
        assert_eq!(read(&d1), read(&d2));
    }

    #[test]
    fn single_point_sweep_matches_simulate() {
        let sim = heat(2, 0.0);
        let sw = SweepSpec {
            operator: sim.operator.clone(),
            initial: sim.initial.clone(),
            amplitudes: vec![0.0],
            delta: 0.5,
            budget: DecayBudget { dt: sim.dt, ..DecayBudget::default() },
            assert_nonincreasing: false,
        };
        let d = tempfile::tempdir().unwrap();
        let a = run_experiment(&spec(Experiment::Simulate(sim)), d.path()).unwrap();
        let b = sweep(&sw, 11).unwrap();
        assert_eq!(b.rows.len(), 1);
        assert_eq!(b.rows[0].tau_delta, a.summary["tau_delta"]);
    }

    #[test]
    fn epsilon_scaling_rescales_time() {
        let d = tempfile::tempdir().unwrap();
        let s = SimulateSpec {
            scaling: Scaling::Epsilon(0.25),
            t_end: 4.0,
            ..heat(1, 0.0)
        };
        let rec = run_experiment(&spec(Experiment::Simulate(s)), d.path()).unwrap();
        assert!((rec.summary["tau_delta"] - 4.0 * 2f64.ln()).abs() < 1e-5, "{:?}", rec.summary);
    }

    #[test]
    fn short_budget_is_flagged_not_failed() {
        let sw = SweepSpec {
            operator: OperatorSpec::Diagonal { entries: vec![0.0; 4], ladder: None },
            initial: InitialSpec::Basis { j: 1 },
            amplitudes: vec![0.0, 1.0],
            delta: 0.5,
            budget: DecayBudget { t_max: Some(0.1), ..DecayBudget::default() },
            assert_nonincreasing: false,
        };
        let d = tempfile::tempdir().unwrap();
        let rec = run_experiment(&spec(Experiment::Sweep(sw)), d.path()).unwrap();
        assert!(rec.budget_exhausted);
        assert!(rec.passed());
        let rows = crate::export::read_decay_csv(&d.path().join("decay.csv")).unwrap();
        assert!(rows.iter().all(|r| !r.reached));
    }
}

//! Acceptance battery. Each test prints one `PASS`/`FAIL` line with its measurements.

use dissipator::build::{build_initial, build_operator};
use dissipator::export::decay_csv;
use dissipator::run::{point_rng, sweep};
use dissipator::spec::{
    Experiment, ExperimentSpec, FlowSource, InitialSpec, OperatorSpec, QuenchSpec, SweepSpec,
    TemperatureSpec, SCHEMA_VERSION,
};
use dissipator::run_experiment;
use dissipator_core::diagnostics::{
    decay_curve, h1_growth_average, nash_exponent_fit, nash_run, obstruction_certificate,
    CertificateOptions, DecayBudget, NashRunConfig,
};
use dissipator_core::engine::{
    dense_oracle_evolve, evolve, free_vs_damped_gap, EvolutionConfig, GrowthBound, Method, Scaling,
};
use dissipator_core::operators::{
    build_advection_generator, build_constant_flow_generator, build_free_jacobi,
    build_wvn_schrodinger, lattice_state, project_out_band_exterior, wvn_zero_mode, OperatorHandle,
    VelocityField,
};
use dissipator_core::parallel::with_workers;
use dissipator_core::quench::{
    comparison_bound_check, l1_balance_residual, quench_run, IgnitionNonlinearity, QuenchConfig,
    QuenchTrajectory, ReactionSystem,
};
use dissipator_core::spectral::{GammaLadder, SpectralState, TorusLattice};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{tag}] criterion {id:>2} {name}: {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

type Profile = fn(f64, f64) -> f64;

fn linear_ladder(n: usize) -> GammaLadder {
    GammaLadder::linear(n).unwrap()
}

fn jacobi_handle(n: usize, wvn: bool) -> (OperatorHandle, GammaLadder) {
    let ladder = linear_ladder(n);
    let j = if wvn { build_wvn_schrodinger(n) } else { build_free_jacobi(n) }.unwrap();
    (OperatorHandle::from_jacobi(&j, &ladder).unwrap(), ladder)
}

fn seeded_state(ladder: &GammaLadder, seed: u64) -> SpectralState {
    use rand::Rng;
    let mut rng = point_rng(seed, 1);
    let c = (0..ladder.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SpectralState::from_coeffs(ladder, c).unwrap().normalized().unwrap()
}

fn rel_err(a: &SpectralState, b: &SpectralState) -> f64 {
    a.sub(b).unwrap().norm() / b.norm()
}

#[test]
fn criterion_01_wvn_zero_mode() {
    let start = Instant::now();
    let n = 1000;
    let j = build_wvn_schrodinger(n).unwrap();
    let u: Vec<f64> = wvn_zero_mode(n).unwrap().coeffs().iter().map(|z| z.re).collect();
    let lu = j.apply_real(&u);
    let worst = lu[..n - 2].iter().map(|v| v.abs()).fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "WvN zero mode",
        worst <= 1e-13 && elapsed < 1.0,
        format!("max interior |(Lu)_n| = {worst:.3e} (tol 1e-13), {elapsed:.3}s"),
    );
}

#[test]
fn criterion_02_obstruction_certificate() {
    let start = Instant::now();
    let amps = [1.0, 10.0, 1e2, 1e3, 1e4];
    let opts = CertificateOptions::default();

    let k = 4;
    let l = build_constant_flow_generator([1.0, 2f64.sqrt()], k).unwrap();
    let lattice = TorusLattice::new(k);
    let ladder = GammaLadder::torus(&lattice);
    let phi = lattice_state(&lattice, &[((1, 0), Complex64::new(1.0, 0.0))]).unwrap();
    let flow = obstruction_certificate(&l, &ladder, &phi, &amps, &opts).unwrap();
    let tau_ok = (flow.tau_star - 1.0 / (8.0 * PI * PI)).abs() < 1e-15;

    let n = 512;
    let sys = project_out_band_exterior(&build_wvn_schrodinger(n).unwrap(), &linear_ladder(n), [-2.0, 2.0]).unwrap();
    let (_, zero) = sys.eigenvector_near(0.0).unwrap();
    let wvn = obstruction_certificate(&sys.ladder_generator, &sys.ladder, &zero, &amps, &opts).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        2,
        "obstruction certificate",
        tau_ok && flow.pass && flow.min_norm >= 0.48 && wvn.pass && wvn.min_norm >= 0.48 && elapsed < 60.0,
        format!(
            "constant flow: tau* = {:.6e}, min norm {:.4}, min overlap {:.4}; projected WvN: min norm {:.4}, min overlap {:.4}; {elapsed:.1}s",
            flow.tau_star, flow.min_norm, flow.min_overlap, wvn.min_norm, wvn.min_overlap
        ),
    );
}

#[test]
fn criterion_03_enhancement_trend() {
    let start = Instant::now();
    let (l, ladder) = jacobi_handle(256, false);
    let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
    let budget = DecayBudget {
        method: Some(Method::DenseOracle),
        ..DecayBudget::default()
    };
    let curve = decay_curve(&l, &ladder, &[1.0, 10.0, 100.0, 1000.0], 0.5, &phi, &budget).unwrap();
    let taus: Vec<f64> = curve.taus().into_iter().map(|t| t.unwrap_or(f64::NAN)).collect();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        3,
        "enhancement trend",
        curve.is_nonincreasing() && taus[3] <= taus[0] / 10.0 && elapsed < 300.0,
        format!("tau_1/2 = {taus:.5?}, ratio tau(1)/tau(1000) = {:.2}; {elapsed:.1}s", taus[0] / taus[3]),
    );
}

#[test]
fn criterion_04_energy_identity() {
    let (l, ladder) = jacobi_handle(128, false);
    let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
    let run = |dt: f64| {
        let cfg = EvolutionConfig::new(Scaling::Epsilon(0.01), 10.0, dt, Method::StrangRk4);
        evolve(&l, &ladder, &cfg, &phi).unwrap().ledger.residual_per_unit_time()
    };
    let (r1, r2) = (run(1e-3), run(5e-4));
    let order = (r1 / r2).log2();
    report(
        4,
        "energy identity",
        r1 <= 1e-8 && order >= 1.9,
        format!("residual/time {r1:.3e} at dt=1e-3, {r2:.3e} at dt=5e-4, order {order:.3}"),
    );
}

/// Seeded state with `|c_j| ∝ 1/λ_j`, so `‖φ‖₁` is dominated by low modes.
fn smooth_state(ladder: &GammaLadder, seed: u64) -> SpectralState {
    let raw = seeded_state(ladder, seed);
    let c = raw.coeffs().iter().zip(ladder.lambdas()).map(|(z, l)| z / l).collect();
    SpectralState::from_coeffs(ladder, c).unwrap().normalized().unwrap()
}

#[test]
fn criterion_05_dissipation_integral_bound() {
    let mut cases: Vec<(OperatorHandle, GammaLadder, SpectralState)> = Vec::new();
    for wvn in [false, true] {
        let (l, ladder) = jacobi_handle(64, wvn);
        for s in [SpectralState::basis_vector(&ladder, 1).unwrap(), smooth_state(&ladder, 5)] {
            cases.push((l.clone(), ladder.clone(), s));
        }
    }
    let tl = GammaLadder::torus(&TorusLattice::new(4));
    for l in [
        build_constant_flow_generator([1.0, 2f64.sqrt()], 4).unwrap(),
        build_advection_generator(&VelocityField::shear(), 4).unwrap(),
        build_advection_generator(&VelocityField::cellular(), 4).unwrap(),
    ] {
        for s in [SpectralState::basis_vector(&tl, 1).unwrap(), smooth_state(&tl, 9)] {
            cases.push((l.clone(), tl.clone(), s));
        }
    }
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut runs = 0;
    for (l, ladder, phi) in &cases {
        let lambda_max = ladder.lambdas().iter().copied().fold(0.0, f64::max);
        for eps in [1.0, 0.1, 0.01] {
            let dt = (0.01 / (eps * lambda_max)).min(1e-3);
            let t_end = if eps == 1.0 { 1.0 } else { 5.0 };
            let cfg = EvolutionConfig::new(Scaling::Epsilon(eps), t_end, dt, Method::auto(l));
            let traj = evolve(l, ladder, &cfg, phi).unwrap();
            let ints = traj.ledger.dissipation_integrals();
            worst = ints.iter().copied().fold(worst, f64::max);
            monotone &= ints.windows(2).all(|w| w[1] >= w[0]);
            runs += 1;
        }
    }
    report(
        5,
        "dissipation integral bound",
        worst <= 0.5 + 1e-6 && monotone,
        format!("{runs} runs, max eps*int ||phi||_1^2 / ||phi0||^2 = {worst:.9}, monotone in T: {monotone}"),
    );
}

#[test]
fn criterion_06_free_vs_damped_gap() {
    let k = 4;
    let l = build_constant_flow_generator([1.0, 2f64.sqrt()], k).unwrap();
    let lattice = TorusLattice::new(k);
    let ladder = GammaLadder::torus(&lattice);
    let phi = lattice_state(
        &lattice,
        &[
            ((1, 0), Complex64::new(0.6, 0.0)),
            ((0, 2), Complex64::new(0.0, 0.5)),
            ((-1, 3), Complex64::new(0.3, -0.2)),
        ],
    )
    .unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    for eps in [1e-1, 1e-2, 1e-3] {
        let g = free_vs_damped_gap(&l, &ladder, eps, 1.0, &phi, GrowthBound::Unity, 100).unwrap();
        pass &= g.measured <= g.bound;
        lines.push(format!("eps={eps:.0e}: {:.4e} <= {:.4e}", g.measured, g.bound));
    }
    report(6, "free vs damped gap", pass, lines.join("; "));
}

fn split_errors(l: &OperatorHandle, ladder: &GammaLadder, scaling: Scaling, phi: &SpectralState) -> Vec<(Method, f64)> {
    // In the ε scaling the flow at time 1 is the amplitude-1/ε flow at time ε.
    let (a, t) = match scaling {
        Scaling::Amplitude(a) => (a, 1.0),
        Scaling::Epsilon(e) => (1.0 / e, e),
    };
    let oracle = dense_oracle_evolve(l, ladder, a, t, phi).unwrap();
    let with_eig = if l.eig().is_some() || l.is_diagonal() { l.clone() } else { l.clone().diagonalized().unwrap() };
    [Method::StrangRk4, Method::EigSplit]
        .into_iter()
        .map(|m| {
            let h = if m == Method::EigSplit { &with_eig } else { l };
            let cfg = EvolutionConfig::new(scaling, 1.0, 1e-4, m);
            (m, rel_err(evolve(h, ladder, &cfg, phi).unwrap().final_state(), &oracle))
        })
        .collect()
}

#[test]
fn criterion_07_oracle_equivalence() {
    let mut ladder_ops: Vec<(OperatorHandle, GammaLadder)> = vec![jacobi_handle(64, false), jacobi_handle(64, true)];
    let sys = project_out_band_exterior(&build_wvn_schrodinger(64).unwrap(), &linear_ladder(64), [-2.0, 2.0]).unwrap();
    ladder_ops.push((sys.ladder_generator.clone(), sys.ladder.clone()));
    let dl = linear_ladder(64);
    let entries: Vec<f64> = (0..64).map(|i| (0.37 * i as f64).sin()).collect();
    ladder_ops.push((OperatorHandle::diagonal("diagonal", &dl, entries).unwrap(), dl));
    let tl = GammaLadder::torus(&TorusLattice::new(4));
    let torus_ops: Vec<(OperatorHandle, GammaLadder)> = [
        build_constant_flow_generator([1.0, 2f64.sqrt()], 4).unwrap(),
        build_advection_generator(&VelocityField::shear(), 4).unwrap(),
        build_advection_generator(&VelocityField::cellular(), 4).unwrap(),
    ]
    .into_iter()
    .map(|l| (l, tl.clone()))
    .collect();
    let mut runs = Vec::new();
    for (l, ladder) in &ladder_ops {
        runs.push((l, ladder, Scaling::Amplitude(10.0)));
        runs.push((l, ladder, Scaling::Epsilon(0.01)));
    }
    for (l, ladder) in &torus_ops {
        runs.push((l, ladder, Scaling::Epsilon(0.01)));
    }
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (l, ladder, scaling) in runs {
        let phi = seeded_state(ladder, 21);
        let errs = split_errors(l, ladder, scaling, &phi);
        worst = errs.iter().map(|e| e.1).fold(worst, f64::max);
        let errs: Vec<String> = errs.iter().map(|(m, e)| format!("{m:?}={e:.1e}")).collect();
        lines.push(format!("{}@{scaling:?}[{}]", l.tag(), errs.join(",")));
    }
    report(
        7,
        "oracle equivalence",
        worst <= 1e-6,
        format!("worst relative error {worst:.3e}; {}", lines.join(" ")),
    );
}

#[test]
fn criterion_08_h1_growth_limit() {
    let (l, ladder) = jacobi_handle(256, false);
    let l = l.diagonalized().unwrap();
    let phi = SpectralState::basis_vector(&ladder, 1).unwrap();
    let n_low = 16;
    let g = h1_growth_average(&l, &ladder, &phi, n_low, 1e4).unwrap();
    let rel = (g.value - g.limit).abs() / g.limit;
    report(
        8,
        "H1 growth sum",
        rel <= 0.01 && g.off_diagonal.abs() <= g.apriori_bound,
        format!(
            "value {:.6e}, limit {:.6e}, relative gap {rel:.3e}; |off-diagonal| {:.3e} <= {:.3e}",
            g.value, g.limit, g.off_diagonal.abs(), g.apriori_bound
        ),
    );
}

fn nash_exponent(u: &VelocityField, amplitude: f64) -> f64 {
    let count = 25;
    let times: Vec<f64> = (0..count)
        .map(|i| 1e-4 * 100f64.powf(i as f64 / (count - 1) as f64))
        .collect();
    let cfg = NashRunConfig {
        amplitude,
        k_max: 85,
        sigma: 0.005,
        times,
        steps_per_interval: 4,
    };
    let samples = nash_run(u, &cfg).unwrap();
    nash_exponent_fit(&samples, [1e-4, 1e-2]).unwrap().exponent
}

#[test]
fn criterion_09_nash_exponent() {
    let start = Instant::now();
    let heat = nash_exponent(&VelocityField::zero(), 0.0);
    let shear = nash_exponent(&VelocityField::shear(), 100.0);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        9,
        "Nash exponent",
        (heat - 1.0).abs() <= 0.05 && shear >= 0.95 && elapsed < 120.0,
        format!("grid 256^2: heat p = {heat:.4}, shear A=100 p = {shear:.4}; {elapsed:.1}s"),
    );
}

fn in_range(t: &QuenchTrajectory) -> bool {
    t.samples.iter().all(|s| s.min_t >= 0.0 && s.sup_t <= 1.0)
}

#[test]
fn criterion_10_quenching_battery() {
    let f = IgnitionNonlinearity::new(0.5).unwrap();
    let mut range_ok = true;

    let sys = ReactionSystem::new(&VelocityField::cellular(), 8, 10.0).unwrap();
    let t0 = sys.state_from_fn(|x, y| 0.75 + 0.15 * (2.0 * PI * x).cos() * (2.0 * PI * y).cos());
    let bal = |dt: f64| {
        let traj = quench_run(&sys, &f, &t0, &QuenchConfig::new(dt, 0.5)).unwrap();
        (l1_balance_residual(&traj).residual, in_range(&traj))
    };
    let ((b1, ok1), (b2, ok2)) = (bal(5e-5), bal(2.5e-5));
    range_ok &= ok1 && ok2;
    let order = (b1 / b2).log2();
    let balance_ok = b1 <= 1e-8 && order >= 1.9;

    let mut comparison_ok = true;
    let mut worst_excess = f64::NEG_INFINITY;
    let matrix: [(VelocityField, f64, Profile); 3] = [
        (VelocityField::shear(), 10.0, |_, y| 0.7 + 0.2 * (2.0 * PI * y).cos()),
        (VelocityField::cellular(), 10.0, |x, y| 0.6 + 0.3 * (2.0 * PI * x).cos() * (2.0 * PI * y).sin()),
        (VelocityField::zero(), 0.0, |x, _| 0.55 + 0.4 * (2.0 * PI * x).cos()),
    ];
    for (u, a, init) in &matrix {
        let sys = ReactionSystem::new(u, 6, *a).unwrap();
        let t0 = sys.state_from_fn(init);
        let mut cfg = QuenchConfig::new(0.002, 1.0);
        cfg.keep_fields = true;
        cfg.sample_stride = 10;
        let lin = quench_run(&sys, &IgnitionNonlinearity::inert(0.5).unwrap(), &t0, &cfg).unwrap();
        let hot = quench_run(&sys, &f, &t0, &cfg).unwrap();
        range_ok &= in_range(&lin) && in_range(&hot);
        for c in [f.ratio_bound(), f.lipschitz()] {
            let rep = comparison_bound_check(&hot, &lin, c).unwrap();
            comparison_ok &= rep.pass;
            worst_excess = worst_excess.max(rep.worst_excess);
        }
    }

    let y_profile = |_: f64, y: f64| 0.05 + 0.95 * (0.5 * (1.0 + (2.0 * PI * y).cos())).powi(4);
    let cfg = QuenchConfig::new(0.002, 0.5);
    let runs: Vec<QuenchTrajectory> = [0.0, 1000.0]
        .iter()
        .map(|&a| {
            let sys = ReactionSystem::new(&VelocityField::shear(), 6, a).unwrap();
            let t0 = sys.state_from_fn(y_profile);
            quench_run(&sys, &f, &t0, &cfg).unwrap()
        })
        .collect();
    range_ok &= runs.iter().all(in_range);
    let shear_diff = runs[0]
        .samples
        .iter()
        .zip(&runs[1].samples)
        .map(|(a, b)| (a.sup_t - b.sup_t).abs())
        .fold(0.0, f64::max);
    let shear_ok = shear_diff <= 1e-9;

    report(
        10,
        "quenching battery",
        balance_ok && comparison_ok && shear_ok && range_ok,
        format!(
            "L1 balance {b1:.3e} -> {b2:.3e} (order {order:.3}); comparison pass {comparison_ok} (worst excess {worst_excess:.3e}); shear A=0 vs 1000 sup diff {shear_diff:.3e}; range preserved {range_ok}"
        ),
    );
}

fn spec(experiment: Experiment) -> ExperimentSpec {
    ExperimentSpec {
        schema_version: SCHEMA_VERSION,
        seed: 20261014,
        output: None,
        experiment,
    }
}

#[test]
fn criterion_11_worker_determinism() {
    let decay = SweepSpec {
        operator: OperatorSpec::FreeJacobi { n: 64 },
        initial: InitialSpec::Random,
        amplitudes: vec![1.0, 10.0, 100.0, 1000.0],
        delta: 0.5,
        budget: DecayBudget::default(),
        assert_nonincreasing: false,
    };
    let quench = QuenchSpec {
        flow: FlowSource::Cellular,
        k: 6,
        theta0: 0.5,
        rate: 1.0,
        initial: TemperatureSpec::RaisedCosine { base: 0.2, height: 0.7 },
        dt: 0.005,
        t_end: 0.5,
        sample_stride: 10,
        amplitudes: vec![0.0, 5.0, 50.0],
        search: None,
    };
    let specs = [spec(Experiment::Sweep(decay.clone())), spec(Experiment::Quench(quench))];
    let mut worst: f64 = 0.0;
    let mut identical_csv = true;
    let mut scalars = 0;
    for s in &specs {
        let recs: Vec<_> = [1usize, 8]
            .iter()
            .map(|&w| {
                let dir = tempfile::tempdir().unwrap();
                let rec = with_workers(w, || run_experiment(s, dir.path())).unwrap();
                (rec, dir)
            })
            .collect();
        let (a, b) = (&recs[0].0, &recs[1].0);
        let pairs = a
            .summary
            .iter()
            .chain(a.points.iter().flat_map(|p| p.summary.iter()))
            .zip(b.summary.iter().chain(b.points.iter().flat_map(|p| p.summary.iter())));
        for ((ka, va), (kb, vb)) in pairs {
            assert_eq!(ka, kb);
            worst = worst.max((va - vb).abs());
            scalars += 1;
        }
        for name in a.artifacts.iter().filter(|n| n.ends_with(".csv")) {
            let read = |i: usize| std::fs::read(recs[i].1.path().join(name)).unwrap();
            identical_csv &= read(0) == read(1);
        }
    }
    let direct: Vec<_> = [1usize, 8]
        .iter()
        .map(|&w| with_workers(w, || decay_csv(&sweep(&decay, 1).unwrap().rows).unwrap()))
        .collect();
    identical_csv &= direct[0] == direct[1];
    let b = build_operator(&decay.operator).unwrap();
    let r0 = build_initial(&decay.initial, &b, &mut point_rng(1, 0)).unwrap();
    let r1 = build_initial(&decay.initial, &b, &mut point_rng(1, 0)).unwrap();
    report(
        11,
        "worker determinism",
        worst <= 1e-9 && identical_csv && r0 == r1,
        format!("{scalars} summary scalars, max |diff| across workers 1 vs 8 = {worst:.1e}; CSV identical {identical_csv}"),
    );
}

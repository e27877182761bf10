use dissipator_core::diagnostics::{dissipation_time, DecayBudget};
use dissipator_core::engine::{evolve, EvolutionConfig, Method, Scaling};
use dissipator_core::fourier::Fft2;
use dissipator_core::operators::{build_advection_generator, OperatorHandle, VelocityField};
use dissipator_core::quench::{ignition_eval, quench_run, IgnitionNonlinearity, QuenchConfig, ReactionSystem};
use dissipator_core::spectral::{GammaLadder, SpectralState};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fft_round_trip(data in complex_vec(36)) {
        let fft = Fft2::new(6);
        let mut g = data.clone();
        fft.synthesize(&mut g);
        fft.analyze(&mut g);
        for (a, b) in g.iter().zip(&data) {
            prop_assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn leray_projection_is_idempotent_and_real(u1 in prop::collection::vec(-1.0..1.0f64, 256), u2 in prop::collection::vec(-1.0..1.0f64, 256)) {
        let mut f = VelocityField::from_grid_samples("random", 16, &u1, &u2, 5).unwrap();
        f.leray_project();
        prop_assert!(f.divergence_norm() < 1e-12);
        prop_assert!(f.reality_defect() < 1e-15);
        prop_assert!(f.leray_project() < 1e-14);
        prop_assert!(f.validate().is_ok());
    }

    #[test]
    fn norm_never_increases(entries in prop::collection::vec(-3.0..3.0f64, 8), phi in complex_vec(8), a in 0.0..50.0f64) {
        let ladder = GammaLadder::linear(8).unwrap();
        let l = OperatorHandle::diagonal("d", &ladder, entries).unwrap();
        let phi0 = SpectralState::from_coeffs(&ladder, phi).unwrap();
        prop_assume!(phi0.norm() > 1e-3);
        let cfg = EvolutionConfig::new(Scaling::Amplitude(a), 1.0, 0.01, Method::EigSplit);
        let traj = evolve(&l, &ladder, &cfg, &phi0).unwrap();
        for w in traj.norm_l2.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-14));
        }
    }

    #[test]
    fn stream_flows_give_symmetric_generators(c in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), seed in 0u64..1000) {
        let psi = vec![
            ((1, 0), Complex64::new(c.0, c.1)),
            ((-1, 0), Complex64::new(c.0, -c.1)),
            ((1, 1), Complex64::new(c.2, 0.0)),
            ((-1, -1), Complex64::new(c.2, 0.0)),
        ];
        let u = dissipator_core::flows::stream_function_flow(&dissipator_core::flows::StreamKind::Custom { coefficients: psi }, 2).unwrap();
        let l = build_advection_generator(&u, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(l.hermiticity_defect(4, &mut rng) < 1e-12 * u.sup_bound().max(1.0));
    }

    #[test]
    fn heat_dissipation_time_closed_form(j in 1usize..6, delta in 0.05..0.95f64) {
        let ladder = GammaLadder::linear(6).unwrap();
        let l = OperatorHandle::diagonal("zero", &ladder, vec![0.0; 6]).unwrap();
        let phi = SpectralState::basis_vector(&ladder, j).unwrap();
        let tau = dissipation_time(&l, &ladder, 3.0, delta, &phi, &DecayBudget::default()).unwrap().tau().unwrap();
        let want = (1.0 / delta).ln() / j as f64;
        prop_assert!((tau - want).abs() < 1e-6 * want);
    }

    #[test]
    fn ignition_is_bounded_by_its_constants(theta0 in 0.05..0.95f64, t in 0.0..1.0f64) {
        let f = IgnitionNonlinearity::new(theta0).unwrap();
        let v = ignition_eval(&f, t).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= f.ratio_bound() * t + 1e-15);
        prop_assert!(v <= f.lipschitz() * (t - theta0).max(0.0) + 1e-15);
    }

    #[test]
    fn quench_runs_stay_in_range(base in 0.0..0.3f64, height in 0.1..0.7f64, a in 0.0..20.0f64) {
        let sys = ReactionSystem::new(&VelocityField::cellular(), 4, a).unwrap();
        let t0 = sys.state_from_fn(|x, y| base + height * (0.5 * (1.0 + (2.0 * PI * x).cos() * (2.0 * PI * y).cos())));
        let f = IgnitionNonlinearity::new(0.5).unwrap();
        let traj = quench_run(&sys, &f, &t0, &QuenchConfig::new(0.01, 0.2)).unwrap();
        for s in &traj.samples {
            prop_assert!(s.min_t >= 0.0 && s.sup_t <= 1.0);
        }
    }
}

//! Reaction–diffusion–advection with ignition nonlinearities on T².

mod analysis;
mod ignition;
mod reaction;
mod search;

pub use analysis::{
    comparison_bound_check, l1_balance_residual, quench_detector, ComparisonReport, L1Balance, QuenchReport,
    QuenchVerdict, COMPARISON_SLACK, FINALITY_TOL,
};
pub use ignition::{ignition_eval, IgnitionNonlinearity, RANGE_TOL};
pub use reaction::{
    quench_run, react_step, QuenchConfig, QuenchSample, QuenchTrajectory, ReactionState, ReactionSystem, StopRule,
};
pub use search::{critical_amplitude_search, CriticalAmplitude, Probe, SearchConfig, SearchReport, DEFAULT_AMPLITUDE_GRID};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::VelocityField;
    use std::f64::consts::PI;

    fn y_profile(y: f64) -> f64 {
        0.05 + 0.95 * (0.5 * (1.0 + (2.0 * PI * y).cos())).powi(4)
    }

    #[test]
    fn cold_data_quenches_at_once() {
        let sys = ReactionSystem::new(&VelocityField::zero(), 4, 0.0).unwrap();
        let t0 = sys.state_from_fn(|x, _| 0.3 + 0.1 * (2.0 * PI * x).cos());
        let f = IgnitionNonlinearity::new(0.5).unwrap();
        let traj = quench_run(&sys, &f, &t0, &QuenchConfig::new(0.01, 0.1)).unwrap();
        let rep = quench_detector(&traj, 0.5);
        assert_eq!(rep.verdict, QuenchVerdict::Quenched { t_q: 0.0 });
        assert!(rep.final_ok);
        let cfg = SearchConfig::new(4, 10.0, QuenchConfig::new(0.01, 0.1));
        let s = critical_amplitude_search(&VelocityField::zero(), &f, &t0, &cfg).unwrap();
        assert_eq!(s.result, CriticalAmplitude::FirstQuench { a_star: 0.0, burning_below: None });
    }

    #[test]
    fn inert_run_conserves_mass() {
        let sys = ReactionSystem::new(&VelocityField::cellular(), 6, 5.0).unwrap();
        let t0 = sys.state_from_fn(|x, y| 0.4 + 0.3 * (2.0 * PI * x).sin() * (2.0 * PI * y).cos());
        let f = IgnitionNonlinearity::inert(0.5).unwrap();
        let traj = quench_run(&sys, &f, &t0, &QuenchConfig::new(0.01, 0.3)).unwrap();
        assert!(l1_balance_residual(&traj).residual <= 1e-10);
    }

    #[test]
    fn hot_mean_burns_toward_full_volume() {
        let sys = ReactionSystem::new(&VelocityField::shear(), 6, 1.0).unwrap();
        let t0 = sys.state_from_fn(|_, y| 0.55 + 0.3 * (2.0 * PI * y).cos());
        let f = IgnitionNonlinearity::new(0.5).unwrap();
        let traj = quench_run(&sys, &f, &t0, &QuenchConfig::new(0.005, 2.0)).unwrap();
        assert!(!quench_detector(&traj, 0.5).verdict.is_quenched());
        let bal = l1_balance_residual(&traj);
        assert!(bal.nondecreasing(1e-14));
        let last = traj.samples.last().unwrap();
        assert!(last.int_t > 0.9, "{}", last.int_t);
    }

    #[test]
    fn comparison_checker_detects_doubled_reaction() {
        let sys = ReactionSystem::new(&VelocityField::shear(), 6, 10.0).unwrap();
        let t0 = sys.state_from_fn(|_, y| 0.7 + 0.2 * (2.0 * PI * y).cos());
        let f = IgnitionNonlinearity::new(0.5).unwrap();
        let mut cfg = QuenchConfig::new(0.002, 1.0);
        cfg.keep_fields = true;
        cfg.sample_stride = 10;
        let lin = quench_run(&sys, &IgnitionNonlinearity::inert(0.5).unwrap(), &t0, &cfg).unwrap();
        let hot = quench_run(&sys, &f, &t0, &cfg).unwrap();
        let c = f.ratio_bound();
        assert!(comparison_bound_check(&hot, &lin, c).unwrap().pass);
        assert!(comparison_bound_check(&hot, &lin, f.lipschitz()).unwrap().pass);
        let doubled = quench_run(&sys, &IgnitionNonlinearity::with_rate(0.5, 2.0).unwrap(), &t0, &cfg).unwrap();
        let rep = comparison_bound_check(&doubled, &lin, c).unwrap();
        assert!(!rep.pass, "{rep:?}");
    }

    #[test]
    fn shear_on_y_data_ignores_amplitude() {
        let f = IgnitionNonlinearity::new(0.5).unwrap();
        let cfg = QuenchConfig::new(0.002, 0.5);
        let runs: Vec<_> = [0.0, 1000.0]
            .iter()
            .map(|&a| {
                let sys = ReactionSystem::new(&VelocityField::shear(), 6, a).unwrap();
                let t0 = sys.state_from_fn(|_, y| y_profile(y));
                quench_run(&sys, &f, &t0, &cfg).unwrap()
            })
            .collect();
        let diff = runs[0]
            .samples
            .iter()
            .zip(&runs[1].samples)
            .map(|(a, b)| (a.sup_t - b.sup_t).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-9, "{diff}");
    }
}

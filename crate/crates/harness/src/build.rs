//! Operators, flows and initial states from their JSON descriptions.

use crate::error::HarnessError;
use crate::spec::{FlowSource, InitialSpec, OperatorSpec, TimeChangedParams};
use dissipator_core::diagnostics::gaussian_bump;
use dissipator_core::flows::{
    default_alpha, default_q, lacunary_q, relabel_to_lebesgue, stream_function_flow, Bump,
    RelabelReport, RelabelSettings, StreamKind, TimeChangedFlowSpec,
};
use dissipator_core::operators::{
    build_advection_generator, build_constant_flow_generator, build_free_jacobi,
    build_wvn_schrodinger, lattice_state, project_out_band_exterior, wvn_zero_mode, OperatorHandle,
    ProjectedSystem, VelocityField,
};
use dissipator_core::spectral::{GammaLadder, SpectralState, TorusLattice};
use num_complex::Complex64;
use rand::Rng;

/// An operator together with the ladder it acts against.
pub struct Built {
    pub handle: OperatorHandle,
    pub ladder: GammaLadder,
    pub lattice: Option<TorusLattice>,
    pub projected: Option<ProjectedSystem>,
    pub wvn: Option<usize>,
}

pub fn build_operator(op: &OperatorSpec) -> Result<Built, HarnessError> {
    let plain = |handle: OperatorHandle, ladder: GammaLadder| Built {
        handle,
        ladder,
        lattice: None,
        projected: None,
        wvn: None,
    };
    Ok(match op {
        OperatorSpec::FreeJacobi { n } => {
            let ladder = GammaLadder::linear(*n)?;
            plain(OperatorHandle::from_jacobi(&build_free_jacobi(*n)?, &ladder)?, ladder)
        }
        OperatorSpec::Wvn { n } => {
            let ladder = GammaLadder::linear(*n)?;
            let mut b = plain(OperatorHandle::from_jacobi(&build_wvn_schrodinger(*n)?, &ladder)?, ladder);
            b.wvn = Some(*n);
            b
        }
        OperatorSpec::WvnProjected { n, band } => {
            let ambient = GammaLadder::linear(*n)?;
            let sys = project_out_band_exterior(&build_wvn_schrodinger(*n)?, &ambient, *band)?;
            let mut b = plain(sys.ladder_generator.clone(), sys.ladder.clone());
            b.projected = Some(sys);
            b
        }
        OperatorSpec::Diagonal { entries, ladder } => {
            let ladder = match ladder {
                Some(l) => GammaLadder::new(l.clone(), "custom")?,
                None => GammaLadder::linear(entries.len())?,
            };
            plain(OperatorHandle::diagonal("diagonal", &ladder, entries.clone())?, ladder)
        }
        OperatorSpec::ConstantFlow { alpha, k } => torus(build_constant_flow_generator(*alpha, *k)?, *k),
        OperatorSpec::Advection { flow, k } => {
            let (u, _) = build_flow(flow, *k)?;
            torus(build_advection_generator(&u, *k)?, *k)
        }
    })
}

fn torus(handle: OperatorHandle, k: usize) -> Built {
    let lattice = TorusLattice::new(k);
    Built {
        handle,
        ladder: GammaLadder::torus(&lattice),
        lattice: Some(lattice),
        projected: None,
        wvn: None,
    }
}

/// Velocity field for a flow source; `k` caps stream-function modes.
pub fn build_flow(
    flow: &FlowSource,
    k: usize,
) -> Result<(VelocityField, Option<RelabelReport>), HarnessError> {
    Ok(match flow {
        FlowSource::Zero => (VelocityField::zero(), None),
        FlowSource::Shear => (VelocityField::shear(), None),
        FlowSource::Cellular => (VelocityField::cellular(), None),
        FlowSource::Constant { alpha } => (VelocityField::constant(*alpha), None),
        FlowSource::Stream { modes } => {
            let coefficients = modes.iter().map(|m| m.entry()).collect();
            (stream_function_flow(&StreamKind::Custom { coefficients }, k)?, None)
        }
        FlowSource::TimeChanged(p) => {
            let (_, u, report) = relabeled_flow(p)?;
            (u, Some(report))
        }
    })
}

pub fn time_changed_spec(p: &TimeChangedParams) -> Result<TimeChangedFlowSpec, HarnessError> {
    let alpha = p.alpha.unwrap_or_else(default_alpha);
    let q = match &p.q {
        Some(q) => lacunary_q(q.c, &q.frequencies),
        None => default_q(),
    };
    let psi = match p.psi {
        Some(b) => Bump { a: b.a, b: b.b, power: b.power },
        None => Bump::default(),
    };
    Ok(match p.m {
        Some(m) => TimeChangedFlowSpec::new(alpha, q, psi, m)?,
        None => TimeChangedFlowSpec::with_default_m(alpha, q, psi)?,
    })
}

pub fn relabeled_flow(
    p: &TimeChangedParams,
) -> Result<(TimeChangedFlowSpec, VelocityField, RelabelReport), HarnessError> {
    let spec = time_changed_spec(p)?;
    let (_, u, report) = relabel_to_lebesgue(&spec, p.grid, p.band, &RelabelSettings::default())?;
    Ok((spec, u, report))
}

/// Initial state in the operator's basis; `rng` is used only by [`InitialSpec::Random`].
pub fn build_initial<R: Rng>(
    init: &InitialSpec,
    built: &Built,
    rng: &mut R,
) -> Result<SpectralState, HarnessError> {
    let need_lattice = || {
        built
            .lattice
            .as_ref()
            .ok_or_else(|| HarnessError::Schema("initial: lattice data needs a torus operator".into()))
    };
    let state = match init {
        InitialSpec::Basis { j } => SpectralState::basis_vector(&built.ladder, *j)?,
        InitialSpec::ZeroMode => {
            if let Some(sys) = &built.projected {
                sys.eigenvector_near(0.0)?.1
            } else if let Some(n) = built.wvn {
                wvn_zero_mode(n)?.normalized()?
            } else {
                return Err(HarnessError::Schema(
                    "initial: zero-mode needs a Wigner-von Neumann operator".into(),
                ));
            }
        }
        InitialSpec::Modes { modes } => {
            let entries: Vec<_> = modes.iter().map(|m| m.entry()).collect();
            lattice_state(need_lattice()?, &entries)?
        }
        InitialSpec::Gaussian { sigma } => gaussian_bump(need_lattice()?, *sigma),
        InitialSpec::Coefficients { values } => SpectralState::from_real(&built.ladder, values)?,
        InitialSpec::Random => {
            let coeffs = (0..built.ladder.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            SpectralState::from_coeffs(&built.ladder, coeffs)?.normalized()?
        }
    };
    if state.basis() != built.handle.basis() || state.len() != built.handle.dim() {
        return Err(HarnessError::Schema(format!(
            "initial: state in basis `{}` does not fit operator basis `{}`",
            state.basis(),
            built.handle.basis()
        )));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Mode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_mode_is_annihilated_away_from_the_edge() {
        let b = build_operator(&OperatorSpec::Wvn { n: 200 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let u = build_initial(&InitialSpec::ZeroMode, &b, &mut rng).unwrap();
        let lu = b.handle.apply(&u).unwrap();
        let worst = lu.coeffs()[..198].iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn lattice_initial_needs_torus() {
        let b = build_operator(&OperatorSpec::FreeJacobi { n: 8 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let init = InitialSpec::Modes { modes: vec![Mode { k: [1, 0], re: 1.0, im: 0.0 }] };
        assert!(matches!(build_initial(&init, &b, &mut rng), Err(HarnessError::Schema(_))));
    }

    #[test]
    fn random_initial_depends_only_on_seed() {
        let b = build_operator(&OperatorSpec::FreeJacobi { n: 16 }).unwrap();
        let draw = |s| build_initial(&InitialSpec::Random, &b, &mut ChaCha8Rng::seed_from_u64(s)).unwrap();
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
        assert!((draw(7).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_flow_mode_state() {
        let b = build_operator(&OperatorSpec::ConstantFlow { alpha: [1.0, 0.5], k: 3 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let init = InitialSpec::Modes { modes: vec![Mode { k: [1, 0], re: 1.0, im: 0.0 }] };
        let s = build_initial(&init, &b, &mut rng).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }
}

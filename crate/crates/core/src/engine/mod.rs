//! Time integration of `dφ/dt = (iaL − gΓ)φ` and the energy ledger.
//!
//! `(a, g) = (A, 1)` for the amplitude form and `(1, ε)` for the rescaled form.

mod config;
mod evolve;
mod gap;
mod ledger;
mod oracle;
mod propagator;

pub use config::{EvolutionConfig, GrowthBound, Method, Scaling};
pub use evolve::{evolve, evolve_adaptive, free_evolve, Trajectory, ADAPTIVE_STEP_CAP};
pub use gap::{free_vs_damped_gap, GapReport};
pub use ledger::{energy_identity_residual, EnergyLedger};
pub use oracle::{dense_oracle_evolve, generator_matrix, ORACLE_MAX_DIM};
pub use propagator::Propagator;

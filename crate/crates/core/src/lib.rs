//! Numerical laboratory for dissipative semigroups `dφ/dt = (iAL − Γ)φ`.
//!
//! The crate covers the abstract ladder track (Jacobi operators against a Γ
//! ladder) and the torus track (advection–diffusion by incompressible flows
//! on the flat 2-torus), with time integrators, enhancement diagnostics and
//! reaction–diffusion quenching experiments on top.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod flows;
pub mod fourier;
pub mod linalg;
pub mod operators;
pub mod parallel;
pub mod quench;
pub mod spectral;

pub use error::{Error, Result};

//! Mapping of propagating Gaussian light states onto the collective spin of an
//! atomic ensemble by stimulated Raman absorption.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Bessel functions and adaptive quadrature.
//! * [`model`]: SI parameter records, derived rates and cross sections, and the
//!   experimental feasibility checks.
//! * [`mapping`]: steady-state engines, namely the closed-form atomic variance, spectral
//!   transfer of light and atoms, finite-bandwidth efficiency curves.
//! * [`dynamics`]: Bessel Green-function kernels, transient variance under a
//!   pulsed drive, and a discretized Maxwell–Bloch oracle.
//! * [`teleport`]: weak-coupling beam-splitter read-out analysis.
//!
//! Everything downstream of [`model`] is dimensionless: optical depth `alpha`,
//! detuning `x = Δ/Γ`, bandwidth ratio `b = Γq/Γ`, and time `Γτ`. Atomic
//! variances are reported in units of `nL` (the collective vacuum level).

// NaN must fail parameter checks, so `!(x > 0.0)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
mod error;
pub mod mapping;
pub mod model;
pub mod specfun;
pub mod teleport;

pub use error::{Error, Result};

//! Special functions and integration primitives.
//!
//! Bessel functions of the first kind are delegated to `libm` (a port of the
//! musl/FreeBSD implementations). The exponentially scaled modified Bessel
//! functions `e^{-x} I0(x)` and `e^{-x} I1(x)` are computed here from the
//! ascending series below [`bessel::SERIES_LIMIT`] and from the Hankel
//! asymptotic expansion above it, so that optical depths up to `1e6` never
//! touch an overflowing `I_n`.
//!
//! [`integrate_adaptive`] is a globally adaptive 7/15-point Gauss–Kronrod
//! scheme. Semi-infinite intervals `[a, ∞)` are mapped onto `[0, 1)` with
//! `x = a + t/(1 - t)`, `dx = dt/(1 - t)^2`; the doubly infinite interval uses
//! `x = t/(1 - t^2)`, `dx = (1 + t^2)/(1 - t^2)^2 dt` on `(-1, 1)`.

mod bessel;
mod quadrature;

pub use bessel::{bessel_i0e, bessel_i1e, bessel_j0, bessel_j1};
pub(crate) use bessel::{i0e, i1e, j0, j1};
pub use quadrature::{integrate_adaptive, Integrator, QuadratureResult};

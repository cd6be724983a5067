//! Collective-spin variance at finite times from the Bessel kernels.
//!
//! In dimensionless time `t = Γτ`, with `A(t) = L a(t/Γ)` and `ΔA(u) = A(t) - A(t - u)`:
//!
//! ```text
//! initial   e^{-2t} ∫_0^1 J0²(2√(A(t) s)) ds
//! Langevin  2 ∫_0^t e^{-2u} [J0²(2√ΔA) + J1²(2√ΔA)] du
//! light     ∫∫ k(u1) k(u2) C(u1 - u2) du1 du2,   k(u) = √(dA/dt) e^{-u} J1(2√ΔA)/√ΔA
//! ```
//!
//! The Langevin term already contains the closed-form column integral of the
//! squared J0 kernel. `C` is the input correlator `X0² δ` for white input and
//! `δ - s (b/2) e^{-b|u|}` for Lorentzian squeezing of width `b = Γq/Γ`.

use std::cell::Cell;

use super::kernels::{j0_sq_column_average, j1_ratio};
use super::pulse::{PulseArea, ScaledArea};
use crate::error::{domain, Error, Result};
use crate::mapping::{NoiseReport, SqueezingModel};
use crate::specfun::{j0, Integrator};

/// Memory integrals are cut at `u = 40`, where `e^{-2u}` is below 1e-34.
const MEMORY_HORIZON: f64 = 40.0;

/// Variance of the collective spin at time `tau` [s] for an initially
/// vacuum-state ensemble.
pub fn transient_variance(
    area: &PulseArea,
    length: f64,
    gamma: f64,
    model: &SqueezingModel,
    tau: f64,
    tol: f64,
) -> Result<NoiseReport> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(domain(format!("length must be positive, got {length}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(domain(format!("dephasing rate must be positive, got {gamma}")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(domain(format!("time must be finite and >= 0, got {tau}")));
    }
    model.validate()?;
    let scaled = ScaledArea { area, length, gamma };
    let t = gamma * tau;
    let integrator = Integrator::new(tol).with_max_intervals(4000);

    let memory = initial_memory(&scaled, t, &integrator)?;
    let langevin = langevin_part(&scaled, t, &integrator)?;
    let light = match *model {
        SqueezingModel::Flat { x0_sq } => x0_sq * white_light(&scaled, t, &integrator)?,
        SqueezingModel::Lorentzian { bandwidth, degree } => {
            let white = white_light(&scaled, t, &integrator)?;
            white - degree * 0.5 * (bandwidth / gamma) * colored_light(&scaled, t, bandwidth / gamma, &integrator)?
        }
    };
    Ok(NoiseReport::from_parts(memory + langevin, light, model.reference_level()))
}

/// Variance at each of `taus` [s].
pub fn transient_trace(
    area: &PulseArea,
    length: f64,
    gamma: f64,
    model: &SqueezingModel,
    taus: &[f64],
    tol: f64,
) -> Result<Vec<NoiseReport>> {
    taus.iter().map(|&tau| transient_variance(area, length, gamma, model, tau, tol)).collect()
}

fn initial_memory(scaled: &ScaledArea<'_>, t: f64, integrator: &Integrator) -> Result<f64> {
    let decay = (-2.0 * t).exp();
    if decay == 0.0 {
        return Ok(0.0);
    }
    let total = scaled.value(t);
    if total == 0.0 {
        return Ok(decay);
    }
    let column = integrator.integrate(
        |s| {
            let v = j0(2.0 * (total * s).sqrt());
            v * v
        },
        0.0,
        1.0,
    )?;
    Ok(decay * column.value)
}

/// Memory-variable breakpoints `u = t - t_k` for drive switches inside `(t - horizon, t)`.
fn memory_breaks(scaled: &ScaledArea<'_>, t: f64, horizon: f64) -> Vec<f64> {
    let mut b: Vec<f64> = scaled.breaks_within(t - horizon, t).into_iter().map(|tk| t - tk).collect();
    b.sort_by(f64::total_cmp);
    b
}

fn piecewise<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, breaks: &[f64], integrator: &Integrator) -> Result<f64> {
    let mut total = 0.0;
    let mut a = lo;
    for &b in breaks.iter().filter(|&&b| b > lo && b < hi).chain(std::iter::once(&hi)) {
        total += integrator.integrate(&mut f, a, b)?.value;
        a = b;
    }
    Ok(total)
}

fn langevin_part(scaled: &ScaledArea<'_>, t: f64, integrator: &Integrator) -> Result<f64> {
    let horizon = t.min(MEMORY_HORIZON);
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let at = scaled.value(t);
    let breaks = memory_breaks(scaled, t, horizon);
    let v = piecewise(
        |u| 2.0 * (-2.0 * u).exp() * j0_sq_column_average((at - scaled.value(t - u)).max(0.0)),
        0.0,
        horizon,
        &breaks,
        integrator,
    )?;
    Ok(v)
}

fn light_amplitude(scaled: &ScaledArea<'_>, t: f64, at: f64, u: f64) -> f64 {
    let rate = scaled.rate(t - u);
    if rate == 0.0 {
        return 0.0;
    }
    rate.sqrt() * (-u).exp() * j1_ratio((at - scaled.value(t - u)).max(0.0))
}

/// `∫ k(u)² du`: the light contribution for unit white input.
fn white_light(scaled: &ScaledArea<'_>, t: f64, integrator: &Integrator) -> Result<f64> {
    let horizon = t.min(MEMORY_HORIZON);
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let at = scaled.value(t);
    let breaks = memory_breaks(scaled, t, horizon);
    piecewise(
        |u| {
            let k = light_amplitude(scaled, t, at, u);
            k * k
        },
        0.0,
        horizon,
        &breaks,
        integrator,
    )
}

/// `∫∫ k(u1) k(u2) e^{-b|u1-u2|}`, evaluated as twice the ordered region.
fn colored_light(scaled: &ScaledArea<'_>, t: f64, b: f64, integrator: &Integrator) -> Result<f64> {
    let horizon = t.min(MEMORY_HORIZON);
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let at = scaled.value(t);
    let breaks = memory_breaks(scaled, t, horizon);
    let inner_failure: Cell<Option<Error>> = Cell::new(None);
    let outer = piecewise(
        |u1| {
            let k1 = light_amplitude(scaled, t, at, u1);
            if k1 == 0.0 {
                return 0.0;
            }
            let inner = piecewise(
                |u2| light_amplitude(scaled, t, at, u2) * (-b * (u2 - u1)).exp(),
                u1,
                horizon,
                &breaks,
                integrator,
            );
            match inner {
                Ok(v) => k1 * v,
                Err(e) => {
                    let estimate = match &e {
                        Error::Convergence { estimate, .. } => *estimate,
                        _ => f64::NAN,
                    };
                    inner_failure.set(Some(e));
                    if estimate.is_finite() {
                        k1 * estimate
                    } else {
                        0.0
                    }
                }
            }
        },
        0.0,
        horizon,
        &breaks,
        integrator,
    )?;
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 * outer)
}

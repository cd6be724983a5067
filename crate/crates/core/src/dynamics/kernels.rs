use super::pulse::PulseArea;
use crate::error::{domain, Result};
use crate::specfun::{j0, j1};

/// Below this value of `u` the ratio `J1(2√u)/√u` is taken from its series.
const SERIES_SWITCH: f64 = 1e-8;

/// `J1(2√u)/√u`, continuous through its removable singularity (`→ 1` as `u → 0`).
pub(crate) fn j1_ratio(u: f64) -> f64 {
    if u < SERIES_SWITCH {
        1.0 - 0.5 * u + u * u / 12.0
    } else {
        let s = u.sqrt();
        j1(2.0 * s) / s
    }
}

/// `∫_0^1 J0²(2√(β s)) ds = J0²(2√β) + J1²(2√β)`.
pub(crate) fn j0_sq_column_average(beta: f64) -> f64 {
    let y = 2.0 * beta.sqrt();
    let (a, b) = (j0(y), j1(y));
    a * a + b * b
}

/// Weight with which the initial coherence at `z_prime` survives in the
/// collective spin at `tau`: `e^{-Γτ} J0(2√(a(τ)(L - z')))`.
pub fn collective_initial_kernel(z_prime: f64, tau: f64, area: &PulseArea, length: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=length).contains(&z_prime) {
        return Err(domain(format!("z' = {z_prime} outside [0, {length}]")));
    }
    if !(tau >= 0.0) {
        return Err(domain(format!("tau must be >= 0, got {tau}")));
    }
    let arg = area.at(tau) * (length - z_prime);
    Ok((-gamma * tau).exp() * j0(2.0 * arg.sqrt()))
}

/// Kernel with which the input field at `tau_prime` enters the collective spin
/// at `tau`: `e^{-Γ(τ-τ')} √(L/u) J1(2√(uL))`, `u = a(τ) - a(τ')`. Units of length;
/// equals `L` when no area has accumulated between the two times.
pub fn collective_light_kernel(tau: f64, tau_prime: f64, area: &PulseArea, length: f64, gamma: f64) -> Result<f64> {
    if !(tau_prime < tau) {
        return Err(domain(format!("light kernel needs tau' < tau, got tau' = {tau_prime}, tau = {tau}")));
    }
    let u = (area.at(tau) - area.at(tau_prime)).max(0.0);
    Ok((-gamma * (tau - tau_prime)).exp() * length * j1_ratio(u * length))
}

//! Steady-state mapping engines.
//!
//! Three routes to the collective-spin variance under constant drive:
//!
//! * the closed form `⟨X²⟩/nL = F(α) + X0² (1 - F(α))` with
//!   `F(α) = e^{-α}(I0(α) + I1(α))`, evaluated through scaled Bessel functions;
//! * the frequency integral of the atomic spectral density, which also handles
//!   finite-bandwidth (Lorentzian) squeezing;
//! * the time-domain kernels in [`crate::dynamics`].
//!
//! # Spectral normalization
//!
//! With `x = Δ/Γ` and `e^{ik(Δ)L} = exp(-α/(1 - ix))`, the spectral density of the
//! atomic quadrature splits into
//!
//! ```text
//! light:    |1 - exp(-α/(1 - ix))|² / (2π α) · S0(x)
//! Langevin: (1 - exp(-2α/(1 + x²)))   / (2π α)
//! ```
//!
//! The common factor `1/(2π α)` is the normalization of the frequency measure.
//! It is fixed by requiring that a vacuum input (`S0 ≡ 1`) integrates to exactly
//! one vacuum unit; it coincides with the Parseval factor of the time-domain
//! light kernel `e^{-u} J1(2√(αu))/√u`, whose Laplace transform is
//! `(1 - e^{-α/p})/√α` at `p = 1 - ix`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::specfun::{i0e, i1e, Integrator};

/// Default absolute tolerance for frequency integrals.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Input-field quadrature statistics, in vacuum units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezingModel {
    /// White noise at level `x0_sq` (vacuum = 1, ideal squeezing = 0).
    Flat { x0_sq: f64 },
    /// Squeezing with a Lorentzian spectrum of width `bandwidth` (Γq, 1/s):
    /// `S0(Δ) = 1 - degree · Γq² / (Γq² + Δ²)`. `degree = 1` is ideal squeezing.
    Lorentzian { bandwidth: f64, degree: f64 },
}

impl SqueezingModel {
    pub const VACUUM: Self = SqueezingModel::Flat { x0_sq: 1.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            SqueezingModel::Flat { x0_sq } if !(x0_sq.is_finite() && x0_sq >= 0.0) => {
                Err(domain(format!("flat noise level must be >= 0, got {x0_sq}")))
            }
            SqueezingModel::Lorentzian { bandwidth, .. } if !(bandwidth.is_finite() && bandwidth > 0.0) => {
                Err(domain(format!("squeezing bandwidth must be > 0, got {bandwidth}")))
            }
            SqueezingModel::Lorentzian { degree, .. } if !(0.0..=1.0).contains(&degree) => {
                Err(domain(format!("squeezing degree must lie in [0, 1], got {degree}")))
            }
            _ => Ok(()),
        }
    }

    /// Spectral density at dimensionless detuning `x = Δ/Γ`.
    pub fn spectral_density(&self, x: f64, gamma: f64) -> f64 {
        match *self {
            SqueezingModel::Flat { x0_sq } => x0_sq,
            SqueezingModel::Lorentzian { bandwidth, degree } => {
                let b = bandwidth / gamma;
                1.0 - degree * b * b / (b * b + x * x)
            }
        }
    }

    /// Input noise level used as the reference in the efficiency definition:
    /// the flat level, or the bottom of the Lorentzian dip.
    pub fn reference_level(&self) -> f64 {
        match *self {
            SqueezingModel::Flat { x0_sq } => x0_sq,
            SqueezingModel::Lorentzian { degree, .. } => 1.0 - degree,
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, SqueezingModel::Flat { .. })
    }
}

/// Collective-spin variance in units of `nL` and its decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    pub variance_norm: f64,
    /// `(1 - variance_norm) / (1 - reference)`; `None` when the input carries no
    /// squeezing (the ratio is 0/0).
    pub eta: Option<f64>,
    /// Contribution of the atoms themselves: Langevin noise plus whatever memory
    /// of the initial coherence survives.
    pub atom_langevin_part: f64,
    /// Contribution of the absorbed input light.
    pub light_part: f64,
}

impl NoiseReport {
    pub fn from_parts(atom_langevin_part: f64, light_part: f64, reference: f64) -> Self {
        let variance_norm = atom_langevin_part + light_part;
        let denom = 1.0 - reference;
        let eta = (denom.abs() > 1e-15).then(|| (1.0 - variance_norm) / denom);
        Self { variance_norm, eta, atom_langevin_part, light_part }
    }
}

/// `e^{-α}(I0(α) + I1(α))`: the fraction of the atomic vacuum that survives.
pub fn residual_vacuum(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(i0e(alpha) + i1e(alpha))
}

/// Mapping efficiency for broadband input, `1 - e^{-α}(I0(α) + I1(α))`.
pub fn efficiency_closed(alpha: f64) -> Result<f64> {
    Ok(1.0 - residual_vacuum(alpha)?)
}

/// Closed-form steady-state variance for white input at level `x0_sq`.
pub fn variance_closed(alpha: f64, x0_sq: f64) -> Result<NoiseReport> {
    let residual = residual_vacuum(alpha)?;
    SqueezingModel::Flat { x0_sq }.validate()?;
    Ok(NoiseReport::from_parts(residual, x0_sq * (1.0 - residual), x0_sq))
}

/// Intensity transmission `exp(-α / (1 + x²))` at detuning `x = Δ/Γ`.
pub fn transmission(alpha: f64, x: f64) -> f64 {
    (-alpha / (1.0 + x * x)).exp()
}

/// Noise spectrum of the transmitted light: `S0 T + (1 - T)`.
///
/// Expects `alpha >= 0`.
pub fn transmitted_spectrum(alpha: f64, x: f64, s0: f64) -> f64 {
    debug_assert!(alpha >= 0.0);
    let t = transmission(alpha, x);
    s0 * t + (1.0 - t)
}

/// Langevin part of the atomic spectral density (independent of the input).
pub fn langevin_density(alpha: f64, x: f64) -> f64 {
    let p = 1.0 / (1.0 + x * x);
    if alpha == 0.0 {
        return p / PI;
    }
    -(-2.0 * alpha * p).exp_m1() / (2.0 * PI * alpha)
}

/// Light transfer `|1 - e^{ikL}|² / (2π α)`; multiply by `S0(x)` for the density.
pub fn light_transfer(alpha: f64, x: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let p = 1.0 / (1.0 + x * x);
    let q = x * p;
    let decay = (-alpha * p).exp();
    // 1 - e^{-αp} cos(αq), written without cancellation for small α.
    let half_angle = (0.5 * alpha * q).sin();
    let re = -(-alpha * p).exp_m1() + 2.0 * decay * half_angle * half_angle;
    let im = decay * (alpha * q).sin();
    (re * re + im * im) / (2.0 * PI * alpha)
}

/// Spectral density of the collective spin quadrature at `x = Δ/Γ` for input
/// spectral density `s0`. Integrates over `x ∈ ℝ` to the variance in units of `nL`.
pub fn atomic_spectral_density(alpha: f64, x: f64, s0: f64) -> f64 {
    langevin_density(alpha, x) + light_transfer(alpha, x) * s0
}

/// Frequency-integrated variance.
pub fn variance_spectral(alpha: f64, model: &SqueezingModel, gamma: f64, tol: f64) -> Result<NoiseReport> {
    check_alpha(alpha)?;
    model.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(domain(format!("dephasing rate must be positive, got {gamma}")));
    }
    let mut breaks = vec![2.0 * (1.0 + (2.0 * alpha).sqrt())];
    if let SqueezingModel::Lorentzian { bandwidth, .. } = *model {
        breaks.push(bandwidth / gamma);
    }
    let langevin = 2.0 * half_line(|x| langevin_density(alpha, x), &breaks, tol / 4.0)?;
    let light = 2.0 * half_line(|x| light_transfer(alpha, x) * model.spectral_density(x, gamma), &breaks, tol / 4.0)?;
    Ok(NoiseReport::from_parts(langevin, light, model.reference_level()))
}

/// Efficiency along `alphas` (evaluated in parallel, returned in input order).
///
/// Flat inputs use the closed form; Lorentzian inputs the spectral integral.
pub fn efficiency_curve(alphas: &[f64], model: &SqueezingModel, gamma: f64, tol: f64) -> Result<Vec<(f64, f64)>> {
    model.validate()?;
    if (1.0 - model.reference_level()).abs() <= 1e-15 {
        return Err(domain("efficiency is undefined for an input without squeezing"));
    }
    if alphas.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(domain("alpha grid must be sorted ascending"));
    }
    alphas
        .par_iter()
        .map(|&alpha| {
            let eta = if model.is_flat() {
                efficiency_closed(alpha)?
            } else {
                variance_spectral(alpha, model, gamma, tol)?.eta.expect("reference checked above")
            };
            Ok((alpha, eta))
        })
        .collect()
}

/// `n` logarithmically spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// The default efficiency grid: 200 log-spaced depths on `[1e-2, 1e3]`.
pub fn default_alpha_grid() -> Vec<f64> {
    log_grid(1e-2, 1e3, 200)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("optical depth must be finite and >= 0, got {alpha}")))
    }
}

/// ∫_0^∞ f, split at the given interior points.
fn half_line<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut points: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite() && *b > 0.0).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let pieces = points.len() + 1;
    let integrator = Integrator::new(tol / pieces as f64);
    let mut lo = 0.0;
    let mut total = 0.0;
    for &hi in points.iter().chain(std::iter::once(&f64::INFINITY)) {
        total += integrator.integrate(&f, lo, hi).map_err(|e| rescale_convergence(e, total))?.value;
        lo = hi;
    }
    Ok(total)
}

fn rescale_convergence(e: Error, partial: f64) -> Error {
    match e {
        Error::Convergence { estimate, error } => Error::Convergence { estimate: partial + estimate, error },
        other => other,
    }
}

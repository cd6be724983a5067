//! Weak-coupling read-out: the linearized light–atom "beam splitter".
//!
//! A short pulse at small optical depth couples the rescaled collective spin
//! `q = Q_L/√(nL)` and the field area mode `θ` as
//!
//! ```text
//! q_out = q_in - i r θ_in
//! θ_out = θ_in - i r q_in,      r = √α_pulse
//! ```
//!
//! On the real quadratures `(Re q, Im q, Re θ, Im θ)` this is the matrix
//! returned by [`linear_bs_matrix`]. The map is first order in `r` and scales
//! commutators by `1 + r²`; [`commutator_defect`] reports that excess.

#![allow(clippy::needless_range_loop)]

use crate::error::{domain, Result};

/// Default linearization threshold on `r`.
pub const DEFAULT_LINEARIZATION_LIMIT: f64 = 0.3;
/// Added noise of measure-and-reconstruct transfer, in vacuum units.
pub const CLASSICAL_BASELINE: f64 = 1.0;

pub type Matrix4 = [[f64; 4]; 4];

/// Gaussian state of the atomic mode and the field area mode.
///
/// Quadrature order is `(Re q, Im q, Re θ, Im θ)`; vacuum is the identity covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussian {
    pub mean: [f64; 4],
    pub cov: Matrix4,
}

impl TwoModeGaussian {
    pub fn vacuum() -> Self {
        Self { mean: [0.0; 4], cov: identity() }
    }

    pub fn new(mean: [f64; 4], cov: Matrix4) -> Result<Self> {
        for i in 0..4 {
            if cov[i][i] < 0.0 {
                return Err(domain(format!("covariance diagonal entry {i} is negative")));
            }
            for j in 0..i {
                if (cov[i][j] - cov[j][i]).abs() > 1e-12 * (1.0 + cov[i][j].abs()) {
                    return Err(domain(format!("covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { mean, cov })
    }

    /// Exchanges the atomic and field modes.
    pub fn swapped(&self) -> Self {
        const P: [usize; 4] = [2, 3, 0, 1];
        let mut mean = [0.0; 4];
        let mut cov = [[0.0; 4]; 4];
        for i in 0..4 {
            mean[i] = self.mean[P[i]];
            for j in 0..4 {
                cov[i][j] = self.cov[P[i]][P[j]];
            }
        }
        Self { mean, cov }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsReport {
    pub r: f64,
    /// Whether `r` is below the linearization threshold.
    pub valid: bool,
    /// Largest tolerable residual noise in the EPR resource (≈ r).
    pub epr_requirement: f64,
    pub commutator_defect: f64,
}

/// Coupling for a short pulse of optical depth `alpha_pulse = a τ_pulse L`.
pub fn coupling_r(alpha_pulse: f64) -> Result<BsReport> {
    coupling_r_with_limit(alpha_pulse, DEFAULT_LINEARIZATION_LIMIT)
}

pub fn coupling_r_with_limit(alpha_pulse: f64, limit: f64) -> Result<BsReport> {
    if !(alpha_pulse.is_finite() && alpha_pulse >= 0.0) {
        return Err(domain(format!("pulse optical depth must be >= 0, got {alpha_pulse}")));
    }
    let r = alpha_pulse.sqrt();
    Ok(BsReport { r, valid: r <= limit, epr_requirement: r, commutator_defect: commutator_defect(r) })
}

/// Real 4x4 matrix of the linearized coupling.
pub fn linear_bs_matrix(r: f64) -> Matrix4 {
    [[1.0, 0.0, 0.0, r], [0.0, 1.0, -r, 0.0], [0.0, r, 1.0, 0.0], [-r, 0.0, 0.0, 1.0]]
}

pub fn apply_linear_bs(state: &TwoModeGaussian, r: f64) -> Result<TwoModeGaussian> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!("coupling must be >= 0, got {r}")));
    }
    Ok(transform(state, &linear_bs_matrix(r)))
}

pub(crate) fn transform(state: &TwoModeGaussian, m: &Matrix4) -> TwoModeGaussian {
    let mut mean = [0.0; 4];
    for i in 0..4 {
        mean[i] = (0..4).map(|k| m[i][k] * state.mean[k]).sum();
    }
    let mc = mul(m, &state.cov);
    let cov = mul(&mc, &transpose(m));
    TwoModeGaussian { mean, cov }
}

/// Symplectic form for `(x1, p1, x2, p2)`.
fn symplectic_form() -> Matrix4 {
    [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]]
}

/// Relative Frobenius deviation `‖M Ω Mᵀ - Ω‖ / ‖Ω‖` of the linearized map from
/// a commutator-preserving one. Equals `r²`.
pub fn commutator_defect(r: f64) -> f64 {
    let m = linear_bs_matrix(r);
    let omega = symplectic_form();
    let image = mul(&mul(&m, &omega), &transpose(&m));
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            num += (image[i][j] - omega[i][j]).powi(2);
            den += omega[i][j].powi(2);
        }
    }
    (num / den).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutBudget {
    pub r: f64,
    pub epr_residual: f64,
    /// `epr_residual < r`.
    pub pass: bool,
    /// `epr_residual / r` (infinite at `r = 0`).
    pub ratio: f64,
    pub classical_baseline: f64,
}

pub fn readout_noise_budget(r: f64, epr_residual: f64) -> Result<ReadoutBudget> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!("coupling must be >= 0, got {r}")));
    }
    if !(epr_residual.is_finite() && epr_residual >= 0.0) {
        return Err(domain(format!("EPR residual noise must be >= 0, got {epr_residual}")));
    }
    let ratio = if r > 0.0 { epr_residual / r } else { f64::INFINITY };
    Ok(ReadoutBudget { r, epr_residual, pass: epr_residual < r, ratio, classical_baseline: CLASSICAL_BASELINE })
}

fn identity() -> Matrix4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn transpose(m: &Matrix4) -> Matrix4 {
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = m[j][i];
        }
    }
    t
}

fn mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

//! Physical parameters in SI units and the quantities derived from them.
//!
//! The mapping engines only ever see the optical depth and rate ratios; this
//! module is where those come from, and where the experimental inequality
//! chain (far detuning, Raman dominance, long pulses, one-dimensional
//! geometry) is evaluated.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Ensemble geometry and dark decoherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// Atomic number density n [1/m^3].
    pub density: f64,
    /// Sample length L along the propagation axis [m].
    pub length: f64,
    /// Cross-sectional area A [m^2].
    pub area: f64,
    /// Ground-coherence dephasing with the drive off, Γ0 [1/s].
    pub dark_decoherence: f64,
    /// Optical wavelength λ [m].
    pub wavelength: f64,
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        positive("medium.density", self.density)?;
        positive("medium.length", self.length)?;
        positive("medium.area", self.area)?;
        positive("medium.dark_decoherence", self.dark_decoherence)?;
        positive("medium.wavelength", self.wavelength)
    }

    /// Fresnel number `A / (λ L)`.
    pub fn fresnel_number(&self) -> f64 {
        self.area / (self.wavelength * self.length)
    }

    /// Column density `n L` [1/m^2], the vacuum variance of the collective spin.
    pub fn column_density(&self) -> f64 {
        self.density * self.length
    }
}

/// Strong classical drive.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveParams {
    /// Coupling density `g = κ1* κ2 |E_s|^2` at full power [1/(m s)].
    pub coupling_density: f64,
    /// Power broadening Γs at full power [1/s].
    pub power_broadening: f64,
    /// Raman pulse duration [s].
    pub pulse_duration: f64,
    /// Envelope of `|E_s(τ)|^2` relative to full power, as `(duration [s], power)`
    /// segments. Empty means constant full power.
    pub profile: Vec<(f64, f64)>,
}

impl DriveParams {
    pub fn constant(coupling_density: f64, power_broadening: f64, pulse_duration: f64) -> Self {
        Self { coupling_density, power_broadening, pulse_duration, profile: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        nonneg("drive.coupling_density", self.coupling_density)?;
        nonneg("drive.power_broadening", self.power_broadening)?;
        positive("drive.pulse_duration", self.pulse_duration)?;
        for (i, &(duration, power)) in self.profile.iter().enumerate() {
            positive(&format!("drive.profile[{i}].duration"), duration)?;
            nonneg(&format!("drive.profile[{i}].power"), power)?;
        }
        Ok(())
    }
}

/// Microscopic atomic and field parameters entering the cross sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicPhysics {
    /// Optical angular frequency ω [rad/s].
    pub angular_frequency: f64,
    /// One-photon detuning from the intermediate states Δi [1/s].
    pub one_photon_detuning: f64,
    /// Intermediate-state width γi [1/s].
    pub upper_width: f64,
    /// Σ μ1i μ3i, in the units the saturation-intensity formula is evaluated in.
    pub dipole_sum: f64,
    /// Saturation parameter S = I_s / I_sat.
    pub saturation: f64,
    /// Spectral width of the quantum field Γq [1/s].
    pub field_bandwidth: f64,
    /// Wavevector mismatch k_q - k_s [1/m].
    pub wavevector_mismatch: f64,
}

impl AtomicPhysics {
    pub fn validate(&self) -> Result<()> {
        positive("physics.angular_frequency", self.angular_frequency)?;
        positive("physics.one_photon_detuning", self.one_photon_detuning)?;
        positive("physics.upper_width", self.upper_width)?;
        positive("physics.field_bandwidth", self.field_bandwidth)?;
        nonneg("physics.saturation", self.saturation)?;
        finite("physics.dipole_sum", self.dipole_sum)?;
        finite("physics.wavevector_mismatch", self.wavevector_mismatch)
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.angular_frequency
    }
}

/// Γ = Γ0 + Γs with the drive on, Γ0 with it off.
pub fn total_dephasing(medium: &MediumParams, drive: &DriveParams, drive_on: bool) -> f64 {
    if drive_on {
        medium.dark_decoherence + drive.power_broadening
    } else {
        medium.dark_decoherence
    }
}

/// Optical depth `α = g L / Γ` with the drive on.
pub fn optical_depth(medium: &MediumParams, drive: &DriveParams) -> Result<f64> {
    let gamma = total_dephasing(medium, drive, true);
    if !(gamma > 0.0) {
        return Err(Error::Singular(format!("total dephasing must be positive, got {gamma}")));
    }
    Ok(drive.coupling_density * medium.length / gamma)
}

/// Optical depth of a short pulse, `g τ_pulse L`, used for the weak-coupling read-out.
pub fn pulse_optical_depth(medium: &MediumParams, drive: &DriveParams) -> f64 {
    drive.coupling_density * drive.pulse_duration * medium.length
}

/// Resonant narrowband depth `(3 / 2π) λ² n L`, which the Raman depth
/// approaches when power broadening dominates the dephasing.
pub fn resonant_depth_estimate(medium: &MediumParams) -> f64 {
    3.0 / (2.0 * PI) * medium.wavelength.powi(2) * medium.density * medium.length
}

/// Spontaneous-Raman power broadening `ω³ ħ |κ1|² |E_s|² / (3 c³)`.
///
/// `kappa1` may be complex in general; only its modulus enters.
pub fn power_broadening(phys: &AtomicPhysics, kappa1: f64, es_sq: f64) -> Result<f64> {
    nonneg("es_sq", es_sq)?;
    finite("kappa1", kappa1)?;
    let w = phys.angular_frequency;
    Ok(w.powi(3) * HBAR * kappa1 * kappa1 * es_sq / (3.0 * SPEED_OF_LIGHT.powi(3)))
}

/// `I_sat = ω⁶ Σμ1iμ3i / (9π c⁵)`.
pub fn saturation_intensity(phys: &AtomicPhysics) -> f64 {
    phys.angular_frequency.powi(6) * phys.dipole_sum / (9.0 * PI * SPEED_OF_LIGHT.powi(5))
}

/// Stimulated Raman cross section for the quantum field,
/// `(6π)⁴ c⁸ I_sat² / (2 Γq S ω¹¹ ħ³ Δi²)`.
pub fn raman_cross_section(phys: &AtomicPhysics) -> Result<f64> {
    if !(phys.saturation > 0.0) {
        return Err(Error::Singular("raman cross section needs saturation S > 0".into()));
    }
    if !(phys.field_bandwidth > 0.0) {
        return Err(Error::Singular("raman cross section needs bandwidth Γq > 0".into()));
    }
    if !(phys.one_photon_detuning > 0.0) {
        return Err(Error::Singular("raman cross section needs detuning Δi > 0".into()));
    }
    let isat = saturation_intensity(phys);
    let c = SPEED_OF_LIGHT;
    // Split the powers so intermediate products stay in range.
    let num = (6.0 * PI).powi(4) * (c.powi(4) * isat) * (c.powi(4) * isat);
    let den = 2.0
        * phys.field_bandwidth
        * phys.saturation
        * phys.angular_frequency.powi(11)
        * HBAR.powi(3)
        * phys.one_photon_detuning.powi(2);
    Ok(num / den)
}

/// Spontaneous two-level cross section `3 λ² γi² / (8π Δi²)`.
pub fn two_level_cross_section(phys: &AtomicPhysics) -> Result<f64> {
    if !(phys.one_photon_detuning > 0.0) {
        return Err(Error::Singular("two-level cross section needs detuning Δi > 0".into()));
    }
    let lambda = phys.wavelength();
    Ok(3.0 * lambda * lambda * phys.upper_width.powi(2) / (8.0 * PI * phys.one_photon_detuning.powi(2)))
}

/// How "≫" and "near unity" are operationalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityThresholds {
    /// `a ≫ b` passes when `a >= ratio * b`.
    pub ratio: f64,
    pub fresnel_min: f64,
    pub fresnel_max: f64,
}

impl Default for FeasibilityThresholds {
    fn default() -> Self {
        Self { ratio: 10.0, fresnel_min: 0.3, fresnel_max: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCondition {
    pub name: &'static str,
    pub left: f64,
    pub right: f64,
    /// Required `left / right` ratio; for the Fresnel window this is unused (NaN).
    pub required_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub conditions: Vec<FeasibilityCondition>,
    pub pass: bool,
}

impl FeasibilityReport {
    pub fn failures(&self) -> impl Iterator<Item = &FeasibilityCondition> {
        self.conditions.iter().filter(|c| !c.pass)
    }
}

pub fn check_feasibility(
    medium: &MediumParams,
    drive: &DriveParams,
    phys: &AtomicPhysics,
    thresholds: &FeasibilityThresholds,
) -> FeasibilityReport {
    let ratio = thresholds.ratio;
    let much_greater = |name, left: f64, right: f64| FeasibilityCondition {
        name,
        left,
        right,
        required_ratio: ratio,
        pass: left >= ratio * right,
    };
    // Singular cross sections are reported as failing conditions, not errors.
    let sigma_r = raman_cross_section(phys).unwrap_or(f64::NAN);
    let sigma_2 = two_level_cross_section(phys).unwrap_or(f64::NAN);
    let inv_pulse = 1.0 / drive.pulse_duration;
    let delta = phys.one_photon_detuning;
    let fresnel = medium.fresnel_number();

    let conditions = vec![
        much_greater("detuning >> field bandwidth", delta, phys.field_bandwidth),
        much_greater("detuning >> power broadening", delta, drive.power_broadening),
        much_greater("detuning >> upper-level width", delta, phys.upper_width),
        much_greater("raman >> two-level cross section", sigma_r, sigma_2),
        much_greater("power broadening >> 1/pulse", drive.power_broadening, inv_pulse),
        much_greater("field bandwidth >> 1/pulse", phys.field_bandwidth, inv_pulse),
        much_greater("1 >> |dk| L", 1.0, phys.wavevector_mismatch.abs() * medium.length),
        FeasibilityCondition {
            name: "fresnel number near unity",
            left: fresnel,
            right: 1.0,
            required_ratio: f64::NAN,
            pass: (thresholds.fresnel_min..=thresholds.fresnel_max).contains(&fresnel),
        },
    ];
    let pass = conditions.iter().all(|c| c.pass);
    FeasibilityReport { conditions, pass }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be nonnegative, got {v}")))
    }
}

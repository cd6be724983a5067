//! Run configuration: flat `key = value` text with dotted block names.
//!
//! ```text
//! # comment
//! dimensionless.alpha = 20
//! medium.length_m = 4e-4
//! ```
//!
//! Every physics command runs from the `dimensionless.*` block alone. The SI
//! blocks (`medium.*`, `drive.*`, `physics.*`) feed `feasibility` and, when the
//! dimensionless value is absent, supply it. When both are given they must
//! agree to 1e-9 relative.

use std::collections::BTreeMap;
use std::path::PathBuf;

use raman_memory::mapping::{default_alpha_grid, log_grid, SqueezingModel, DEFAULT_TOLERANCE};
use raman_memory::model::{
    optical_depth, pulse_optical_depth, total_dephasing, AtomicPhysics, DriveParams, FeasibilityThresholds,
    MediumParams, SPEED_OF_LIGHT,
};
use raman_memory::teleport::DEFAULT_LINEARIZATION_LIMIT;

use crate::CliError;

/// Relative agreement required between SI-derived and stated dimensionless values.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

const KNOWN_KEYS: &[&str] = &[
    "medium.density",
    "medium.length_m",
    "medium.area_m2",
    "medium.dark_decoherence",
    "medium.wavelength_m",
    "drive.coupling_density",
    "drive.power_broadening",
    "drive.pulse_duration_s",
    "drive.profile",
    "physics.angular_frequency",
    "physics.one_photon_detuning",
    "physics.upper_width",
    "physics.dipole_sum",
    "physics.saturation",
    "physics.field_bandwidth",
    "physics.wavevector_mismatch",
    "dimensionless.alpha",
    "dimensionless.alpha_grid",
    "dimensionless.bandwidths",
    "dimensionless.squeezing_degree",
    "dimensionless.x0_sq",
    "dimensionless.input_bandwidth",
    "dimensionless.profile",
    "dimensionless.alpha_pulse",
    "dimensionless.epr_residual",
    "spectrum.x_max",
    "spectrum.points",
    "transient.tau_gamma_max",
    "transient.points",
    "grid.nz",
    "grid.ntau",
    "grid.tau_gamma",
    "grid.refinements",
    "tolerance.quadrature",
    "tolerance.ratio",
    "tolerance.fresnel_min",
    "tolerance.fresnel_max",
    "tolerance.linearization",
    "output.path",
];

/// Parsed but untyped entries, keyed by dotted name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn has_block(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.entries.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn required(&self, key: &str) -> Result<f64, CliError> {
        self.f64(key)?.ok_or_else(|| CliError::Config(format!("missing `{key}`")))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| CliError::Config(format!("`{key}`: expected a count, got `{v}`"))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.entries.get(key).map(|v| parse_list(key, v)).transpose()
    }

    fn segments(&self, key: &str) -> Result<Vec<(f64, f64)>, CliError> {
        self.entries.get(key).map_or(Ok(Vec::new()), |v| parse_segments(key, v))
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("`{key}`: expected a finite number, got `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|item| parse_f64(key, item.trim())).collect()
}

/// `duration:power, duration:power, ...`
fn parse_segments(key: &str, v: &str) -> Result<Vec<(f64, f64)>, CliError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|item| {
            let (d, p) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("`{key}`: expected `duration:power`, got `{item}`")))?;
            Ok((parse_f64(key, d.trim())?, parse_f64(key, p.trim())?))
        })
        .collect()
}

/// Optional SI description of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SiBlock {
    pub medium: MediumParams,
    pub drive: DriveParams,
    pub physics: Option<AtomicPhysics>,
}

impl SiBlock {
    /// Γ = Γ0 + Γs.
    pub fn gamma(&self) -> f64 {
        total_dephasing(&self.medium, &self.drive, true)
    }
}

/// Grid-oracle settings; times in units of 1/Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBlock {
    pub nz: usize,
    pub ntau: usize,
    pub tau_gamma: f64,
    pub refinements: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub quadrature: f64,
    pub feasibility: FeasibilityThresholds,
    pub linearization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub si: Option<SiBlock>,
    /// Optical depth, stated or derived from the SI block.
    pub alpha: Option<f64>,
    pub alpha_grid: Vec<f64>,
    /// Lorentzian widths `b = Γq/Γ` for the efficiency sweep.
    pub bandwidths: Vec<f64>,
    pub squeezing_degree: f64,
    /// Input model for spectrum, transient and simulate.
    pub model: SqueezingModel,
    /// Drive envelope as `(Γ·duration, relative power)` segments.
    pub profile: Vec<(f64, f64)>,
    pub alpha_pulse: Option<f64>,
    pub epr_residual: Option<f64>,
    pub x_max: f64,
    pub spectrum_points: usize,
    pub tau_gamma_max: f64,
    pub transient_points: usize,
    pub grid: GridBlock,
    pub tolerance: Tolerances,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let si = si_block(raw)?;
        let gamma = si.as_ref().map(SiBlock::gamma);

        let alpha = reconcile(
            "dimensionless.alpha",
            raw.f64("dimensionless.alpha")?,
            si.as_ref().map(|s| optical_depth(&s.medium, &s.drive)).transpose()?,
        )?;
        let alpha_pulse = reconcile(
            "dimensionless.alpha_pulse",
            raw.f64("dimensionless.alpha_pulse")?,
            si.as_ref().map(|s| pulse_optical_depth(&s.medium, &s.drive)),
        )?;

        let alpha_grid = match raw.entries.get("dimensionless.alpha_grid") {
            Some(v) => parse_alpha_grid(v)?,
            None => default_alpha_grid(),
        };
        let bandwidths = raw.list("dimensionless.bandwidths")?.unwrap_or_else(|| vec![50.0, 10.0]);
        let squeezing_degree = raw.f64_or("dimensionless.squeezing_degree", 1.0)?;

        let model = match raw.f64("dimensionless.input_bandwidth")? {
            Some(b) => SqueezingModel::Lorentzian { bandwidth: b, degree: squeezing_degree },
            None => SqueezingModel::Flat { x0_sq: raw.f64_or("dimensionless.x0_sq", 0.0)? },
        };
        model.validate().map_err(|e| CliError::Config(format!("dimensionless input model: {e}")))?;

        let profile = if raw.has("dimensionless.profile") {
            raw.segments("dimensionless.profile")?
        } else {
            match (&si, gamma) {
                (Some(s), Some(g)) => s.drive.profile.iter().map(|&(d, p)| (d * g, p)).collect(),
                _ => Vec::new(),
            }
        };

        let grid = GridBlock {
            nz: raw.usize_or("grid.nz", 200)?,
            ntau: raw.usize_or("grid.ntau", 200)?,
            tau_gamma: raw.f64_or("grid.tau_gamma", 2.0)?,
            refinements: raw.usize_or("grid.refinements", 0)?,
        };
        let tolerance = Tolerances {
            quadrature: positive("tolerance.quadrature", raw.f64_or("tolerance.quadrature", DEFAULT_TOLERANCE)?)?,
            feasibility: FeasibilityThresholds {
                ratio: positive("tolerance.ratio", raw.f64_or("tolerance.ratio", 10.0)?)?,
                fresnel_min: raw.f64_or("tolerance.fresnel_min", 0.3)?,
                fresnel_max: raw.f64_or("tolerance.fresnel_max", 3.0)?,
            },
            linearization: raw.f64_or("tolerance.linearization", DEFAULT_LINEARIZATION_LIMIT)?,
        };

        Ok(Self {
            si,
            alpha,
            alpha_grid,
            bandwidths,
            squeezing_degree,
            model,
            profile,
            alpha_pulse,
            epr_residual: raw.f64("dimensionless.epr_residual")?,
            x_max: positive("spectrum.x_max", raw.f64_or("spectrum.x_max", 20.0)?)?,
            spectrum_points: raw.usize_or("spectrum.points", 201)?,
            tau_gamma_max: raw.f64_or("transient.tau_gamma_max", 10.0)?,
            transient_points: raw.usize_or("transient.points", 101)?,
            grid,
            tolerance,
            output: raw.entries.get("output.path").map(PathBuf::from),
        })
    }

    pub fn require_alpha(&self) -> Result<f64, CliError> {
        self.alpha.ok_or_else(|| {
            CliError::Config("missing `dimensionless.alpha` (or an SI medium/drive block to derive it)".into())
        })
    }
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be positive, got {v}")))
    }
}

/// Either a comma list or `log:lo:hi:n`.
fn parse_alpha_grid(v: &str) -> Result<Vec<f64>, CliError> {
    const KEY: &str = "dimensionless.alpha_grid";
    let grid = if let Some(spec) = v.strip_prefix("log:") {
        let parts: Vec<&str> = spec.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(CliError::Config(format!("`{KEY}`: expected `log:lo:hi:n`, got `{v}`")));
        };
        let (lo, hi) = (parse_f64(KEY, lo)?, parse_f64(KEY, hi)?);
        let n: usize = n.parse().map_err(|_| CliError::Config(format!("`{KEY}`: bad point count `{n}`")))?;
        if !(lo > 0.0 && hi >= lo) {
            return Err(CliError::Config(format!("`{KEY}`: log grid needs 0 < lo <= hi")));
        }
        log_grid(lo, hi, n)
    } else {
        parse_list(KEY, v)?
    };
    if grid.iter().any(|&a| a < 0.0) || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(CliError::Config(format!("`{KEY}`: values must be >= 0 and ascending")));
    }
    Ok(grid)
}

fn reconcile(key: &str, stated: Option<f64>, derived: Option<f64>) -> Result<Option<f64>, CliError> {
    match (stated, derived) {
        (Some(s), Some(d)) => {
            let scale = s.abs().max(d.abs()).max(f64::MIN_POSITIVE);
            if (s - d).abs() > CONSISTENCY_TOLERANCE * scale {
                Err(CliError::Config(format!("`{key}` = {s} disagrees with the SI-derived value {d}")))
            } else {
                Ok(Some(s))
            }
        }
        (s, d) => Ok(s.or(d)),
    }
}

fn si_block(raw: &RawConfig) -> Result<Option<SiBlock>, CliError> {
    if !raw.has_block("medium.") && !raw.has_block("drive.") && !raw.has_block("physics.") {
        return Ok(None);
    }
    let medium = MediumParams {
        density: raw.required("medium.density")?,
        length: raw.required("medium.length_m")?,
        area: raw.required("medium.area_m2")?,
        dark_decoherence: raw.required("medium.dark_decoherence")?,
        wavelength: raw.required("medium.wavelength_m")?,
    };
    medium.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let drive = DriveParams {
        coupling_density: raw.required("drive.coupling_density")?,
        power_broadening: raw.required("drive.power_broadening")?,
        pulse_duration: raw.required("drive.pulse_duration_s")?,
        profile: raw.segments("drive.profile")?,
    };
    drive.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let physics = if raw.has_block("physics.") {
        let p = AtomicPhysics {
            angular_frequency: raw
                .f64("physics.angular_frequency")?
                .unwrap_or(2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / medium.wavelength),
            one_photon_detuning: raw.required("physics.one_photon_detuning")?,
            upper_width: raw.required("physics.upper_width")?,
            dipole_sum: raw.required("physics.dipole_sum")?,
            saturation: raw.required("physics.saturation")?,
            field_bandwidth: raw.required("physics.field_bandwidth")?,
            wavevector_mismatch: raw.f64_or("physics.wavevector_mismatch", 0.0)?,
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Some(p)
    } else {
        None
    };
    Ok(Some(SiBlock { medium, drive, physics }))
}

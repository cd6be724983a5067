//! Subcommand bodies. Each returns the rendered output and an exit status so
//! it can be exercised without spawning a process.

use raman_memory::dynamics::{
    refinement_study, simulate_area, transient_trace, transient_variance, GridSpec, PulseArea,
};
use raman_memory::mapping::{
    atomic_spectral_density, efficiency_curve, transmitted_spectrum, variance_closed, variance_spectral, NoiseReport,
    SqueezingModel,
};
use raman_memory::model::check_feasibility;
use raman_memory::teleport::{commutator_defect, coupling_r_with_limit, readout_noise_budget};

use crate::config::RunConfig;
use crate::format::{csv_row, g12};
use crate::{CliError, Outcome};

pub fn efficiency(cfg: &RunConfig, tol: f64) -> Result<Outcome, CliError> {
    let flat = efficiency_curve(&cfg.alpha_grid, &SqueezingModel::Flat { x0_sq: 0.0 }, 1.0, tol)?;
    let mut columns = Vec::with_capacity(cfg.bandwidths.len());
    for &b in &cfg.bandwidths {
        let model = SqueezingModel::Lorentzian { bandwidth: b, degree: cfg.squeezing_degree };
        model.validate().map_err(|e| CliError::Config(format!("dimensionless.bandwidths: {e}")))?;
        columns.push(efficiency_curve(&cfg.alpha_grid, &model, 1.0, tol)?);
    }
    let mut header = vec!["alpha".to_string(), "eta_flat".to_string()];
    header.extend(cfg.bandwidths.iter().map(|&b| format!("eta_b{}", g12(b))));
    let mut out = csv_row(&header);
    for (i, &(alpha, eta)) in flat.iter().enumerate() {
        let mut row = vec![g12(alpha), g12(eta)];
        row.extend(columns.iter().map(|c| g12(c[i].1)));
        out.push_str(&csv_row(&row));
    }
    Ok(Outcome::ok(out))
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = cfg.require_alpha()?;
    let n = cfg.spectrum_points;
    if n < 2 {
        return Err(CliError::Config(format!("`spectrum.points` must be >= 2, got {n}")));
    }
    let mut out = csv_row(&["x".into(), "transmitted".into(), "atomic_density".into()]);
    for i in 0..n {
        let x = cfg.x_max * i as f64 / (n - 1) as f64;
        let s0 = cfg.model.spectral_density(x, 1.0);
        out.push_str(&csv_row(&[
            g12(x),
            g12(transmitted_spectrum(alpha, x, s0)),
            g12(atomic_spectral_density(alpha, x, s0)),
        ]));
    }
    Ok(Outcome::ok(out))
}

fn pulse_area(cfg: &RunConfig, alpha: f64) -> Result<PulseArea, CliError> {
    if cfg.profile.is_empty() {
        Ok(PulseArea::constant(alpha))
    } else {
        PulseArea::from_profile(alpha, &cfg.profile).map_err(|e| CliError::Config(format!("profile: {e}")))
    }
}

fn trace_csv(rows: impl Iterator<Item = (f64, NoiseReport)>) -> String {
    let mut out = csv_row(&["tau_gamma".into(), "variance_norm".into(), "eta".into()]);
    for (t, r) in rows {
        out.push_str(&csv_row(&[g12(t), g12(r.variance_norm), r.eta.map(g12).unwrap_or_default()]));
    }
    out
}

pub fn transient(cfg: &RunConfig, tol: f64) -> Result<Outcome, CliError> {
    let alpha = cfg.require_alpha()?;
    let n = cfg.transient_points;
    if n < 2 || cfg.tau_gamma_max.is_nan() || cfg.tau_gamma_max <= 0.0 {
        return Err(CliError::Config("`transient.points` must be >= 2 and `transient.tau_gamma_max` > 0".into()));
    }
    let area = pulse_area(cfg, alpha)?;
    let times: Vec<f64> = (0..n).map(|i| cfg.tau_gamma_max * i as f64 / (n - 1) as f64).collect();
    let trace = transient_trace(&area, 1.0, 1.0, &cfg.model, &times, tol)?;
    Ok(Outcome::ok(trace_csv(times.into_iter().zip(trace))))
}

pub fn simulate(cfg: &RunConfig, tol: f64) -> Result<Outcome, CliError> {
    let alpha = cfg.require_alpha()?;
    let area = pulse_area(cfg, alpha)?;
    let g = cfg.grid;
    let spec = GridSpec::dimensionless(g.nz, g.ntau, g.tau_gamma);
    if g.refinements == 0 {
        let run = simulate_area(&area, 1.0, &spec, &cfg.model)?;
        let times = (0..run.trace.len()).map(|n| run.kernels.time(n));
        return Ok(Outcome::ok(trace_csv(times.zip(run.trace.iter().copied()))));
    }
    let study = refinement_study(&area, 1.0, &spec, g.refinements, &cfg.model, tol)?;
    let (ko, vo) = (study.kernel_orders(), study.variance_orders());
    let mut out = csv_row(&[
        "nz".into(),
        "ntau".into(),
        "kernel_error".into(),
        "variance_error".into(),
        "kernel_order".into(),
        "variance_order".into(),
    ]);
    for (i, level) in study.levels.iter().enumerate() {
        let order = |o: &[f64]| if i == 0 { String::new() } else { g12(o[i - 1]) };
        out.push_str(&csv_row(&[
            level.nz.to_string(),
            level.ntau.to_string(),
            g12(level.kernel_error),
            g12(level.variance_error),
            order(&ko),
            order(&vo),
        ]));
    }
    Ok(Outcome::ok(out))
}

pub fn teleport(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alpha_pulse = cfg.alpha_pulse.ok_or_else(|| {
        CliError::Config("missing `dimensionless.alpha_pulse` (or an SI medium/drive block to derive it)".into())
    })?;
    let bs = coupling_r_with_limit(alpha_pulse, cfg.tolerance.linearization)
        .map_err(|e| CliError::Config(format!("dimensionless.alpha_pulse: {e}")))?;
    let mut out = csv_row(&["quantity".into(), "value".into()]);
    let mut line = |k: &str, v: String| out.push_str(&csv_row(&[k.into(), v]));
    line("alpha_pulse", g12(alpha_pulse));
    line("r", g12(bs.r));
    line("linearization_valid", bs.valid.to_string());
    line("epr_requirement", g12(bs.epr_requirement));
    line("commutator_defect", g12(bs.commutator_defect));
    let mut status = 0;
    if let Some(residual) = cfg.epr_residual {
        let budget = readout_noise_budget(bs.r, residual)
            .map_err(|e| CliError::Config(format!("dimensionless.epr_residual: {e}")))?;
        line("epr_residual", g12(budget.epr_residual));
        line("residual_over_r", g12(budget.ratio));
        line("classical_baseline", g12(budget.classical_baseline));
        line("epr_condition", if budget.pass { "pass" } else { "fail" }.into());
        if !budget.pass {
            status = 1;
        }
    }
    Ok(Outcome { output: out, status })
}

pub fn feasibility(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let si =
        cfg.si.as_ref().ok_or_else(|| CliError::Config("feasibility needs the medium.* and drive.* blocks".into()))?;
    let phys = si.physics.as_ref().ok_or_else(|| CliError::Config("feasibility needs the physics.* block".into()))?;
    let report = check_feasibility(&si.medium, &si.drive, phys, &cfg.tolerance.feasibility);
    let mut out = format!("{:<34} {:>20} {:>20} {:>9}  {}\n", "condition", "left", "right", "ratio", "result");
    for c in &report.conditions {
        let ratio = if c.required_ratio.is_nan() {
            format!("[{}, {}]", g12(cfg.tolerance.feasibility.fresnel_min), g12(cfg.tolerance.feasibility.fresnel_max))
        } else {
            g12(c.required_ratio)
        };
        out.push_str(&format!(
            "{:<34} {:>20} {:>20} {:>9}  {}\n",
            c.name,
            g12(c.left),
            g12(c.right),
            ratio,
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
    out.push_str(&format!("overall: {}\n", if report.pass { "pass" } else { "FAIL" }));
    Ok(Outcome { output: out, status: if report.pass { 0 } else { 1 } })
}

/// One line of the verification summary.
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance }
    }

    fn pass(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// Cross-engine identities: closed form, spectral integral, Bessel-kernel
/// transient and grid oracle. Values are worst-case deviations.
pub fn verify(tol: f64) -> Result<Outcome, CliError> {
    let vacuum_alphas = [0.0, 0.5, 5.0, 50.0];
    let mut checks = Vec::new();

    let worst = |f: &dyn Fn(f64) -> Result<f64, CliError>, alphas: &[f64]| -> Result<f64, CliError> {
        alphas.iter().try_fold(0.0_f64, |m, &a| Ok(m.max(f(a)?)))
    };

    checks.push(Check::new(
        "vacuum_closed",
        worst(&|a| Ok((variance_closed(a, 1.0)?.variance_norm - 1.0).abs()), &vacuum_alphas)?,
        1e-12,
    ));
    checks.push(Check::new(
        "vacuum_spectral",
        worst(
            &|a| Ok((variance_spectral(a, &SqueezingModel::VACUUM, 1.0, tol)?.variance_norm - 1.0).abs()),
            &vacuum_alphas,
        )?,
        1e-6,
    ));
    checks.push(Check::new(
        "vacuum_grid_200",
        worst(
            &|a| {
                let run = simulate_area(
                    &PulseArea::constant(a),
                    1.0,
                    &GridSpec::dimensionless(200, 200, 2.0),
                    &SqueezingModel::VACUUM,
                )?;
                Ok((run.report.variance_norm - 1.0).abs())
            },
            &vacuum_alphas,
        )?,
        5e-3,
    ));
    checks.push(Check::new(
        "spectral_vs_closed_rel",
        worst(
            &|a| {
                let closed = variance_closed(a, 0.0)?.variance_norm;
                let spectral = variance_spectral(a, &SqueezingModel::Flat { x0_sq: 0.0 }, 1.0, tol)?.variance_norm;
                Ok((spectral - closed).abs() / closed)
            },
            &[0.1, 1.0, 10.0, 60.0],
        )?,
        1e-6,
    ));
    checks.push(Check::new(
        "transient_vs_closed",
        worst(
            &|a| {
                let closed = variance_closed(a, 0.0)?.variance_norm;
                let r = transient_variance(
                    &PulseArea::constant(a),
                    1.0,
                    1.0,
                    &SqueezingModel::Flat { x0_sq: 0.0 },
                    10.0,
                    tol,
                )?;
                Ok((r.variance_norm - closed).abs())
            },
            &[1.0, 10.0],
        )?,
        1e-3,
    ));

    let study = refinement_study(
        &PulseArea::constant(1.0),
        1.0,
        &GridSpec::dimensionless(50, 50, 1.0),
        3,
        &SqueezingModel::Flat { x0_sq: 0.0 },
        tol,
    )?;
    let finest = study.levels.last().map_or(f64::NAN, |l| l.kernel_error);
    let order_dev = study.kernel_orders().iter().fold(0.0_f64, |m, &o| m.max((o - 1.0).abs()));
    let monotone = study.levels.windows(2).all(|w| w[1].kernel_error < w[0].kernel_error);
    checks.push(Check::new("grid_kernel_finest", finest, 1e-3));
    checks.push(Check::new("grid_kernel_order_dev", if monotone { order_dev } else { f64::INFINITY }, 0.2));

    let defect = [0.0, 0.1, 0.25, 0.5].iter().fold(0.0_f64, |m, &r| m.max((commutator_defect(r) - r * r).abs()));
    checks.push(Check::new("teleport_defect", defect, 1e-12));

    let mut out = csv_row(&["check".into(), "value".into(), "tolerance".into(), "result".into()]);
    for c in &checks {
        out.push_str(&csv_row(&[
            c.name.clone(),
            g12(c.value),
            g12(c.tolerance),
            if c.pass() { "pass" } else { "fail" }.into(),
        ]));
    }
    let all = checks.iter().all(Check::pass);
    out.push_str(&format!("overall,,,{}\n", if all { "pass" } else { "fail" }));
    Ok(Outcome { output: out, status: if all { 0 } else { 1 } })
}

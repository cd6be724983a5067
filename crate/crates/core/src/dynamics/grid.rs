//! Discretized Maxwell–Bloch oracle.
//!
//! In dimensionless variables (`ζ = z/L`, `t = Γτ`) and with the phase of the
//! strong field absorbed into the quantum field, the X quadratures obey
//!
//! ```text
//! ∂t Q = -Q - √r(t) P + F,   ⟨F F⟩ = 2 δ(ζ-ζ') δ(t-t')
//! ∂ζ P =  √r(t) Q,           r(t) = dA/dt
//! ```
//!
//! with `P(0, t)` the input quadrature and `Q(ζ, 0)` the collective vacuum.
//!
//! Each time step sends one input mode (the field averaged over the step)
//! through the cells in order of increasing `z`. Against cell `j` the light
//! mode and the cell mode undergo a beam-splitter rotation by
//! `θ = √(ΔA_step dζ)`, which reduces to the forward-Euler update of the
//! coupling terms at first order. All cells then relax with the exact factor
//! `e^{-dt}` and receive Langevin noise of variance `1 - e^{-2dt}`. The scheme
//! is first order in `dt`. Because every operation is orthogonal or exactly
//! noise-balanced, a vacuum input leaves the collective vacuum untouched at any
//! resolution.
//!
//! Nothing is sampled. Every quantity is a linear combination of independent
//! Gaussian sources, so second moments are exact for the discretization:
//!
//! * input modes: tracked through explicit influence coefficients, which also
//!   give the discrete Green-function tables and allow colored input;
//! * initial coherence and Langevin increments: tracked through the covariance
//!   of the cell modes (plus the light mode during the sweep).

use super::kernels::collective_light_kernel;
use super::pulse::{PulseArea, ScaledArea};
use super::transient::transient_variance;
use crate::error::{domain, Error, Result};
use crate::mapping::{NoiseReport, SqueezingModel};
use crate::model::{total_dephasing, DriveParams, MediumParams};

/// Largest `g dτ dz` (the squared beam-splitter angle) accepted per cell and step.
pub const MAX_COUPLING_PER_CELL: f64 = 0.1;
/// Largest `Γ dτ` accepted per step.
pub const MAX_DECAY_PER_STEP: f64 = 0.5;
/// Default bound on `Nz` and `Nτ`.
pub const DESK_SCALE_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nz: usize,
    pub ntau: usize,
    /// Sample length [m].
    pub length: f64,
    /// Time horizon [s].
    pub tau_max: f64,
    /// Upper bound on `nz` and `ntau`.
    pub size_limit: usize,
}

impl GridSpec {
    pub fn new(nz: usize, ntau: usize, length: f64, tau_max: f64) -> Self {
        Self { nz, ntau, length, tau_max, size_limit: DESK_SCALE_LIMIT }
    }

    /// Grid for dimensionless runs (`L = 1`, `Γ = 1`): horizon is `Γτ_max`.
    pub fn dimensionless(nz: usize, ntau: usize, gamma_tau_max: f64) -> Self {
        Self::new(nz, ntau, 1.0, gamma_tau_max)
    }

    /// Both resolutions scaled by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { nz: self.nz * factor, ntau: self.ntau * factor, ..*self }
    }

    /// Checks sizes and the stability/accuracy bound for the given drive.
    pub fn check(&self, area: &PulseArea, gamma: f64) -> Result<()> {
        if self.nz < 2 || self.ntau < 2 {
            return Err(Error::Config(format!("grid needs nz, ntau >= 2, got {} x {}", self.nz, self.ntau)));
        }
        if self.nz > self.size_limit || self.ntau > self.size_limit {
            return Err(Error::Config(format!(
                "grid {} x {} exceeds the size limit {}",
                self.nz, self.ntau, self.size_limit
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) || !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return Err(Error::Config("grid length and horizon must be positive".into()));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("dephasing rate must be positive, got {gamma}")));
        }
        let dt = gamma * self.tau_max / self.ntau as f64;
        if dt > MAX_DECAY_PER_STEP {
            return Err(Error::Config(format!("Γ dτ = {dt:.4} exceeds {MAX_DECAY_PER_STEP}; increase ntau")));
        }
        let scaled = ScaledArea { area, length: self.length, gamma };
        let worst = (0..self.ntau).map(|n| step_area(&scaled, n, dt)).fold(0.0, f64::max) / self.nz as f64;
        if worst > MAX_COUPLING_PER_CELL {
            return Err(Error::Config(format!(
                "g dτ dz = {worst:.4} exceeds {MAX_COUPLING_PER_CELL}; refine the grid"
            )));
        }
        Ok(())
    }
}

fn step_area(scaled: &ScaledArea<'_>, n: usize, dt: f64) -> f64 {
    (scaled.value((n + 1) as f64 * dt) - scaled.value(n as f64 * dt)).max(0.0)
}

/// Discrete Green-function tables of one grid run. Times are `t_n = n dt` in
/// units of `1/Γ`; positions are cell centres `(j + 1/2) dz` in units of `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub nz: usize,
    pub ntau: usize,
    pub dt: f64,
    pub dz: f64,
    /// `(ntau+1) x ntau`: response of the collective spin at `t_n` to the input
    /// field in step `m`, per unit input amplitude density. Converges to
    /// `√(dA/dt) · collective_light_kernel / L`.
    light: Vec<f64>,
    /// `(ntau+1) x nz`: weight of the initial coherence of cell `j` in the
    /// collective spin at `t_n`. Converges to `collective_initial_kernel`.
    initial: Vec<f64>,
    /// `nz x nz`: weight of the initial coherence of cell `k` in cell `j` at
    /// the final time (the local `K_QQ`). Identity before the first step.
    local_initial: Vec<f64>,
    /// `ntau x ntau`: coefficient of input mode `m'` in the transmitted mode `m`.
    field: Vec<f64>,
}

impl KernelTable {
    pub fn light(&self, n: usize, m: usize) -> f64 {
        self.light[n * self.ntau + m]
    }

    pub fn initial(&self, n: usize, j: usize) -> f64 {
        self.initial[n * self.nz + j]
    }

    pub fn local_initial(&self, j: usize, k: usize) -> f64 {
        self.local_initial[j * self.nz + k]
    }

    pub fn field(&self, m: usize, m_in: usize) -> f64 {
        self.field[m * self.ntau + m_in]
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn position(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dz
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRun {
    pub kernels: KernelTable,
    /// Variance at the final time.
    pub report: NoiseReport,
    /// Variance at every `t_n`, `n = 0..=ntau`.
    pub trace: Vec<NoiseReport>,
}

/// Runs the oracle for an SI medium and drive (Γ = Γ0 + Γs).
pub fn simulate_grid(
    medium: &MediumParams,
    drive: &DriveParams,
    grid: &GridSpec,
    model: &SqueezingModel,
) -> Result<GridRun> {
    medium.validate()?;
    drive.validate()?;
    if (grid.length - medium.length).abs() > 1e-12 * medium.length {
        return Err(Error::Config(format!("grid length {} differs from medium length {}", grid.length, medium.length)));
    }
    let area = PulseArea::from_drive(drive)?;
    simulate_area(&area, total_dephasing(medium, drive, true), grid, model)
}

/// Runs the oracle for an explicit pulse area and dephasing rate.
pub fn simulate_area(area: &PulseArea, gamma: f64, grid: &GridSpec, model: &SqueezingModel) -> Result<GridRun> {
    model.validate()?;
    grid.check(area, gamma)?;
    let (nz, ntau) = (grid.nz, grid.ntau);
    let dt = gamma * grid.tau_max / ntau as f64;
    let dz = 1.0 / nz as f64;
    let scaled = ScaledArea { area, length: grid.length, gamma };
    let decay = (-dt).exp();
    let refill = -(-2.0 * dt).exp_m1();
    let (sqrt_dz, sqrt_dt) = (dz.sqrt(), dt.sqrt());
    let input = InputCorrelation::new(model, gamma, dt);

    // Cell coefficients on input modes, row-major nz x ntau.
    let mut on_input = vec![0.0; nz * ntau];
    // Cell coefficients on initial cells, row-major nz x nz.
    let mut on_initial = identity(nz);
    // Covariance of (cells, light mode) from initial coherence and Langevin noise.
    let light_idx = nz;
    let dim = nz + 1;
    let mut cov = vec![0.0; dim * dim];
    for j in 0..nz {
        cov[j * dim + j] = 1.0;
    }

    let mut light = vec![0.0; (ntau + 1) * ntau];
    let mut initial = vec![0.0; (ntau + 1) * nz];
    let mut field = vec![0.0; ntau * ntau];
    let mut trace = Vec::with_capacity(ntau + 1);

    initial[..nz].iter_mut().for_each(|v| *v = 1.0);
    trace.push(collective_report(&on_input, &cov, nz, ntau, 0, sqrt_dz, &input));

    let mut light_on_input = vec![0.0; ntau];
    let mut light_on_initial = vec![0.0; nz];
    for n in 0..ntau {
        let theta = (step_area(&scaled, n, dt) * dz).sqrt();
        let (s, c) = theta.sin_cos();

        light_on_input.iter_mut().for_each(|v| *v = 0.0);
        light_on_input[n] = 1.0;
        light_on_initial.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..dim {
            cov[light_idx * dim + i] = 0.0;
            cov[i * dim + light_idx] = 0.0;
        }

        if theta > 0.0 {
            for j in 0..nz {
                rotate(&mut on_input[j * ntau..j * ntau + n + 1], &mut light_on_input[..=n], c, s);
                rotate(&mut on_initial[j * nz..(j + 1) * nz], &mut light_on_initial, c, s);
                rotate_covariance(&mut cov, dim, j, light_idx, c, s);
            }
        }
        field[n * ntau..n * ntau + n + 1].copy_from_slice(&light_on_input[..=n]);

        for v in on_input.iter_mut() {
            *v *= decay;
        }
        for v in on_initial.iter_mut() {
            *v *= decay;
        }
        for j in 0..nz {
            for k in 0..nz {
                cov[j * dim + k] *= decay * decay;
            }
            cov[j * dim + j] += refill;
        }

        let row = n + 1;
        for m in 0..=n {
            let k: f64 = (0..nz).map(|j| on_input[j * ntau + m]).sum::<f64>() * sqrt_dz;
            light[row * ntau + m] = -k / sqrt_dt;
        }
        for k in 0..nz {
            initial[row * nz + k] = (0..nz).map(|j| on_initial[j * nz + k]).sum();
        }

        let report = collective_report(&on_input, &cov, nz, ntau, row, sqrt_dz, &input);
        if !report.variance_norm.is_finite() || report.variance_norm > 1e6 {
            return Err(Error::Numerical(format!(
                "collective variance diverged at step {row} (value {})",
                report.variance_norm
            )));
        }
        trace.push(report);
    }

    let report = *trace.last().expect("trace holds the initial state");
    Ok(GridRun {
        kernels: KernelTable { nz, ntau, dt, dz, light, initial, local_initial: on_initial, field },
        report,
        trace,
    })
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// `(a, b) ← (c a - s b, s a + c b)` elementwise.
fn rotate(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (u, v) = (*x, *y);
        *x = c * u - s * v;
        *y = s * u + c * v;
    }
}

/// `Σ ← R Σ Rᵀ` for a rotation acting on indices `p` and `q`.
fn rotate_covariance(cov: &mut [f64], dim: usize, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..dim {
        let (u, v) = (cov[p * dim + i], cov[q * dim + i]);
        cov[p * dim + i] = c * u - s * v;
        cov[q * dim + i] = s * u + c * v;
    }
    for i in 0..dim {
        let (u, v) = (cov[i * dim + p], cov[i * dim + q]);
        cov[i * dim + p] = c * u - s * v;
        cov[i * dim + q] = s * u + c * v;
    }
}

/// Second moments of the normalized input modes.
struct InputCorrelation {
    diagonal: f64,
    /// Off-diagonal `R[m][m-k] = off_scale · decay^(k-1)`, `k >= 1`.
    off_scale: f64,
    decay: f64,
    reference: f64,
}

impl InputCorrelation {
    fn new(model: &SqueezingModel, gamma: f64, dt: f64) -> Self {
        match *model {
            SqueezingModel::Flat { x0_sq } => Self { diagonal: x0_sq, off_scale: 0.0, decay: 0.0, reference: x0_sq },
            SqueezingModel::Lorentzian { bandwidth, degree } => {
                // Cell averages of δ(u) - s (b/2) e^{-b|u|} over steps of length dt.
                let bdt = bandwidth / gamma * dt;
                let rho = (-bdt).exp();
                let one_minus_rho = -(-bdt).exp_m1();
                Self {
                    diagonal: 1.0 - degree * (bdt - one_minus_rho) / bdt,
                    off_scale: -degree * one_minus_rho * one_minus_rho / (2.0 * bdt),
                    decay: rho,
                    reference: 1.0 - degree,
                }
            }
        }
    }

    fn variance(&self, k: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut carry = 0.0;
        for &km in k {
            total += self.diagonal * km * km + 2.0 * self.off_scale * km * carry;
            carry = self.decay * carry + km;
        }
        total
    }
}

fn collective_report(
    on_input: &[f64],
    cov: &[f64],
    nz: usize,
    ntau: usize,
    steps_done: usize,
    sqrt_dz: f64,
    input: &InputCorrelation,
) -> NoiseReport {
    let dim = nz + 1;
    let atom: f64 = (0..nz).map(|j| cov[j * dim..j * dim + nz].iter().sum::<f64>()).sum::<f64>() * sqrt_dz * sqrt_dz;
    let k: Vec<f64> = (0..steps_done).map(|m| (0..nz).map(|j| on_input[j * ntau + m]).sum::<f64>() * sqrt_dz).collect();
    NoiseReport::from_parts(atom, input.variance(&k), input.reference)
}

/// Relative L2 distance between the discrete light table and the analytic
/// kernel `√(dA/dt) · collective_light_kernel / L`, sampled at `(t_n, t_m)` for all `n > m`.
pub fn light_kernel_error(run: &GridRun, area: &PulseArea, length: f64, gamma: f64) -> Result<f64> {
    let table = &run.kernels;
    let scaled = ScaledArea { area, length, gamma };
    let (mut diff, mut norm) = (0.0, 0.0);
    for n in 1..=table.ntau {
        for m in 0..n {
            let (tn, tm) = (table.time(n), table.time(m));
            let exact =
                scaled.rate(tm).sqrt() * collective_light_kernel(tn / gamma, tm / gamma, area, length, gamma)? / length;
            let d = table.light(n, m) - exact;
            diff += d * d;
            norm += exact * exact;
        }
    }
    if norm == 0.0 {
        return Err(domain("light kernel vanishes identically; nothing to compare"));
    }
    Ok((diff / norm).sqrt())
}

/// One level of a grid refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel {
    pub nz: usize,
    pub ntau: usize,
    /// Relative L2 error of the light kernel table.
    pub kernel_error: f64,
    /// `|grid variance - kernel variance|` at the final time.
    pub variance_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    pub levels: Vec<RefinementLevel>,
}

impl RefinementStudy {
    /// Observed orders `log2(e_k / e_{k+1})` of the kernel error between successive levels.
    pub fn kernel_orders(&self) -> Vec<f64> {
        orders(self.levels.iter().map(|l| l.kernel_error))
    }

    pub fn variance_orders(&self) -> Vec<f64> {
        orders(self.levels.iter().map(|l| l.variance_error))
    }
}

fn orders(errors: impl Iterator<Item = f64>) -> Vec<f64> {
    let e: Vec<f64> = errors.collect();
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Runs `refinements + 1` grids, halving `dz` and `dτ` each time, and compares
/// them against the Bessel kernels and the kernel-route variance.
pub fn refinement_study(
    area: &PulseArea,
    gamma: f64,
    base: &GridSpec,
    refinements: usize,
    model: &SqueezingModel,
    tol: f64,
) -> Result<RefinementStudy> {
    let reference = transient_variance(area, base.length, gamma, model, base.tau_max, tol)?.variance_norm;
    let mut levels = Vec::with_capacity(refinements + 1);
    for k in 0..=refinements {
        let grid = base.refined(1 << k);
        let run = simulate_area(area, gamma, &grid, model)?;
        levels.push(RefinementLevel {
            nz: grid.nz,
            ntau: grid.ntau,
            kernel_error: light_kernel_error(&run, area, grid.length, gamma)?,
            variance_error: (run.report.variance_norm - reference).abs(),
        });
    }
    Ok(RefinementStudy { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn no_coupling_passes_light_and_decays_atoms() {
        let grid = GridSpec::dimensionless(8, 20, 2.0);
        let run = simulate_area(&PulseArea::off(), 1.0, &grid, &SqueezingModel::Flat { x0_sq: 0.0 }).unwrap();
        let t = &run.kernels;
        for m in 0..t.ntau {
            for mi in 0..t.ntau {
                assert_eq!(t.field(m, mi), if m == mi { 1.0 } else { 0.0 });
            }
        }
        for n in 0..=t.ntau {
            for j in 0..t.nz {
                assert_abs_diff_eq!(t.initial(n, j), (-t.time(n)).exp(), epsilon = 1e-14);
            }
        }
        assert!(run.trace.iter().all(|r| (r.variance_norm - 1.0).abs() < 1e-13));
    }

    #[test]
    fn local_green_function_starts_as_identity() {
        let grid = GridSpec::dimensionless(5, 2, 0.5);
        let run = simulate_area(&PulseArea::constant(0.0), 1.0, &grid, &SqueezingModel::VACUUM).unwrap();
        for j in 0..5 {
            for k in 0..5 {
                let expect = if j == k { (-0.5f64).exp() } else { 0.0 };
                assert_abs_diff_eq!(run.kernels.local_initial(j, k), expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn stability_bound_is_enforced() {
        let area = PulseArea::constant(50.0);
        assert!(matches!(
            simulate_area(&area, 1.0, &GridSpec::dimensionless(10, 10, 10.0), &SqueezingModel::VACUUM),
            Err(Error::Config(_))
        ));
        // Γ dτ too large.
        assert!(GridSpec::dimensionless(10, 10, 6.0).check(&PulseArea::off(), 1.0).is_err());
        assert!(GridSpec::dimensionless(1, 10, 1.0).check(&PulseArea::off(), 1.0).is_err());
        assert!(GridSpec::dimensionless(500, 10, 1.0).check(&PulseArea::off(), 1.0).is_err());
    }

    #[test]
    fn vacuum_is_exact_at_any_resolution() {
        let area = PulseArea::constant(5.0);
        let run = simulate_area(&area, 1.0, &GridSpec::dimensionless(12, 30, 6.0), &SqueezingModel::VACUUM).unwrap();
        for r in &run.trace {
            assert_abs_diff_eq!(r.variance_norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn causality_of_transmitted_field() {
        let area = PulseArea::constant(3.0);
        let run = simulate_area(&area, 1.0, &GridSpec::dimensionless(10, 25, 3.0), &SqueezingModel::VACUUM).unwrap();
        for m in 0..25 {
            for later in m + 1..25 {
                assert_eq!(run.kernels.field(m, later), 0.0);
            }
            for n in 0..=m {
                assert_eq!(run.kernels.light(n, m), 0.0);
            }
        }
    }

    #[test]
    fn si_wrapper_matches_dimensionless_run() {
        let medium =
            MediumParams { density: 1e16, length: 0.01, area: 1e-8, dark_decoherence: 2.0, wavelength: 852e-9 };
        // Γ = 10, α = gL/Γ = 3.
        let drive = DriveParams::constant(3.0 * 10.0 / 0.01, 8.0, 0.5);
        let grid = GridSpec::new(16, 40, 0.01, 0.4);
        let model = SqueezingModel::Flat { x0_sq: 0.0 };
        let si = simulate_grid(&medium, &drive, &grid, &model).unwrap();
        let dimless =
            simulate_area(&PulseArea::constant(3.0), 1.0, &GridSpec::dimensionless(16, 40, 4.0), &model).unwrap();
        assert_abs_diff_eq!(si.report.variance_norm, dimless.report.variance_norm, epsilon = 1e-12);
        let mismatched = GridSpec::new(16, 40, 0.02, 0.4);
        assert!(simulate_grid(&medium, &drive, &mismatched, &model).is_err());
    }
}

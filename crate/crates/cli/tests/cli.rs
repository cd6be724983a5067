use std::path::PathBuf;
use std::process::{Command, Output};

use raman_memory::mapping::variance_closed;
use raman_memory_cli::{execute, Command as Sub, RunConfig};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn ramem(args: &[&str], config: Option<&str>) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ramem"));
    cmd.args(args);
    if let Some(text) = config {
        let path = dir.path().join("run.conf");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn run(sub: Sub, text: &str) -> String {
    let cfg = RunConfig::from_text(text).unwrap();
    let out = execute(sub, &cfg, None).unwrap();
    assert_eq!(out.status, 0);
    out.output
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect()).collect()
}

#[test]
fn efficiency_default_grid() {
    let csv = run(Sub::Efficiency, "");
    assert!(csv.starts_with("alpha,eta_flat,eta_b50,eta_b10\n"));
    let data = rows(&csv);
    assert_eq!(data.len(), 200);
    let near = data.iter().min_by(|a, b| (a[0] - 20.0).abs().total_cmp(&(b[0] - 20.0).abs())).unwrap();
    assert!((near[1] - 0.823).abs() < 5e-3, "{near:?}");
    let exact = run(Sub::Efficiency, "dimensionless.alpha_grid = 20\ndimensionless.bandwidths =");
    assert_eq!(exact, "alpha,eta_flat\n20,0.822713465932\n");
}

#[test]
fn efficiency_at_zero_depth() {
    assert_eq!(run(Sub::Efficiency, "dimensionless.alpha_grid = 0"), "alpha,eta_flat,eta_b50,eta_b10\n0,0,0,0\n");
}

#[test]
fn spectrum_rows() {
    let csv = run(Sub::Spectrum, "dimensionless.alpha = 2\nspectrum.x_max = 4\nspectrum.points = 5");
    assert!(csv.starts_with("x,transmitted,atomic_density\n"));
    let data = rows(&csv);
    // S0 = 0 at line centre: e^{-α} S0 + (1 - e^{-α}).
    assert!((data[0][1] - (1.0 - (-2.0f64).exp())).abs() < 1e-11);
    let vac = run(Sub::Spectrum, "dimensionless.alpha = 2\ndimensionless.x0_sq = 1\nspectrum.points = 11");
    assert!(rows(&vac).iter().all(|r| r[1] == 1.0));
}

#[test]
fn spectrum_density_integrates_to_closed_form() {
    let x_max = 200.0;
    let csv = run(Sub::Spectrum, "dimensionless.alpha = 3\nspectrum.x_max = 200\nspectrum.points = 40001");
    let data = rows(&csv);
    let dx = data[1][0] - data[0][0];
    let trapezoid: f64 = data.windows(2).map(|w| 0.5 * (w[0][2] + w[1][2]) * dx).sum();
    // The density falls as 1/(π x²) past the line; add the tail analytically.
    let total = 2.0 * (trapezoid + 1.0 / (std::f64::consts::PI * x_max));
    assert!((total - variance_closed(3.0, 0.0).unwrap().variance_norm).abs() < 1e-5, "{total}");
}

#[test]
fn transient_rows() {
    let csv = run(Sub::Transient, "dimensionless.alpha = 10\ntransient.tau_gamma_max = 10\ntransient.points = 11");
    assert!(csv.starts_with("tau_gamma,variance_norm,eta\n"));
    let data = rows(&csv);
    assert_eq!(data[0][1], 1.0);
    let last = data.last().unwrap();
    assert!((last[1] - variance_closed(10.0, 0.0).unwrap().variance_norm).abs() < 1e-3);
    let off = run(Sub::Transient, "dimensionless.alpha = 0\ndimensionless.x0_sq = 0.2\ntransient.points = 6");
    assert!(rows(&off).iter().all(|r| (r[1] - 1.0).abs() < 1e-12));
}

#[test]
fn simulate_trace_and_refinement() {
    let off = run(Sub::Simulate, "dimensionless.alpha = 0\ngrid.nz = 10\ngrid.ntau = 20");
    assert!(rows(&off).iter().all(|r| (r[1] - 1.0).abs() < 1e-12));
    let vac = run(Sub::Simulate, "dimensionless.alpha = 5\ndimensionless.x0_sq = 1\ngrid.nz = 100\ngrid.ntau = 100");
    assert!(rows(&vac).iter().all(|r| (r[1] - 1.0).abs() < 5e-3));
    let text = std::fs::read_to_string(configs().join("convergence.conf")).unwrap();
    let table = run(Sub::Simulate, &text);
    assert!(table.starts_with("nz,ntau,kernel_error,variance_error,kernel_order,variance_order\n"));
    for r in rows(&table).iter().skip(1) {
        assert!((0.8..=1.2).contains(&r[4]), "{r:?}");
    }
}

#[test]
fn teleport_budget_exit_codes() {
    let pass = ramem(&["teleport"], Some("dimensionless.alpha_pulse = 0.04\ndimensionless.epr_residual = 0.1"));
    assert_eq!(pass.status.code(), Some(0));
    assert!(stdout(&pass).contains("r,0.2\n"));
    let fail = ramem(&["teleport"], Some("dimensionless.alpha_pulse = 0.04\ndimensionless.epr_residual = 0.2"));
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(ramem(&["teleport"], Some("")).status.code(), Some(2));
}

#[test]
fn feasibility_exit_codes() {
    let path = configs().join("cesium_feasibility.conf");
    let text = std::fs::read_to_string(&path).unwrap();
    let ok = ramem(&["feasibility", "--config", path.to_str().unwrap()], None);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).ends_with("overall: pass\n"));
    let short = text.replace("drive.pulse_duration_s = 0.01", "drive.pulse_duration_s = 1e-9");
    assert_ne!(short, text);
    assert_eq!(ramem(&["feasibility"], Some(&short)).status.code(), Some(1));
    assert_eq!(ramem(&["feasibility"], Some("dimensionless.alpha = 3")).status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_2_and_name_the_field() {
    let o = ramem(&["efficiency"], Some("dimensionless.squeezing_degree = lots"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimensionless.squeezing_degree"));
    assert_eq!(ramem(&["efficiency", "--tol", "-1"], Some("")).status.code(), Some(2));
    assert_eq!(ramem(&["spectrum", "--config", "/nonexistent/run.conf"], None).status.code(), Some(2));
}

#[test]
fn si_and_dimensionless_disagreement_aborts() {
    let path = configs().join("cesium_feasibility.conf");
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(ramem(&["spectrum"], Some(&format!("{text}dimensionless.alpha = 20\n"))).status.code(), Some(0));
    assert_eq!(ramem(&["spectrum"], Some(&format!("{text}dimensionless.alpha = 21\n"))).status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3() {
    let o = ramem(&["transient", "--tol", "1e-14"], Some("dimensionless.alpha = 1e8\ntransient.points = 3"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_is_deterministic_lf_csv() {
    let cfg = "dimensionless.alpha_grid = log:0.1:100:25";
    let a = ramem(&["efficiency"], Some(cfg));
    let b = ramem(&["efficiency"], Some(cfg));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains(&b'\r'));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eta.csv");
    let o = ramem(&["efficiency", "--out", out.to_str().unwrap()], Some(cfg));
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(out).unwrap(), a.stdout);
}

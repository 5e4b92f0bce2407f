use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn kinrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinrel")).args(args).output().expect("binary runs")
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    kinrel(&args)
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn profile_writes_orbit_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("profile", &configs().join("profile_n2.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("orbit.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,tau,s_1,s_2,F,H_drift");
    let s = summary(dir.path());
    assert_eq!(s["status"], "ok");
    assert_eq!(s["orbit_status"], "converged");
    assert!(s["H_drift_max"].as_f64().unwrap() <= s["H_drift_bound"].as_f64().unwrap());
    assert!(s["lax_margins"]["exit"].as_f64().unwrap() > 0.0);
    assert!(s["endstate"]["tau_gap"].as_f64().unwrap() < 1e-6);
    assert!(s["wall_clock_s"].as_f64().is_some());
}

#[test]
fn profile_json_format_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        "profile",
        &configs().join("profile_n1.json"),
        dir.path(),
        &["--format", "json", "--tol-rel", "1e-9", "--t-max", "1e-3"],
    );
    // The tiny pseudo-time budget cannot reach the end state.
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget_exhausted"));
    let orbit: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("orbit.json")).unwrap()).unwrap();
    assert_eq!(orbit["status"], "budget_exhausted");
    let s = summary(dir.path());
    assert_eq!(s["status"], "solver_error");
    assert_eq!(s["error"]["code"], "budget_exhausted");
}

#[test]
fn resonant_riemann_data_exit_with_guard_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("riemann", &configs().join("resonant.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("resonance_guard"));
    let s = summary(dir.path());
    assert_eq!(s["status"], "solver_error");
    assert_eq!(s["error"]["code"], "resonance_guard");
}

#[test]
fn riemann_speeds_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("riemann", &configs().join("riemann_n2.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(dir.path());
    let speeds: Vec<f64> = s["wave_speeds"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(speeds.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(s["speeds_nondecreasing"], true);
    assert!(s["residuals"]["jump_max"].as_f64().unwrap() < 1e-10);
    let fan: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("wavefan.json")).unwrap()).unwrap();
    assert_eq!(fan["waves"].as_array().unwrap().len(), 3);
    let csv = fs::read_to_string(dir.path().join("riemann.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "xi,rho,u,p_total,s_1,s_2");
    assert_eq!(csv.lines().count(), 402);
}

#[test]
fn sod_star_state_in_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("riemann", &configs().join("sod_n1.json"), dir.path(), &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(dir.path());
    let p = s["p_star"].as_f64().unwrap();
    let u = s["u_star"].as_f64().unwrap();
    assert!((p - 0.303_130_178_050_64).abs() < 1e-10 * p);
    assert!((u - 0.927_452_620_048_95).abs() < 1e-10 * u);
    let rows: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("riemann.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 351);
}

/// Reads manifold.csv with the csv crate and recomputes the Λ₀ range.
fn lambda0_range(path: &Path) -> (usize, f64, f64) {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let col = rd.headers().unwrap().iter().position(|h| h == "lambda0").unwrap();
    let mut n = 0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for rec in rd.records() {
        let x: f64 = rec.unwrap()[col].parse().unwrap();
        lo = lo.min(x);
        hi = hi.max(x);
        n += 1;
    }
    (n, lo, hi)
}

#[test]
fn manifold_rows_match_directions_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("manifold", &configs().join("manifold_n2.json"), dir.path(), &["--directions", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(dir.path());
    let failures = s["failures"].as_array().unwrap().len();
    let (rows, lo, hi) = lambda0_range(&dir.path().join("manifold.csv"));
    assert_eq!(rows, 64 - failures);
    assert_eq!(s["rows"].as_u64().unwrap() as usize, rows);
    assert_eq!(s["lambda0"]["min"].as_f64().unwrap(), lo);
    assert_eq!(s["lambda0"]["max"].as_f64().unwrap(), hi);
}

#[test]
fn manifold_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let cfg = configs().join("manifold_n3.json");
    let flags = ["--directions", "40", "--seed", "0x5EED"];
    assert_eq!(run("manifold", &cfg, a.path(), &flags).status.code(), Some(0));
    assert_eq!(run("manifold", &cfg, b.path(), &flags).status.code(), Some(0));
    assert_eq!(run("manifold", &cfg, c.path(), &["--directions", "40", "--seed", "7"]).status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("manifold.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
    assert_eq!(summary(a.path())["seed"], 0x5EED);
}

#[test]
fn hugoniot_agrees_with_end_states() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("hugoniot", &configs().join("hugoniot_n2.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(dir.path());
    assert_eq!(s["points"], 4);
    assert!(s["residual_max"].as_f64().unwrap() <= 1e-10);
    assert!(s["endstate_gap_max"].as_f64().unwrap() < 1e-9);
    assert_eq!(s["tangency"]["passed"], true);
    let csv = fs::read_to_string(dir.path().join("hugoniot.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "Lambda,rho,u,s_1,s_2,residual,E_1,E_2");
}

#[test]
fn standing_wave_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("standing-wave", &configs().join("standing_nozzle.json"), dir.path(), &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sol: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("standing.json")).unwrap()).unwrap();
    assert!((sol["rho_plus"].as_f64().unwrap() - 1.014_645_628_541_759_3).abs() < 1e-12);
    let dir = tempfile::tempdir().unwrap();
    let o = run("standing-wave", &configs().join("standing_shallow_loss.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(dir.path());
    let k = s["solution"]["kappa"].as_f64().unwrap();
    assert_eq!(s["solution"]["dissipation"].as_f64().unwrap(), -0.5 * k);
}

#[test]
fn eos_validation_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run("validate-eos", &configs().join("eos_gamma_law.json"), dir.path(), &[]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert_eq!(summary(dir.path())["all_passed"], true);
    let dir = tempfile::tempdir().unwrap();
    let bad = run("validate-eos", &configs().join("eos_isothermal.json"), dir.path(), &[]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("hypothesis_failed"));
    let report = fs::read_to_string(dir.path().join("eos_report.csv")).unwrap();
    assert!(report.starts_with("check,passed,worst,detail\n"));
    assert!(report.contains("hypH3,false"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"eos":{"species":[{"gamma":1.4,"kappa":1.0}]},"left":{"rho":"one","u":0,"p":[1]},
            "right":{"rho":1,"u":0,"p":[1]},"a_L":[1],"a_R":[1]}"#,
    )
    .unwrap();
    let out = dir.path().join("run");
    let o = run("riemann", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("left.rho"), "{}", stderr(&o));
    let s = summary(&out);
    assert_eq!(s["status"], "config_error");

    let missing = run("profile", &dir.path().join("nope.json"), &out, &[]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(summary(&out)["error"]["code"], "config_io");
}

#[test]
fn invalid_law_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"eos":{"species":[{"gamma":0.9,"kappa":1.0}]},"omega_L":{"tau":1,"s":[0]},"m":2}"#).unwrap();
    let o = run("manifold", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eos"));
}

#[test]
fn subsonic_mass_flux_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("slow.json");
    fs::write(
        &cfg,
        r#"{"eos":{"species":[{"gamma":1.4,"kappa":1.0}]},"visc":{"mu0":[1],"mode":"temperature"},
            "omega_L":{"tau":1,"s":[0]},"m":0.5}"#,
    )
    .unwrap();
    let o = run("profile", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lax_violated"));
    assert_eq!(summary(dir.path())["error"]["code"], "lax_violated");
}

#[test]
fn bad_flags_exit_with_config_status() {
    assert_eq!(kinrel(&["profile", "--bogus"]).status.code(), Some(1));
    assert_eq!(kinrel(&["manifold", "--config", "x.json", "--seed", "0xZZ"]).status.code(), Some(1));
    assert_eq!(kinrel(&["--help"]).status.code(), Some(0));
}

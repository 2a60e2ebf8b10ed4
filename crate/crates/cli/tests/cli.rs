use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("vacmirror-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(cmd: &str, config: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vacmirror"))
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .unwrap()
}

fn config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, format!("{body}\n[output]\ndirectory = \"out\"\n")).unwrap();
    p
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
}

const LORENTZ: &str = "[model]\nkind = \"lorentzian\"\n[mechanics]\ntau_omega = 1e-3\n";
const PERFECT: &str = "[model]\nkind = \"perfect\"\n[mechanics]\ntau_omega = 1e-3\n";

#[test]
fn analyze_lorentzian() {
    let d = scratch("analyze");
    ok(&run("analyze", &config(&d, LORENTZ), &[]));
    let s = json(&d, "summary.json");
    assert!((s["omega_C"].as_f64().unwrap() - 3.0).abs() < 0.03);
    assert_eq!(s["gamma0"]["re"].as_f64(), Some(1.0));
    assert_eq!(s["cutoff_divergent"].as_bool(), Some(false));
    for f in ["gamma.csv", "chi.csv", "susceptibility.csv", "impedance.csv", "meta.json"] {
        assert!(d.join("out").join(f).exists(), "{f}");
    }
}

#[test]
fn analyze_perfect_flags_divergent_cutoff() {
    let d = scratch("analyze-perfect");
    ok(&run("analyze", &config(&d, PERFECT), &[]));
    let s = json(&d, "summary.json");
    assert_eq!(s["cutoff_divergent"].as_bool(), Some(true));
    assert!(s["omega_C"].is_null());
}

#[test]
fn config_errors_exit_2() {
    let d = scratch("config");
    let missing = config(&d, "[model]\nkind = \"tabulated\"\ntable = \"absent.dat\"\n");
    let o = run("analyze", &missing, &[]);
    assert_eq!(o.status.code(), Some(2));

    let typo = config(&d, "[model]\nkind = \"lorentzian\"\n[mechanics]\ntau = 0.1\n");
    let o = run("stability", &typo, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("run.toml:4"), "{err}");
}

#[test]
fn stability_dichotomy() {
    let d = scratch("stab-perfect");
    ok(&run("stability", &config(&d, PERFECT), &[]));
    let s = json(&d, "stability.json");
    assert!(s["rhp_zero_count"].as_i64().unwrap() >= 1);
    assert!((s["roots"][0]["re"].as_f64().unwrap() * 1e-3 - 1.0).abs() < 1e-8);
    assert!(s["min_ReZ"]["value"].as_f64().unwrap() < 0.0);

    let d = scratch("stab-lorentz");
    ok(&run("stability", &config(&d, LORENTZ), &[]));
    let s = json(&d, "stability.json");
    assert_eq!(s["passive"].as_bool(), Some(true));
    assert_eq!(s["rhp_zero_count"].as_i64(), Some(0));

    let d = scratch("stab-heavy");
    ok(&run("stability", &config(&d, "[model]\nkind = \"lorentzian\"\n[mechanics]\ntau_omega = 1.0\n"), &[]));
    let s = json(&d, "stability.json");
    assert_eq!(s["passive"].as_bool(), Some(false));
}

#[test]
fn runaway_demo_diverges_at_inverse_tau() {
    let d = scratch("runaway");
    ok(&run("simulate", &config(&d, &format!("{PERFECT}[simulation]\nt_end = 1.0\n[simulation.initial]\na = 1.0\n")), &[]));
    let r = json(&d, "run.json");
    assert_eq!(r["diverged"].as_bool(), Some(true));
    let rate = r["runaway_rate"]["rate"].as_f64().unwrap();
    assert!((rate * 1e-3 - 1.0).abs() < 0.01, "{rate}");
}

#[test]
fn passive_pulse_records_positive_work() {
    let d = scratch("pulse");
    let body = "[model]\nkind = \"lorentzian\"\n[mechanics]\ntau_omega = 0.1\nk_over_m = 1.0\n\
                [simulation]\nt_end = 200.0\ndt = 0.01\nkernel_window = 30.0\n\
                [simulation.force]\nkind = \"gaussian_pulse\"\namplitude = 1.0\ncenter = 5.0\nwidth = 1.0\n";
    ok(&run("simulate", &config(&d, body), &[]));
    let r = json(&d, "run.json");
    assert_eq!(r["method"].as_str(), Some("midpoint_memory"));
    let (wa, wm) = (r["W_a_final"].as_f64().unwrap(), r["W_m_final"].as_f64().unwrap());
    assert!(wa >= 0.0 && wm >= 0.0);
    assert!((wa - wm).abs() < 1e-6 * r["E_max"].as_f64().unwrap());
    let csv = std::fs::read_to_string(d.join("out/trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,q,v,a,F_a,W_a,E,W_m\n"));
    let kernel = std::fs::read_to_string(d.join("out/kernel.csv")).unwrap();
    assert!(kernel.starts_with("# mu_subtracted="));
}

#[test]
fn null_run_stays_at_rest() {
    let d = scratch("null");
    ok(&run("simulate", &config(&d, &format!("{PERFECT}[simulation]\nt_end = 0.01\n")), &[]));
    let csv = std::fs::read_to_string(d.join("out/trajectory.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[1..].iter().all(|x| *x == 0.0), "{line}");
    }
}

#[test]
fn crosscheck_outcomes() {
    let d = scratch("cross");
    ok(&run("crosscheck", &config(&d, LORENTZ), &[]));
    let c = json(&d, "crosscheck.json");
    for key in ["kk_defect", "spectral_rep_defect", "consistency_defect"] {
        assert_eq!(c[key]["pass"].as_bool(), Some(true), "{key}: {}", c[key]);
    }

    let d = scratch("cross-perfect");
    let o = run("crosscheck", &config(&d, PERFECT), &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverges"));

    let d = scratch("cross-corrupt");
    let mut table = String::from("# omega re_r im_r re_s im_s\n");
    for i in 0..=200 {
        let w = 10f64.powf(-2.0 + 4.0 * i as f64 / 200.0);
        let den = 1.0 + w * w;
        table += &format!("{w} {} {} {} {}\n", -1.0 / den, -w / den, 1.2 * w * w / den, -w / den);
    }
    std::fs::write(d.join("bad.dat"), table).unwrap();
    let body = "[model]\nkind = \"tabulated\"\ntable = \"bad.dat\"\n[grid]\nomega_min = 0.01\nomega_max = 100.0\npoints = 100\nspacing = \"log\"\n";
    let o = run("crosscheck", &config(&d, body), &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("validation"));
}

#[test]
fn tabulated_lorentzian_copy_analyzes() {
    let d = scratch("tab");
    let mut table = String::from("# sampled Lorentzian\n");
    for i in 0..=800 {
        let w = if i == 0 { 0.0 } else { 10f64.powf(-3.0 + 6.0 * (i - 1) as f64 / 799.0) };
        let den = 1.0 + w * w;
        table += &format!("{w:e} {:e} {:e} {:e} {:e}\n", -1.0 / den, -w / den, w * w / den, -w / den);
    }
    std::fs::write(d.join("lorentz.dat"), table).unwrap();
    let body = "[model]\nkind = \"tabulated\"\ntable = \"lorentz.dat\"\n[grid]\nomega_min = 1e-3\nomega_max = 1e3\npoints = 400\nspacing = \"log\"\n";
    ok(&run("analyze", &config(&d, body), &[]));
    let s = json(&d, "summary.json");
    assert!((s["omega_C"].as_f64().unwrap() - 3.0).abs() < 0.03, "{}", s["omega_C"]);
    assert!((s["gamma0"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn outputs_are_deterministic() {
    let d = scratch("det");
    let cfg = config(&d, LORENTZ);
    let (a, b) = (d.join("a"), d.join("b"));
    ok(&run("analyze", &cfg, &["--out", a.to_str().unwrap(), "--threads", "2", "--seed", "7"]));
    ok(&run("analyze", &cfg, &["--out", b.to_str().unwrap(), "--timestamp"]));
    for f in ["gamma.csv", "chi.csv", "susceptibility.csv", "impedance.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let meta_a: Value = serde_json::from_slice(&std::fs::read(a.join("meta.json")).unwrap()).unwrap();
    let meta_b: Value = serde_json::from_slice(&std::fs::read(b.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta_a["seed"].as_u64(), Some(7));
    assert!(meta_a.get("timestamp").is_none());
    assert!(meta_b["timestamp"].as_u64().is_some());
    let sa = std::fs::read_to_string(a.join("summary.json")).unwrap();
    assert!(!sa.contains("timestamp"));
}

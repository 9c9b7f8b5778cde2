use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn bifrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bifrac")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV produced by the CLI, after checking the comment and header lines.
fn rows(text: &str, header: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# config_hash="), "{comment}");
    assert!(comment.contains(" tolerances="));
    assert_eq!(lines.next().unwrap(), header);
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn find(rows: &[Vec<f64>], x: f64, y: f64) -> &Vec<f64> {
    rows.iter().find(|r| (r[0] - x).abs() < 1e-12 && (r[1] - y).abs() < 1e-12).unwrap()
}

#[test]
fn kernel_spot_value_at_quarter_turn() {
    let o = bifrac(&["kernel", "--theta1", "pi/2", "--window", "4", "--points", "9"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o), "x,y,re,im");
    assert_eq!(r.len(), 81);
    let v = find(&r, 1.0, 1.0);
    let s = (2.0 * PI).sqrt();
    assert!((v[2] - 1f64.cos() / s).abs() < 1e-12);
    assert!((v[3] - 1f64.sin() / s).abs() < 1e-12);
}

#[test]
fn kernel_eighth_turn_closed_form() {
    let o = bifrac(&["kernel", "--theta1", "pi/4", "--window", "2", "--points", "9"]);
    let r = rows(&stdout(&o), "x,y,re,im");
    let t = PI / 4.0;
    let (sn, cs) = t.sin_cos();
    for v in &r {
        let (x, y) = (v[0], v[1]);
        // √((1 + i cot θ)/2π) · exp(i(xy/sin θ − (x²+y²) cot θ/2))
        let pre = num_complex::Complex64::new(1.0, cs / sn) / (2.0 * PI);
        let want = pre.sqrt() * num_complex::Complex64::from_polar(1.0, x * y / sn - (x * x + y * y) * cs / sn / 2.0);
        assert!((v[2] - want.re).abs() < 1e-12 && (v[3] - want.im).abs() < 1e-12, "({x},{y})");
    }
}

#[test]
fn kernel_refuses_delta_limit() {
    let o = bifrac(&["kernel", "--theta1", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta-limit"));
    assert!(o.stdout.is_empty());
}

#[test]
fn afunction_collapses_to_weyl_and_wigner() {
    let weyl = bifrac(&["afunction", "--theta1", "0", "--theta2", "0", "--window", "8", "--points", "17"]);
    assert!(weyl.status.success(), "{}", String::from_utf8_lossy(&weyl.stderr));
    let r = rows(&stdout(&weyl), "alpha,beta,re,im");
    assert_eq!(r.len(), 17 * 17);
    for v in &r {
        let g = (-(v[0] * v[0] + v[1] * v[1]) / 2.0).exp();
        assert!((v[2] - g).abs() < 1e-8 && v[3].abs() < 1e-8, "{v:?}");
    }
    let wig = bifrac(&["afunction", "--theta1", "pi/2", "--theta2", "pi/2", "--window", "8", "--points", "17"]);
    let r = rows(&stdout(&wig), "alpha,beta,re,im");
    for v in &r {
        let g = (-(v[0] * v[0] + v[1] * v[1]) / 2.0).exp();
        assert!((v[2] - g).abs() < 1e-8 && v[3].abs() < 1e-12, "{v:?}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("a.csv");
    std::fs::write(
        &cfg,
        "# vacuum Wigner table\nstate = vacuum\ntheta1 = pi/2\ntheta2 = pi/2\nx_min = -6\nx_max = 6\nn_points = 13\n",
    )
    .unwrap();
    let o = bifrac(&["afunction", "--config", cfg.to_str().unwrap(), "--points", "9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let r = rows(&std::fs::read_to_string(&out).unwrap(), "alpha,beta,re,im");
    assert_eq!(r.len(), 81);
    assert_eq!(r[0][0], -6.0);
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    for text in ["colour = red\n", "state = cat 2 0 1.5\n", "fock_dim = 4\n", "theta1\n"] {
        std::fs::write(&cfg, text).unwrap();
        let o = bifrac(&["moments", "--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
    }
    let o = bifrac(&["afunction", "--theta1", "0.3", "--theta2", "0.3+pi/2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bifrac(&["afunction", "--theta1", "0.3", "--theta2", &(0.3 + PI / 2.0).to_string()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("excluded"));
}

#[test]
fn ufrac_zero_angles_is_displacement() {
    let o = bifrac(&["ufrac", "--theta1", "0", "--theta2", "0", "--fock-dim", "16"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o), "m,n,re,im");
    assert_eq!(r.len(), 256);
    // ⟨0|D(β,−α)|0⟩ = exp(−(α²+β²)/2) for the default labels.
    let (a, b) = (0.3f64, -0.2f64);
    let want = (-(a * a + b * b) / 2.0).exp();
    assert!((r[0][2] - want).abs() < 1e-10 && r[0][3].abs() < 1e-10);
}

#[test]
fn ufrac_undersized_space_is_an_invariant_failure() {
    let o = bifrac(&["ufrac", "--fock-dim", "16"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unitarity"));
}

#[test]
fn moments_of_vacuum_wigner() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("m.cfg");
    std::fs::write(&cfg, "moment_norm = probability\ntheta1 = pi/2\ntheta2 = pi/2\n").unwrap();
    let o = bifrac(&["moments", "--config", cfg.to_str().unwrap()]);
    let r = rows(&stdout(&o), "norm,mean_alpha,mean_beta,delta_alpha,delta_beta");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((r[0][0] - 1.0).abs() < 1e-10);
    assert!(r[0][1].abs() < 1e-10 && r[0][2].abs() < 1e-10);
    assert!((r[0][3] - h).abs() < 1e-8 && (r[0][4] - h).abs() < 1e-8);
}

fn run_to(path: &Path, args: &[&str]) -> String {
    let mut a = args.to_vec();
    a.extend(["--out", path.to_str().unwrap()]);
    let o = bifrac(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn figure_tables_properties_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig.cfg");
    std::fs::write(&cfg, "resolution = 4\n").unwrap();
    let c = cfg.to_str().unwrap();
    let f2 = run_to(&dir.path().join("f2.csv"), &["fig2", "--config", c]);
    let r = rows(&f2, "theta2,delta_alpha,delta_beta,product,masked");
    assert_eq!(r.len(), 4);
    assert_eq!(r[0][4], 1.0);
    assert!(r[0][3].is_nan());
    let quarter = r.iter().find(|v| (v[0] - PI / 2.0).abs() < 1e-12).unwrap();
    assert!(quarter[3] >= 0.5);
    assert_eq!(run_to(&dir.path().join("f2b.csv"), &["fig2", "--config", c]), f2);

    std::fs::write(&cfg, "resolution = 5\n").unwrap();
    let f3 = run_to(&dir.path().join("f3.csv"), &["fig3", "--config", c]);
    let r = rows(&f3, "p,delta_alpha,delta_beta,product,masked");
    assert_eq!(r.len(), 5);
    for k in 0..5 {
        assert!((r[k][3] - r[4 - k][3]).abs() < 1e-6);
    }
    assert_eq!(run_to(&dir.path().join("f3b.csv"), &["fig3", "--config", c]), f3);
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON report")
}

#[test]
fn verify_frft_passes_with_schema() {
    let o = bifrac(&["verify", "--suite", "frft"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["suite"], "frft");
    assert_eq!(r["passed"], true);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    let inv = r["invariants"].as_array().unwrap();
    assert_eq!(inv.len(), 3);
    for i in inv {
        assert!(i["name"].as_str().unwrap().starts_with("frft."));
        assert!(i["error"].as_f64().unwrap() <= i["tolerance"].as_f64().unwrap());
        assert_eq!(i["passed"], true);
    }
}

#[test]
fn verify_undersized_space_reports_cutoff_failures() {
    let o = bifrac(&["verify", "--suite", "all", "--fock-dim", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&o);
    assert_eq!(r["passed"], false);
    let failed: Vec<&serde_json::Value> =
        r["invariants"].as_array().unwrap().iter().filter(|i| i["passed"] == false).collect();
    assert!(failed.iter().any(|i| i["detail"].as_str().is_some_and(|d| d.contains("truncation"))));
    assert!(failed.iter().all(|i| !i["name"].as_str().unwrap().starts_with("frft.")));
}

#[test]
fn verify_tolerance_override_and_unknown_suite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.cfg");
    std::fs::write(&cfg, "tol.frft.kernel_spot = 0\n").unwrap();
    let o = bifrac(&["verify", "--suite", "frft", "--config", cfg.to_str().unwrap()]);
    let r = report(&o);
    let spot = &r["invariants"][0];
    assert_eq!(spot["tolerance"], 0.0);
    assert_eq!(o.status.code(), Some(if spot["passed"] == true { 0 } else { 1 }));
    let o = bifrac(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

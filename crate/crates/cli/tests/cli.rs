use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qprime::domains::Domain;
use qprime::quadrature::{total_q_prime, PipelineConfig};

fn inputs(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../inputs").join(name)
}

fn qprime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprime")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    v.sort();
    v
}

#[test]
fn invariants_writes_report_and_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let domain = inputs("perturbed_ball.toml");
    let o = qprime(&["invariants", domain.to_str().unwrap(), "--grid", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files(dir.path()), ["report.csv", "report.json"]);

    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "invariants");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["grid"], 8);
    assert_eq!(v["config"]["degree"], 10);

    // end to end against the library
    let d = Domain::load(&domain).unwrap();
    let lib = total_q_prime(&d, 8, &PipelineConfig::default()).unwrap();
    assert_eq!(v["result"]["total_q_prime"].as_f64().unwrap(), lib.total_q_prime);
    assert_eq!(v["inputs"][0], d.hash());

    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    for col in ["re_z1", "im_z1", "re_z2", "im_z2", "q_prime", "scal", "norm_a2", "obstruction"] {
        assert!(header.split(',').any(|h| h == col), "missing {col} in {header}");
    }
    assert_eq!(lines.count(), lib.points);
}

#[test]
fn ball_report_is_flat() {
    let o = qprime(&["invariants", inputs("ball.toml").to_str().unwrap(), "--grid", "6"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &v["result"];
    assert!(r["obstruction"]["max"].as_f64().unwrap().abs() < 1e-12);
    assert!(r["obstruction"]["min"].as_f64().unwrap().abs() < 1e-12);
    let q = &r["q_prime"];
    assert!((q["max"].as_f64().unwrap() - q["min"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn parse_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    // not Hermitian: z₁ alone is not real
    fs::write(&bad, "n = 1\nname = \"x\"\ncenter = [0.0, 0.0, 0.0, 0.0]\nrho = [{ pow = [1,0,0,0], re = 1.0 }]\n").unwrap();
    let out = dir.path().join("r.json");
    let o = qprime(&["invariants", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(files(dir.path()), ["bad.toml"]);

    let ball = inputs("ball.toml");
    for args in [
        vec!["invariants", ball.to_str().unwrap(), "--eps", "1e-3,2e-3,5e-4,1e-4,5e-5"],
        vec!["invariants", ball.to_str().unwrap(), "--eps", "1e-3,x"],
        vec!["invariants", ball.to_str().unwrap(), "--grid", "2"],
        vec!["invariants", ball.to_str().unwrap(), "--grid", "lots"],
        vec!["invariants", "/nonexistent/domain.toml"],
        vec!["frobnicate"],
    ] {
        let o = qprime(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn geometry_errors_exit_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("hartogs.toml");
    fs::write(
        &d,
        "n = 1\nname = \"hartogs\"\ncenter = [0.0, 0.0, 0.0, 0.0]\nrho = [\n  { pow = [0,0,0,0], re = 1.0 },\n  { pow = [1,1,0,0], re = -1.0 },\n  { pow = [0,0,1,1], re = -1.0 },\n  { pow = [2,2,0,0], re = 3.0 },\n  { pow = [3,3,0,0], re = -2.0 },\n]\n",
    )
    .unwrap();
    let out = dir.path().join("r.json");
    for cmd in ["invariants", "renorm"] {
        let o = qprime(&[cmd, d.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("pseudoconvex"));
    }
    assert_eq!(files(dir.path()), ["hartogs.toml"]);
}

#[test]
fn numeric_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qprime(&["invariants", inputs("perturbed_ball.toml").to_str().unwrap(), "--grid", "4", "--tol", "1e-300", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(files(dir.path()).is_empty());
}

#[test]
fn transform_produces_a_domain_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("image.toml");
    let o = qprime(&[
        "transform",
        inputs("ball.toml").to_str().unwrap(),
        inputs("rotation.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let img = Domain::load(&out).unwrap();
    let ball = Domain::load(&inputs("ball.toml")).unwrap();
    let diff = &img.rho - &ball.rho;
    assert!(diff.terms().all(|(_, c)| c.norm() < 1e-14));

    // the image of a perturbed ball is a valid input with the same total
    let o = qprime(&["transform", inputs("perturbed_ball.toml").to_str().unwrap(), inputs("shear.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let img = Domain::parse(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(img.check_pseudoconvex(8).unwrap() > 0.0);
}

#[test]
fn variation_hessian_and_renorm_run() {
    let o = qprime(&["variation", inputs("family.toml").to_str().unwrap(), "--grid", "8", "--step", "0.04"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["relative_error"].as_f64().unwrap() < 1e-3);

    let o = qprime(&["hessian", inputs("direction_z1_4.toml").to_str().unwrap(), "--grid", "8", "--step", "0.1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["sign"], -1);

    let o = qprime(&["renorm", inputs("ball.toml").to_str().unwrap(), "--grid", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["weighted_fit"]["residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["config"]["eps"].as_array().unwrap().len(), 12);
}

#[test]
fn selftest_passes() {
    let o = qprime(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("PASS") && !text.contains("FAIL"));
}

#[cfg(feature = "parallel")]
#[test]
fn thread_count_does_not_change_reports() {
    let domain = inputs("perturbed_ball.toml");
    let a = qprime(&["invariants", domain.to_str().unwrap(), "--grid", "6", "--threads", "1"]);
    let b = qprime(&["invariants", domain.to_str().unwrap(), "--grid", "6", "--threads", "2"]);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"]["threads"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

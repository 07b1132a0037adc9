use serde_json::Value;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_halfspec");

struct Run {
    dir: tempfile::TempDir,
    out: Output,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().unwrap()
    }
    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.out.stderr).into_owned()
    }
    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&std::fs::read_to_string(self.path(name)).unwrap()).unwrap()
    }
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join("out").join(name)
    }
    fn csv(&self, name: &str) -> Vec<Vec<String>> {
        std::fs::read_to_string(self.path(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_owned).collect())
            .collect()
    }
}

fn run_with(config: &str, args: &[&str], env: &[(&str, &str)]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .arg("--quiet");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run { dir, out }
}

fn run(config: &str, args: &[&str]) -> Run {
    run_with(config, args, &[])
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn shipped(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

const CASE_A: &str = r#"
[problem]
p = 2.0
a = "pi^2"
f = "2/pi*atan(xi) + exp(-xi^2)*cos(pi*x)"
f_plus = "1"
f_minus = "-1"
[run]
k_max = 1
"#;

#[test]
fn spectrum_matches_classical_eigenvalues() {
    let r = run("[problem]\np = 2.0\n[run]\nk_max = 3\n", &["spectrum"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let doc = r.json("spectrum.json");
    assert_eq!(doc["schema"], 1);
    let pairs = doc["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 8);
    for p in pairs {
        let k = p["k"].as_u64().unwrap() as f64;
        let exact = ((k + 1.0) * PI).powi(2);
        assert!((num(&p["lambda"]) - exact).abs() <= 1e-8 * exact);
    }
    let rows = r.csv("spectrum.csv");
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][1], "+");
}

#[test]
fn config_errors_exit_with_code_two() {
    let r = run("[problem]\np = 2.0\nf = \"sin(x\"\n", &["spectrum"]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("byte"), "{}", r.stderr());

    let r = run("[problem]\np = 0.5\n", &["spectrum"]);
    assert_eq!(r.code(), 2, "{}", r.stderr());

    let r = run("[problem]\np = 2.0\n[tolerances]\neig_tol = 0.0\n", &["spectrum"]);
    assert_eq!(r.code(), 2);

    let r = run("[problem\n", &["check"]);
    assert_eq!(r.code(), 2);

    let r = run_with("[problem]\np = 2.0\n", &["spectrum"], &[("HALFSPEC_THREADS", "zero")]);
    assert_eq!(r.code(), 2);
}

#[test]
fn fucik_curve_contains_the_diagonal_point() {
    let d = 4.0 * PI * PI;
    let cfg = format!("[problem]\np = 2.0\n[run]\nfucik_k = 1\nfucik_grid = [12.0, {d:?}, 100.0]\n");
    let r = run_with(&cfg, &["fucik", "--branch", "-"], &[("HALFSPEC_THREADS", "2")]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let rows = r.csv("fucik.csv");
    let ap: f64 = rows[1][0].parse().unwrap();
    let am: f64 = rows[1][1].parse().unwrap();
    assert!((ap - d).abs() < 1e-6 && (am - d).abs() < 1e-6);
    assert_eq!(rows[1][3], "-");
    for row in &rows {
        let (a, b): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        assert!((PI / a.sqrt() + PI / b.sqrt() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn fucik_point_below_the_asymptote_is_marked() {
    let r = run("[problem]\np = 2.0\n[run]\nfucik_k = 1\nfucik_grid = [5.0, 50.0]\n", &["fucik"]);
    assert_eq!(r.code(), 0);
    assert!(r.stderr().contains("warning"));
    let rows = r.csv("fucik.csv");
    assert_eq!(rows[0][4], "no_bracket");
    assert_eq!(rows[0][1], "");
    assert_eq!(rows[1][4], "ok");
    assert_eq!(r.json("fucik.json")["points"][0]["status"], "no_bracket");
}

#[test]
fn fucik_symmetric_points_at_p3() {
    let p: f64 = 3.0;
    let pi_p = 2.0 * PI / (p * (PI / p).sin());
    for k in 0..3 {
        let d = (p - 1.0) * ((k + 1) as f64 * pi_p).powf(p);
        let cfg = format!("[problem]\np = 3.0\n[run]\nfucik_grid = [{d:?}]\n");
        let r = run(&cfg, &["fucik", "--k", &k.to_string(), "--branch", "-"]);
        assert_eq!(r.code(), 0, "{}", r.stderr());
        let am = num(&r.json("fucik.json")["points"][0]["alpha_minus"]);
        assert!((am - d).abs() <= 1e-6 * d, "k = {k}: {am} vs {d}");
    }
}

#[test]
fn check_reports_the_three_verdicts() {
    let r = run(CASE_A, &["check"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let doc = r.json("check.json");
    assert_eq!(doc["report"]["verdict"], "solvable_by_theorem");
    assert_eq!(doc["report"]["case"], "A");
    assert_eq!(doc["hypotheses"]["limits_ok"], true);

    let fails = CASE_A.replace("f_plus = \"1\"", "f_plus = \"3\"").replace("f_minus = \"-1\"", "f_minus = \"1\"").replace(
        "f = \"2/pi*atan(xi) + exp(-xi^2)*cos(pi*x)\"",
        "f = \"2/pi*atan(xi) + 2\"",
    );
    assert_eq!(run(&fails, &["check"]).json("check.json")["report"]["verdict"], "condition_fails");

    let r = run("[problem]\np = 2.0\na = \"pi^2\"\n[run]\nk_max = 1\n", &["check"]);
    assert_eq!(r.json("check.json")["report"]["verdict"], "inconclusive");

    let r = run("[problem]\np = 2.0\na = \"pi^2\"\nlambda = 5.0\nf = \"1\"\nf_plus = \"1\"\nf_minus = \"1\"\n", &["check"]);
    assert_eq!(r.json("check.json")["report"]["case"], "not_resonant");
}

#[test]
fn check_above_the_slice_is_numeric_error() {
    let r = run("[problem]\np = 2.0\nlambda = 1000.0\n[run]\nk_max = 1\n", &["check"]);
    assert_eq!(r.code(), 3, "{}", r.stderr());
}

#[test]
fn solve_case_a_and_its_reflection() {
    let r = run(CASE_A, &["solve"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let doc = r.json("solve.json");
    let res = &doc["result"];
    assert!(num(&res["endpoint_residual"]) < 1e-8);
    assert!(num(&res["bvp_residual"]) < 1e-6);
    assert!(num(&res["bracket"]["value_lo"]) * num(&res["bracket"]["value_hi"]) < 0.0);
    assert_eq!(r.csv("solution.csv").len(), 1025);

    let refl = CASE_A.replace("+ exp(-xi^2)*cos(pi*x)", "- exp(-xi^2)*cos(pi*x)");
    let m = run(&refl, &["solve"]);
    assert_eq!(m.code(), 0);
    let (t1, t2) = (num(&res["tau_star"]), num(&m.json("solve.json")["result"]["tau_star"]));
    assert!((t1 + t2).abs() < 1e-6, "{t1} {t2}");
    for (a, b) in r.csv("solution.csv").iter().zip(m.csv("solution.csv")) {
        let (ua, ub): (f64, f64) = (a[1].parse().unwrap(), b[1].parse().unwrap());
        assert!((ua + ub).abs() < 1e-6);
    }
}

#[test]
fn solve_linear_with_manual_bracket() {
    let r = run(&shipped("linear.toml"), &["solve"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let tau = num(&r.json("solve.json")["result"]["tau_star"]);
    let c = tau - 2.0 / (3.0 * PI);
    for row in r.csv("solution.csv") {
        let (x, u): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        let exact = (2.0 * PI * x).sin() / (3.0 * PI * PI) + c * (PI * x).sin() / PI;
        assert!((u - exact).abs() < 1e-7);
    }
}

#[test]
fn solve_refuses_without_the_condition() {
    let r = run("[problem]\np = 2.0\na = \"pi^2\"\nf = \"1\"\nf_plus = \"1\"\nf_minus = \"1\"\n[run]\nk_max = 1\n", &["solve"]);
    assert_eq!(r.code(), 3);
}

#[test]
fn sensitivity_case_a() {
    let r = run(CASE_A, &["sensitivity"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let doc = r.json("sensitivity.json");
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let plus = &results[0];
    assert_eq!(plus["nu"], "+");
    assert!((num(&plus["sensitivity"]["psi0_at_1"]) + 2.0 / (PI * PI)).abs() < 1e-6);
    assert!(num(&plus["identity"]["relative"]) < 1e-8);
    assert_eq!(doc["prediction"]["predicted_plus"], "-");
    assert_eq!(r.csv("sensitivity_plus.csv").len(), 1025);

    let r = run(&shipped("sensitivity.toml"), &["sensitivity"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());

    let r = run("[problem]\np = 2.0\na = \"pi^2\"\nlambda = 3.0\n[run]\nk_max = 1\n", &["sensitivity"]);
    assert_eq!(r.code(), 3);
}

#[test]
fn json_is_deterministic_and_records_overrides() {
    let a = run_with(CASE_A, &["check", "--tolerances", "eig_tol=1e-8,quad_tol=1e-9"], &[("HALFSPEC_THREADS", "1")]);
    let b = run(CASE_A, &["check", "--tolerances", "eig_tol=1e-8", "--tolerances", "quad_tol=1e-9"]);
    let (ta, tb) = (
        std::fs::read(a.path("check.json")).unwrap(),
        std::fs::read(b.path("check.json")).unwrap(),
    );
    assert_eq!(ta, tb);
    let doc = a.json("check.json");
    assert_eq!(num(&doc["tolerances"]["eig_tol"]), 1e-8);
    assert_eq!(num(&doc["report"]["tolerances"]["quad_tol"]), 1e-9);
}

#[test]
fn format_selects_outputs() {
    let r = run("[problem]\np = 2.0\n[run]\nk_max = 1\n", &["spectrum", "--format", "csv"]);
    assert!(r.path("spectrum.csv").exists() && !r.path("spectrum.json").exists());
    let r = run("[problem]\np = 2.0\n[run]\nk_max = 1\nformat = \"json\"\n", &["spectrum"]);
    assert!(!r.path("spectrum.csv").exists() && r.path("spectrum.json").exists());
}

#[test]
fn shipped_configs_run() {
    for (name, cmd) in [
        ("spectrum.toml", "spectrum"),
        ("fucik.toml", "fucik"),
        ("check.toml", "check"),
        ("solve.toml", "solve"),
    ] {
        let r = run(&shipped(name), &[cmd]);
        assert_eq!(r.code(), 0, "{name}: {}", r.stderr());
    }
}

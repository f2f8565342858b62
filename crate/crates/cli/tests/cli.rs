use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use f13_cli::tables::Csv;

const BIN: &str = env!("CARGO_BIN_EXE_f13");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    write(dir, name, text).to_str().unwrap().to_string()
}

/// Output tables may hold `NaN`, which the input parser rejects.
fn csv(path: &Path) -> Csv {
    parse_output(&std::fs::read_to_string(path).unwrap())
}

fn parse_output(text: &str) -> Csv {
    let mut lines = text.lines();
    let mut csv = Csv::new(lines.next().unwrap().split(','));
    for line in lines {
        csv.push(line.split(',').map(|c| c.parse().unwrap()).collect());
    }
    csv
}

const A1_SOLVE: &str = "
[scenario]
case = a1
output = a1.csv
[scale]
F = 1
[initial]
sigma11 = 0.1
Omega3 = 1
[constants]
A = 1
[grid]
z0 = 0
z1 = 1
N = 1000
";

#[test]
fn a1_conserves_first_integral() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", &config(dir.path(), "a1.cfg", A1_SOLVE)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).ends_with("\n") && stdout(&out).contains("RESULT pass"));
    let t = csv(&dir.path().join("a1.csv"));
    assert_eq!(t.header.join(","), "z,sigma11,a3,Omega3,F,pi11,p,udot3,firstintegral_A");
    assert_eq!(t.rows.len(), 1001);
    for a in t.column("firstintegral_A").unwrap() {
        assert!((a - 1.0).abs() < 1e-8);
    }
    for (pi, p) in t.column("pi11").unwrap().iter().zip(t.column("p").unwrap()) {
        assert!((pi + 4.0 * p).abs() < 1e-14);
    }
}

#[test]
fn solve_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "a1.cfg", A1_SOLVE);
    run(&["solve", "--config", &cfg]);
    let first = std::fs::read(dir.path().join("a1.csv")).unwrap();
    let out = Command::new(BIN).args(["solve", "--config", &cfg]).env("F13_THREADS", "1").output().unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(first, std::fs::read(dir.path().join("a1.csv")).unwrap());
    assert!(!first.contains(&b'\r'));
}

fn branch_config(case: &str, constant: &str, z1: f64) -> String {
    format!(
        "[scenario]\ncase = {case}\noutput = out.csv\n[scale]\nF = 1\n[constants]\n{constant} = 1\nB = 1\n[grid]\nz0 = 0\nz1 = {z1}\nN = 400\n"
    )
}

#[test]
fn shearless_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", &config(dir.path(), "s.cfg", &branch_config("a1-shearless", "C", 0.4))]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let t = csv(&dir.path().join("out.csv"));
    for (z, a3) in t.column("z").unwrap().iter().zip(t.column("a3").unwrap()) {
        assert!((a3 - 1.0 / (1.0 - 2.0 * z)).abs() < 1e-10);
    }
}

#[test]
fn pole_gives_exit_three_and_partial_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", &config(dir.path(), "s.cfg", &branch_config("a1-shearless", "C", 1.0))]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("clipped: pole near z=5.000000e-1"));
    let z = csv(&dir.path().join("out.csv")).column("z").unwrap();
    assert!(*z.last().unwrap() <= 0.499 + 1e-12 && z.len() > 100);
}

#[test]
fn half_branch_is_pressure_free() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", &config(dir.path(), "b.cfg", &branch_config("a2-branch2", "D", 0.5))]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let t = csv(&dir.path().join("out.csv"));
    assert_eq!(t.header.join(","), "z,p,udot3,a3,Omega3,pi11");
    assert!(t.column("p").unwrap().iter().all(|p| p.abs() < 1e-12));
}

#[test]
fn general_a2_solve() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[scenario]\ncase = a2\nframe_check = true\n[scale]\nF = 1.5\n[initial]\np = 0.1\nudot3 = 0.2\na3 = 0.3\nOmega3 = 1\n[grid]\nz0 = 0\nz1 = 1\nN = 200\n";
    let out = run(&["solve", "--config", &config(dir.path(), "a2.cfg", text)]);
    assert_eq!(code(&out), 0);
    let t = parse_output(&stdout(&out));
    assert_eq!(t.rows.len(), 201);
    assert!(String::from_utf8(out.stderr).unwrap().contains("check jacobi5"));
}

const VERIFY: &str = "
[scenario]
case = a1
[profile]
kind = exp
amplitude = 1
rate = 1
[constants]
A = 0
B = 1
[grid]
z0 = 0
z1 = 1
N = 1000
";

#[test]
fn verify_passes_and_detects_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--config", &config(dir.path(), "v.cfg", VERIFY)]);
    assert_eq!(code(&out), 0);
    let bad = VERIFY.replace("[profile]", "perturb_a3 = 1e-3\n[profile]");
    let out = run(&["verify", "--config", &config(dir.path(), "p.cfg", &bad)]);
    assert_eq!(code(&out), 4);
    let report = String::from_utf8(out.stderr).unwrap();
    assert!(report.contains("fail") && report.contains(" at z="));
    assert!(report.lines().last().unwrap().starts_with("RESULT fail max_residual="));
}

#[test]
fn branch_one_verifies_like_shearless() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["verify", "--config", &config(dir.path(), "a.cfg", &branch_config("a1-shearless", "C", 0.4))]);
    let b = run(&["verify", "--config", &config(dir.path(), "b.cfg", &branch_config("a2-branch1", "C", 0.4))]);
    assert_eq!((code(&a), code(&b)), (0, 0));
    let result = |o: &Output| stdout(o).lines().last().unwrap().to_string();
    assert!(result(&a).starts_with("RESULT pass") && result(&b).starts_with("RESULT pass"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", &config(dir.path(), "x.cfg", &format!("{A1_SOLVE}\n[extra]\nk = 1\n"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("extra.k"));
    let out = run(&["verify", "--config", &config(dir.path(), "y.cfg", "[scenario]\ncase = a2\n")]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(&["solve", "--config", "/nonexistent.cfg"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let out = Command::new(BIN)
        .args(["solve", "--config", &config(dir.path(), "a1.cfg", A1_SOLVE)])
        .env("F13_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn spinor_examples() {
    let dir = tempfile::tempdir().unwrap();
    let special = write(dir.path(), "s.state", "mu = 3\np = 1\npi11 = 1\npi22 = 1\n");
    let text = stdout(&run(&["spinor", "--state", special.to_str().unwrap()]));
    assert!(text.contains("Phi00 = 5.0000000000000000e-1\n"));
    assert!(text.contains("Phi22 = 5.0000000000000000e-1\n"));
    assert!(text.contains("Phi11 = 1.0000000000000000e0\n"));
    assert!(text.contains("Lambda_NP = 0.0000000000000000e0\n"));
    assert!(text.contains("conformally_flat = true"));

    let vacuum = write(dir.path(), "v.state", "# nothing\n");
    let text = stdout(&run(&["spinor", "--state", vacuum.to_str().unwrap()]));
    let values: Vec<&str> = text.lines().filter_map(|l| l.split(" = ").nth(1)).collect();
    assert_eq!(values.len(), 14);
    for v in &values[..12] {
        assert!(v.split(' ').all(|c| c.trim_end_matches('i').parse::<f64>().unwrap() == 0.0), "{v}");
    }

    let weyl = write(dir.path(), "w.state", "E11 = 1\nE22 = -1\n");
    let text = stdout(&run(&["spinor", "--state", weyl.to_str().unwrap()]));
    assert!(text.contains("Psi0 = 1.0000000000000000e0 +0.0000000000000000e0i"));
    assert!(text.contains("Psi4 = 1.0000000000000000e0 +0.0000000000000000e0i"));
    assert!(text.contains("conformally_flat = false"));

    let bad = write(dir.path(), "b.state", "mu = three\n");
    assert_eq!(code(&run(&["spinor", "--state", bad.to_str().unwrap()])), 2);
}

/// Einstein–de Sitter dust sampled in proper time on `[0.5, 1]`.
fn eds_table(n: usize) -> String {
    let mut s = String::from("z,F,mu,theta\n");
    for i in 0..=n {
        let t = 0.5 + 0.5 * i as f64 / n as f64;
        s.push_str(&format!("{t:.17e},1,{:.17e},{:.17e}\n", 4.0 / (3.0 * t * t), 2.0 / t));
    }
    s
}

fn residual_max(dir: &Path, name: &str, table: &str, extra: &[&str]) -> (i32, String) {
    let path = write(dir, name, table);
    let mut args = vec!["residual", "--table", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    (code(&out), String::from_utf8(out.stderr).unwrap())
}

fn result_value(report: &str) -> f64 {
    report.lines().last().unwrap().rsplit('=').next().unwrap().parse().unwrap()
}

#[test]
fn gridded_dust_converges_at_fourth_order() {
    let dir = tempfile::tempdir().unwrap();
    let errors: Vec<f64> = [20, 40, 80]
        .iter()
        .map(|&n| result_value(&residual_max(dir.path(), "eds.csv", &eds_table(n), &["--direction", "0", "--tol", "1"]).1))
        .collect();
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() > 3.5, "{errors:?}");
    }
}

#[test]
fn spurious_vorticity_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = String::from("z,F,omega3\n");
    for i in 0..=10 {
        table.push_str(&format!("{},1,0.25\n", i as f64 / 10.0));
    }
    let (c, report) = residual_max(dir.path(), "w.csv", &table, &["--system", "special"]);
    assert_eq!(c, 4);
    assert!(report.lines().any(|l| l.starts_with("check b15 ") && l.ends_with("fail")));
    assert!(report.lines().any(|l| l.starts_with("check b1 ") && l.ends_with("pass")));
}

#[test]
fn short_tables_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (c, _) = residual_max(dir.path(), "s.csv", "z,F,theta\n0,1,1\n1,1,1\n", &[]);
    assert_eq!(c, 2);
}

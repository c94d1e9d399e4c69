use std::path::Path;
use std::process::{Command, Output};

use destab::steenrod::{bv1, sphere, ModuleWindow};
use destab_cli::input::load_module;

fn destab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_destab"))
        .args(args)
        .current_dir(dir)
        .env_remove("DESTAB_DEGREE_CAP")
        .output()
        .expect("runs")
}

fn rows(out: &Output) -> Vec<(usize, i32, usize)> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s\tdegree\tdim"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn sphere_has_f_p_in_degree_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = destab(&["compute", "-m", "sphere(0)", "--s-max", "1", "--deg-max", "20"], dir.path());
    assert!(out.status.success());
    let r = rows(&out);
    assert!(r.contains(&(0, 0, 1)));
    assert!(r.iter().any(|&(s, _, _)| s == 1));
}

#[test]
fn free_module_has_zero_higher_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = destab(&["compute", "-m", "free(2)", "--s-max", "2", "--deg-max", "30"], dir.path());
    assert!(out.status.success());
    let r = rows(&out);
    assert!(r.iter().any(|&(s, _, _)| s == 2));
    assert!(r.iter().filter(|&&(s, _, _)| s >= 1).all(|&(_, _, n)| n == 0));
    assert!(r.iter().any(|&(s, _, n)| s == 0 && n > 0));
}

#[test]
fn compute_and_oracle_print_the_same_table() {
    let dir = tempfile::tempdir().unwrap();
    for m in ["sphere(-1)", "bv1(10)", "sphere(0)+sphere(1)"] {
        let a = destab(&["compute", "-m", m, "--s-max", "2", "--deg-max", "30"], dir.path());
        let b = destab(&["oracle", "-m", m, "--s-max", "2", "--deg-max", "30"], dir.path());
        assert!(a.status.success() && b.status.success(), "{m}");
        assert_eq!(a.stdout, b.stdout, "{m}");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compute", "-m", "bv1(12)", "--s-max", "3", "--deg-max", "40", "--show-matrices", "-o", "t.tsv"];
    assert!(destab(&args, dir.path()).status.success());
    let first = std::fs::read(dir.path().join("t.tsv")).unwrap();
    let first_m = std::fs::read(dir.path().join("t.tsv.matrices")).unwrap();
    assert!(destab(&args, dir.path()).status.success());
    assert_eq!(first, std::fs::read(dir.path().join("t.tsv")).unwrap());
    assert_eq!(first_m, std::fs::read(dir.path().join("t.tsv.matrices")).unwrap());
}

#[test]
fn matrix_dump_is_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let out = destab(&["compute", "-m", "sphere(-2)", "--deg-max", "20", "--show-matrices", "-o", "t.tsv"], dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("t.tsv.matrices")).unwrap();
    let keys: Vec<Vec<i64>> = text.lines().map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(!keys.is_empty());
    assert!(keys.iter().all(|k| k.len() == 5 && k[4] > 0 && k[4] < 3));
    assert!(keys.windows(2).all(|w| w[0][..4] < w[1][..4]));
}

#[test]
fn module_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for m in [bv1(3, 8).suspend(-2), sphere(3, 0).direct_sum(&sphere(3, 1))] {
        let path = dir.path().join("m.mod");
        std::fs::write(&path, m.to_text()).unwrap();
        let back = load_module(path.to_str().unwrap(), None, 30).unwrap();
        assert_eq!(back, m);
        assert_eq!(ModuleWindow::parse(&back.to_text()).unwrap(), m);
    }
}

#[test]
fn file_and_builtin_agree() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("b.mod"), bv1(3, 10).to_text()).unwrap();
    let a = destab(&["compute", "-m", "b.mod", "--deg-max", "30"], dir.path());
    let b = destab(&["compute", "-m", "bv1(10)", "--deg-max", "30"], dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn handwritten_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.mod"), "prime: 3\nwindow: 0 1\ngenerator: a 0\ngenerator: b 1\nbeta a = b\nbeta b = 0\n").unwrap();
    let out = destab(&["compute", "-m", "a.mod", "--deg-max", "20"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let code = |args: &[&str]| destab(args, d).status.code();
    assert_eq!(code(&["verify", "--suite", "invariants", "-p", "3"]), Some(0));
    assert_eq!(code(&["compute", "-m", "nosuch(1)"]), Some(2));
    assert_eq!(code(&["compute", "-m", "sphere(0)", "-p", "4"]), Some(2));
    assert_eq!(code(&["compute", "-m", "sphere(0)", "--s-max", "4"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    std::fs::write(d.join("bad.mod"), "prime: 3\nwindow: 0 8\ngenerator: a 0\ngenerator: b 4\ngenerator: c 8\nP 1 a = b\nP 1 b = c\n").unwrap();
    assert_eq!(code(&["compute", "-m", "bad.mod"]), Some(2));
    assert_eq!(code(&["compute", "-m", "sphere(0)", "--deg-max", "81"]), Some(3));
    assert_eq!(code(&["oracle", "-m", "sphere(0)", "-p", "5", "--deg-max", "61"]), Some(3));
    // the Dickson suite requires an unstable module
    assert_eq!(code(&["verify", "--suite", "dickson", "-m", "sphere(-1)"]), Some(1));
}

#[test]
fn degree_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_destab"))
        .args(["oracle", "-m", "sphere(0)", "--deg-max", "20"])
        .current_dir(dir.path())
        .env("DESTAB_DEGREE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failures_are_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = destab(&["verify", "--suite", "zarati", "-m", "sphere(-1)", "-o", "r.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let log = std::fs::read_to_string(dir.path().join("r.txt.failures.jsonl")).unwrap();
    assert!(!log.is_empty());
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for k in ["reason", "s", "degree", "witness"] {
            assert!(v.get(k).is_some(), "{k} missing in {line}");
        }
    }
    let report = std::fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert!(report.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn invariants_listing() {
    let dir = tempfile::tempdir().unwrap();
    let out = destab(&["invariants", "-p", "3", "--rank", "2", "--emit", "dickson"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("Q_2,0 = 1 * u{} v^("));
    let out = destab(&["invariants", "-p", "3", "--rank", "2", "--emit", "coproduct"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("psi_1,1(Q_2,0) = 1 * R{} Q^(3) ⊗ R{} Q^(1)"));
    let out = destab(&["invariants", "-p", "5", "--rank", "3", "--emit", "mui"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

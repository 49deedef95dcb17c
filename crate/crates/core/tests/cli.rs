use std::fs;
use std::path::Path;
use std::process::Command;

fn spmm(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_spmm"))
        .args(args)
        .env("SPMM_OUT", out)
        .output()
        .unwrap();
    let text =
        String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr);
    (o.status.code().unwrap(), text)
}

const HUMP: &str = "
method.scheme = proposed_avg
method.points = 65
method.dt = 0.1
method.t_end = 10
method.stride = 25
initial.family = hump
initial.v = 1
initial.xi = 0.25
run.label = hump
";

#[test]
fn run_then_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hump.txt");
    fs::write(&cfg, HUMP).unwrap();
    let (code, text) = spmm(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 0, "{text}");
    let art = dir.path().join("hump");
    for f in [
        "invariants.csv",
        "meta.txt",
        "plot.gp",
        "snapshots_0000.csv",
        "snapshots_0100.csv",
    ] {
        assert!(art.join(f).exists(), "{f}");
    }
    let snap = fs::read_to_string(art.join("snapshots_0000.csv")).unwrap();
    let row: Vec<f64> = snap
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    // base point of the hump starts at the crest u = 2√ξ/α = √2
    assert!((row[3] - 2f64.sqrt()).abs() < 0.05, "{row:?}");
    let (code, text) = spmm(&["invariants", art.to_str().unwrap()], dir.path());
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("H_d") && text.contains("PASS"));

    // rerunning the echoed configuration reproduces the invariants bit for bit
    let again = dir.path().join("again");
    fs::create_dir(&again).unwrap();
    let (code, _) = spmm(&["run", art.join("meta.txt").to_str().unwrap()], &again);
    assert_eq!(code, 0);
    assert_eq!(
        fs::read(art.join("invariants.csv")).unwrap(),
        fs::read(again.join("hump/invariants.csv")).unwrap()
    );
}

#[test]
fn gate_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hump.txt");
    fs::write(&cfg, HUMP.replace("t_end = 10", "t_end = 1")).unwrap();
    assert_eq!(spmm(&["run", cfg.to_str().unwrap()], dir.path()).0, 0);
    let inv = dir.path().join("hump/invariants.csv");
    let text = fs::read_to_string(&inv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut f: Vec<String> = lines[2].split(',').map(String::from).collect();
    f[1] = "-5".into();
    lines[2] = f.join(",");
    fs::write(&inv, lines.join("\n")).unwrap();
    let (code, text) = spmm(
        &["invariants", dir.path().join("hump").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code, 3, "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn config_errors_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(
        &cfg,
        HUMP.replace("proposed_avg", "multisymplectic")
            .replace("hump", "upright_loop"),
    )
    .unwrap();
    let (code, text) = spmm(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 4, "{text}");
    assert!(text.contains("multi-valued"));
    fs::write(&cfg, "method.points = 9\n").unwrap();
    assert_eq!(spmm(&["run", cfg.to_str().unwrap()], dir.path()).0, 4);
}

#[test]
fn solver_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hard.txt");
    fs::write(
        &cfg,
        format!("{HUMP}\nsolver.max_iter = 1\nsolver.tol = 1e-300\n"),
    )
    .unwrap();
    let (code, text) = spmm(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 2, "{text}");
}

#[test]
fn convergence_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hump.txt");
    fs::write(&cfg, HUMP.replace("t_end = 10", "t_end = 1")).unwrap();
    let (code, text) = spmm(
        &["convergence", cfg.to_str().unwrap(), "--levels", "2"],
        dir.path(),
    );
    assert_eq!(code, 0, "{text}");
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("129"));
}

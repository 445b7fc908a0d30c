use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polarkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn polarkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarkit")).args(args).output().unwrap()
}

fn run(spec: &str, amps: &str, out: &Path, extra: &[&str]) -> Output {
    let (spec, amps) = (data(spec), data(amps));
    let mut args =
        vec!["run", "--spec", spec.to_str().unwrap(), "--amps", amps.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    polarkit(&args)
}

fn validate(spec: &str, amps: &str) -> (i32, String) {
    let (spec, amps) = (data(spec), data(amps));
    let o = polarkit(&["validate", "--spec", spec.to_str().unwrap(), "--amps", amps.to_str().unwrap()]);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

fn summary(out: &Path) -> Vec<(String, String)> {
    let text = std::fs::read_to_string(
        out.with_file_name(format!("{}.summary.csv", out.file_stem().unwrap().to_str().unwrap())),
    )
    .unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn lookup<'a>(s: &'a [(String, String)], key: &str) -> Option<&'a str> {
    s.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

#[test]
fn photoionization_run_has_a_row_per_degree() {
    let out = scratch("pi.csv");
    let o = run("pi.spec.json", "toy.amps.json", &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "theta_deg,phi_deg,value");
    assert_eq!(lines.len(), 182);
    assert!(lines[181].starts_with("1.8000000000000000e2,3.0000000000000000e1,"));
    let s = summary(&out);
    assert!(lookup(&s, "beta").is_some());
    let sigma: f64 = lookup(&s, "sigma").unwrap().parse().unwrap();
    let integrated: f64 = lookup(&s, "integrated").unwrap().parse().unwrap();
    assert!((sigma - integrated).abs() <= 1e-12 * sigma);
}

#[test]
fn oracle_cross_check_passes() {
    let out = scratch("pi-oracle.csv");
    let o = run("pi.spec.json", "toy.amps.json", &out, &["--oracle", "--tol", "1e-10", "--grid-deg", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("theta_deg,phi_deg,value,oracle,rel_dev\r\n"));
    let dev: f64 = lookup(&summary(&out), "max_rel_dev").unwrap().parse().unwrap();
    assert!(dev < 1e-10);
}

#[test]
fn cascade_reports_alignment() {
    let out = scratch("cascade.csv");
    let o = run("cascade.spec.json", "toy.amps.json", &out, &["--oracle", "--grid-deg", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(lookup(&s, "process"), Some("photoionization+auger"));
    assert!(lookup(&s, "A2").is_some());
    assert!(lookup(&s, "auger_beta").is_some());
}

#[test]
fn energy_window_adds_a_column() {
    let out = scratch("pi-energy.csv");
    let o = run("pi.spec.json", "toy.amps.json", &out, &["--grid-deg", "90", "--energies", "1.5:2.5:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "theta_deg,phi_deg,energy,value");
    assert_eq!(lines.len(), 1 + 3 * 3);
}

#[test]
fn malformed_amplitudes_exit_two_naming_the_line() {
    let o = run("pi.spec.json", "bad.amps.json", &scratch("bad.csv"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn usage_errors_exit_two() {
    let o = run("pi.spec.json", "toy.amps.json", &scratch("grid.csv"), &["--grid-deg", "7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = polarkit(&["run", "--spec", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_one() {
    let o = run("pi.spec.json", "toy.amps.json", Path::new("/nonexistent-dir/out.csv"), &["--grid-deg", "90"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn physics_errors_exit_three() {
    let o = run("pi.spec.json", "toy.amps.json", &scratch("neg.csv"), &["--grid-deg", "90", "--energies", "0:0:1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn validate_complete_table() {
    let (code, report) = validate("pi.spec.json", "toy.amps.json");
    assert_eq!(code, 0);
    assert!(report.starts_with("5 needed, 0 missing"), "{report}");
    assert!(report.contains("ranks: level `i` (J=3/2): K <= 3"));
}

#[test]
fn validate_names_missing_channel() {
    let (code, report) = validate("pi.spec.json", "missing.amps.json");
    assert_eq!(code, 0);
    assert!(report.contains("1 missing"), "{report}");
    assert!(report.contains("channel `d3`: (lambda=2, j=3/2, J=1, k=1)"), "{report}");
}

#[test]
fn validate_warns_about_truncation() {
    let (_, report) = validate("pi.spec.json", "toy.amps.json");
    assert!(report.contains("warning: k_max truncation dropped 1 amplitude(s)"), "{report}");
    assert!(report.contains("channel d5q, M2"));
}

#[test]
fn output_is_byte_identical_across_threads() {
    let a = scratch("det-a.csv");
    let b = scratch("det-b.csv");
    let c = scratch("det-c.csv");
    for (out, threads) in [(&a, "1"), (&b, "8"), (&c, "8")] {
        let o = run("cascade.spec.json", "toy.amps.json", out, &["--threads", threads, "--grid-deg", "2", "--oracle"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |p: &PathBuf| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&b), read(&c));
}

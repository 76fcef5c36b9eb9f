use std::path::Path;
use std::process::{Command, Output};

fn maj_ent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maj-ent"))
        .args(args)
        .env_remove("MAJ_ENT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = maj_ent(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn ent_prints_known_values() {
    assert!(stdout(&["ent", "w:3"]).starts_with("Eg = 1.169925001\n"));
    assert!(stdout(&["ent", "ghz:3"]).starts_with("Eg = 1.000000000\n"));
    assert!(stdout(&["ent", "icosahedron"]).starts_with("Eg = 3.117457582\n"));
    assert!(stdout(&["ent", "dicke:6:3"]).starts_with("Eg = 1.678071905\n"));
}

#[test]
fn points_and_state_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("p.json");
    let st = dir.path().join("s.json");
    stdout(&["points", "dicke:5:2", "--out", pts.to_str().unwrap()]);
    stdout(&["state", pts.to_str().unwrap(), "--out", st.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&st).unwrap()).unwrap();
    assert_eq!(json["n"], 5);
    let amps = json["amps"].as_array().unwrap();
    let expected = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    for (a, e) in amps.iter().zip(expected) {
        assert!((a[0].as_f64().unwrap().abs() - e).abs() < 1e-9);
        assert!(a[1].as_f64().unwrap().abs() < 1e-9);
    }
    assert_eq!(json["manifest"]["command"], "state");
    assert_eq!(json["manifest"]["rng_seed"], 42);
}

#[test]
fn exit_codes() {
    assert_eq!(maj_ent(&["verify", "--suite", "dicke"]).status.code(), Some(0));
    assert_eq!(
        maj_ent(&["verify", "--suite", "dicke", "--corrupt"]).status.code(),
        Some(1)
    );
    assert_eq!(maj_ent(&["ent", "/does/not/exist.json"]).status.code(), Some(2));
    assert_eq!(maj_ent(&["dicke", "--n", "3", "--k", "9"]).status.code(), Some(2));
    assert_eq!(maj_ent(&["ent", "w:3", "--n-starts", "3"]).status.code(), Some(2));
    assert_eq!(
        maj_ent(&["table", "--n-min", "13", "--n-max", "14"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 3, "amps": [[1, 0]]}"#).unwrap();
    assert_eq!(maj_ent(&["ent", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        stdout(&[
            "cpps",
            "octahedron",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        std::fs::read(path).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "1");
    let c = run("c.json", "2");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let s1 = stdout(&["search", "--n", "4", "--restarts", "4", "--json", "--seed", "7"]);
    let s2 = stdout(&["search", "--n", "4", "--restarts", "4", "--json", "--seed", "7"]);
    assert_eq!(s1, s2);
}

#[test]
fn timing_is_opt_in() {
    let plain = stdout(&["--json", "bounds", "--n-max", "3"]);
    assert!(!plain.contains("wall_time_ms"));
    let timed = stdout(&["--json", "--timing", "bounds", "--n-max", "3"]);
    assert!(timed.contains("wall_time_ms"));
}

#[test]
fn amplitude_grid_csv_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    stdout(&[
        "amplitude-grid",
        "tetrahedron",
        "--n-theta",
        "5",
        "--n-phi",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta,phi,f"));
    assert_eq!(lines.count(), 20);
    let sidecar = Path::new(&format!("{}.manifest.json", path.display())).to_path_buf();
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert_eq!(manifest["command"], "amplitude-grid");
    assert_eq!(manifest["config"]["n_theta"], 5);
}

#[test]
fn thread_flag_overrides_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_maj-ent"))
        .args(["--threads", "1", "dicke", "--n", "2"])
        .env("MAJ_ENT_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_maj-ent"))
        .args(["dicke", "--n", "2"])
        .env("MAJ_ENT_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_reports_status_against_reference() {
    let out = stdout(&["table", "--n-min", "4", "--n-max", "4", "--restarts", "12"]);
    assert!(out.lines().nth(1).unwrap().contains("OK"), "{out}");
}

use std::fs;
use std::path::Path;
use std::process::Command;

use b4nl_runner::{parse_config, run_scenario, RunError, RunOptions};

fn run(text: &str, out: &Path) -> Result<b4nl_runner::RunSummary, RunError> {
    run_scenario(&parse_config(text).unwrap(), &RunOptions { out: out.to_path_buf(), seed: None })
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

/// Data rows of a CSV, skipping the `#` footer.
fn column(dir: &Path, file: &str, name: &str) -> Vec<f64> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(dir.join(file)).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse().unwrap()).collect()
}

const EVOLVE: &str = r#"{"kind": "evolve",
    "grid": {"extents": [20.0], "points": [128]},
    "integrator": {"dt": 0.01, "t_end": 0.5},
    "initial": {"gaussian": {"phase_velocity": [0.3]}},
    "observables": ["mass", "energy", {"local_mass": {"center": [0.0], "radius": 2.0}}],
    "output": {"record_every": 5, "snapshot_every": 25}}"#;

#[test]
fn evolve_writes_observables_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run(EVOLVE, dir.path()).unwrap();
    let names: Vec<&str> = summary.files.iter().map(|f| f.path.as_str()).collect();
    assert_eq!(
        names,
        ["config.json", "observables.csv", "snapshot_00000000.b4nl", "snapshot_00000025.b4nl", "snapshot_00000050.b4nl", "final.b4nl"]
    );
    let header = fs::read_to_string(dir.path().join("observables.csv")).unwrap();
    assert!(header.starts_with("t,mass,energy,\"local_mass[x0,R]\"\n"));
    let t = column(dir.path(), "observables.csv", "t");
    assert_eq!(t.len(), 11);
    assert_eq!(t[10], 0.5);
    let mass = column(dir.path(), "observables.csv", "mass");
    assert!(mass.iter().all(|m| (m - mass[0]).abs() < 1e-10 * mass[0]));
    let last = b4nl::snapshot::read(dir.path().join("final.b4nl")).unwrap();
    let mid = b4nl::snapshot::read(dir.path().join("snapshot_00000050.b4nl")).unwrap();
    assert_eq!(last.values(), mid.values());

    let m = manifest(dir.path());
    assert_eq!(m["status"], "ok");
    assert_eq!(m["kind"], "evolve");
    assert_eq!(m["versions"]["b4nl"], b4nl::VERSION);
    assert_eq!(m["files"].as_array().unwrap().len(), 6);
    assert_eq!(m["observables"][2]["local_mass"]["radius"], 2.0);
    let cfg_hash = m["config_hash"].as_str().unwrap();
    assert_eq!(m["files"][0]["sha256"].as_str().unwrap(), cfg_hash);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let text = r#"{"kind": "inequality", "grid": {"extents": [30.0], "points": [64]},
        "initial": {"random": {"seed": 11}},
        "study": {"ensemble_size": 6, "test": {"interaction_morawetz": {}}}}"#;
    run(text, a.path()).unwrap();
    run(text, b.path()).unwrap();
    for f in ["config.json", "inequality.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    run(EVOLVE, a.path()).unwrap();
    run(EVOLVE, b.path()).unwrap();
    for f in ["observables.csv", "final.b4nl"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(
        r#"{"kind": "inequality", "grid": {"extents": [30.0], "points": [64]},
        "initial": {"random": {"seed": 1}},
        "study": {"ensemble_size": 3, "test": {"square_function": {}}}}"#,
    )
    .unwrap();
    run_scenario(&cfg, &RunOptions { out: dir.path().to_path_buf(), seed: Some(40) }).unwrap();
    assert_eq!(manifest(dir.path())["seeds"], serde_json::json!([40, 41, 42]));
    let seeds = column(dir.path(), "inequality.csv", "seed");
    assert_eq!(seeds, vec![40.0, 41.0, 42.0]);
    assert!(fs::read_to_string(dir.path().join("config.json")).unwrap().contains("\"seed\": 40"));
}

#[test]
fn zero_data_has_zero_mass_column() {
    let dir = tempfile::tempdir().unwrap();
    run(
        r#"{"kind": "evolve", "grid": {"extents": [10.0, 10.0], "points": [16, 16]},
        "integrator": {"dt": 0.05, "t_end": 0.2}, "initial": "zero", "observables": ["mass", "energy"]}"#,
        dir.path(),
    )
    .unwrap();
    let mass = column(dir.path(), "observables.csv", "mass");
    assert_eq!(mass.len(), 5);
    assert!(mass.iter().all(|&m| m == 0.0));
    assert!(column(dir.path(), "observables.csv", "energy").iter().all(|&e| e == 0.0));
}

/// A box far too small for the requested times: the wrap-around guard fires.
const LEAKY: &str = r#"{"kind": "decay", "grid": {"extents": [20.0], "points": [128]},
    "initial": {"gaussian": {"width": 1.0}}, "study": {"times": [5, 10]}}"#;

#[test]
fn contract_failures_are_reported_in_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let err = run(
        LEAKY,
        dir.path(),
    )
    .unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let m = manifest(dir.path());
    assert_eq!(m["status"], "failed");
    assert_eq!(m["error"]["category"], "contract");
    assert!(m["error"]["message"].as_str().unwrap().contains("window"));
    assert_eq!(m["files"].as_array().unwrap().len(), 1);
}

#[test]
fn study_outputs_carry_fit_footers() {
    let dir = tempfile::tempdir().unwrap();
    run(
        r#"{"kind": "decay", "grid": {"extents": [400.0], "points": [2048]},
        "initial": {"gaussian": {"width": 1.4}}, "study": {"times": [2, 4, 8]}}"#,
        dir.path(),
    )
    .unwrap();
    let text = fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    for key in ["# slope: ", "# intercept: ", "# residual: ", "# window: [2, 8]", "# points: 3", "# max_leak: "] {
        assert!(text.contains(key), "missing {key}");
    }
    assert_eq!(column(dir.path(), "decay.csv", "t"), vec![2.0, 4.0, 8.0]);
}

#[test]
fn illposed_run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    run(r#"{"kind": "illposed", "study": {"dimensions": [10], "epsilon": ["1e-2"], "nu": ["1e-3"]}}"#, dir.path()).unwrap();
    let reports: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("illposed.json")).unwrap()).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 1);
    // λ^{n−8} = ε^{−2}ν^{−(n−4)} = 10^{4+18}, so log₁₀ λ = 11.
    assert_eq!(reports[0]["lambda_log10"], "11");
    assert_eq!(reports[0]["identity_lambda"], true);
    let text = fs::read_to_string(dir.path().join("illposed.csv")).unwrap();
    assert!(text.starts_with("n,epsilon,nu,t_nu,lambda_log10,"));
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_b4nl")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, EVOLVE).unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind": "evolve", "grid": {"extents": [10.0], "points": [0]}}"#).unwrap();
    let blow = dir.path().join("blow.json");
    fs::write(
        &blow,
        LEAKY,
    )
    .unwrap();
    let out = dir.path().join("out");
    let (g, b, x, o) = (good.to_str().unwrap(), bad.to_str().unwrap(), blow.to_str().unwrap(), out.to_str().unwrap());

    let v = cli(&["validate", "--config", g]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8(v.stdout).unwrap().contains("\"final_snapshot\": true"));
    assert!(!out.exists(), "validate must not run anything");

    let v = cli(&["validate", "--config", b]);
    assert_eq!(v.status.code(), Some(2));
    assert!(String::from_utf8(v.stderr).unwrap().contains("grid.points"));

    assert_eq!(cli(&["validate", "--config", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(cli(&["decay", "--config", g, "--out", o]).status.code(), Some(2));
    assert_eq!(cli(&["--threads", "2", "evolve", "--config", g, "--out", o]).status.code(), Some(0));
    assert_eq!(manifest(&out)["threads"], 2);
    assert_eq!(cli(&["decay", "--config", x, "--out", o]).status.code(), Some(1));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (
            "evolve",
            r#"{"kind": "evolve", "grid": {"extents": [20.0, 20.0], "points": [32, 32]},
            "integrator": {"dt": 0.01, "t_end": 0.1},
            "initial": {"random": {"seed": 5, "max_mode": 6}},
            "observables": ["mass", "energy", "h2", "int_morawetz"]}"#,
            vec!["observables.csv", "final.b4nl"],
        ),
        (
            "inequality",
            r#"{"kind": "inequality", "grid": {"extents": [30.0], "points": [128]},
            "initial": {"random": {"seed": 9}}, "study": {"ensemble_size": 5}}"#,
            vec!["inequality.csv"],
        ),
    ];
    for (kind, text, files) in configs {
        let cfg = dir.path().join(format!("{kind}.json"));
        fs::write(&cfg, text).unwrap();
        let outs: Vec<_> = ["1", "3"]
            .iter()
            .map(|t| {
                let out = dir.path().join(format!("{kind}-{t}"));
                let status = cli(&["--threads", t, kind, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
                assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
                out
            })
            .collect();
        for f in files {
            assert_eq!(fs::read(outs[0].join(f)).unwrap(), fs::read(outs[1].join(f)).unwrap(), "{kind}/{f}");
        }
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinmodes")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

const PINNED: &str = r#"
seed = 3
[geometry]
n_atoms = 2000
j = 0.816496580927726
[state]
kind = "dicke"
n = 1
[wigner]
grid = "-4:4:41,-4:4:41"
"#;

#[test]
fn params_standing_wave_against_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = 5\n[geometry]\nn_atoms = 200000\nspin = 0.5\n");
    let o = run(&["params", "--config", &cfg, "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    let j = v["j"].as_f64().unwrap();
    // sampling error of J at 2e5 atoms is about 6e-4
    assert!((j - (2.0f64 / 3.0).sqrt()).abs() < 3e-3, "{j}");
    let n_e = v["preparation"]["n_eff"].as_f64().unwrap();
    assert!((n_e / 200000.0 - 2.0 / 3.0).abs() < 5e-3);
    assert_eq!(v["metadata"]["seed"], 5);
}

#[test]
fn params_identical_modes_and_gaussian_moments() {
    let dir = tempfile::tempdir().unwrap();
    let same = write(
        dir.path(),
        "same.toml",
        "[geometry]\npreparation = { kind = \"uniform\" }\nreadout = { kind = \"uniform\" }\n",
    );
    let v = json(&run(&["params", "--config", &same, "--json"]));
    assert_eq!(v["j"].as_f64().unwrap(), 1.0);

    let gauss = write(
        dir.path(),
        "g.toml",
        r#"
[geometry]
n_atoms = 400000
spin = 0.5
preparation = { kind = "gaussian_beam", waist = 2.0 }
readout = { kind = "uniform" }
cloud = { kind = "gaussian_radial", sigma_r = 1.0 }
"#,
    );
    let v = json(&run(&["params", "--config", &gauss, "--json"]));
    let p = &v["preparation"];
    assert!((p["mean_eta"].as_f64().unwrap() - 0.5).abs() < 3e-3);
    assert!((p["mean_eta_sq"].as_f64().unwrap() - 1.0 / 3.0).abs() < 3e-3);
    assert!((p["n_eff"].as_f64().unwrap() / 400000.0 - 0.75).abs() < 1e-2);
}

#[test]
fn wigner_outputs_and_origin_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(dir.path(), "c.toml", PINNED);
    let o = run(&["wigner", "--config", &cfg, "--out", out.to_str().unwrap(), "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert!((v["origin"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-9);
    assert!((v["minimum"]["value"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-9);
    assert!((v["normalization"].as_f64().unwrap() - 1.0).abs() < 1e-3);

    let csv = fs::read_to_string(out.join("wigner.csv")).unwrap();
    let hash = v["metadata"]["config_sha256"].as_str().unwrap();
    assert!(csv.starts_with("# tool: spinmodes "));
    assert!(csv.contains(&format!("# config_sha256: {hash}")));
    assert!(csv.contains("# seed: 3"));
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "x,p,W");
    assert_eq!(data.len(), 1 + 41 * 41);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["origin"], v["origin"]);

    // J = 1 through the override
    let cfg1 = write(dir.path(), "c1.toml", &PINNED.replace("j = 0.816496580927726", "j = 1.0"));
    let v = json(&run(&["wigner", "--config", &cfg1, "--out", out.to_str().unwrap(), "--json"]));
    assert!((v["origin"].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn config_round_trips_through_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(dir.path(), "c.toml", PINNED);
    let v = json(&run(&["wigner", "--config", &cfg, "--out", out.to_str().unwrap(), "--json"]));
    // the resolved config written next to the outputs re-runs to the same hash
    let resolved = out.join("config.toml");
    let again = json(&run(&["wigner", "--config", resolved.to_str().unwrap(), "--out", out.to_str().unwrap(), "--json"]));
    assert_eq!(v["metadata"]["config_sha256"], again["metadata"]["config_sha256"]);
    assert_eq!(v["config"], again["config"]);
    assert_eq!(v["origin"], again["origin"]);
    // the config embedded in the JSON report converts back to the same TOML
    let from_report: toml::Value = serde_json::from_value(v["config"].clone()).unwrap();
    let text = toml::to_string(&from_report).unwrap();
    let rerun_cfg = write(dir.path(), "from_report.toml", &text);
    let third = json(&run(&["wigner", "--config", &rerun_cfg, "--out", out.to_str().unwrap(), "--json"]));
    assert_eq!(third["metadata"]["config_sha256"], v["metadata"]["config_sha256"]);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = 1\n");
    let a = json(&run(&["params", "--config", &cfg, "--json"]));
    let b = json(&run(&["params", "--config", &cfg, "--seed", "2", "--json"]));
    let c = json(&run(&["params", "--config", &cfg, "--seed", "2", "--json"]));
    assert_eq!(b["metadata"]["seed"], 2);
    assert_ne!(a["j"], b["j"]);
    assert_eq!(b["j"], c["j"]);
    assert_ne!(a["metadata"]["config_sha256"], b["metadata"]["config_sha256"]);
}

#[test]
fn grid_flag_and_cat_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "c.toml",
        "[geometry]\nj = 1.0\n[state]\nkind = \"cat\"\nm = 5\n[wigner.sweep]\nj_min = 0.0\nj_max = 1.0\npoints = 21\n",
    );
    let o = run(&["wigner", "--config", &cfg, "--grid", "-9:9:19,-9:9:19", "--out", out.to_str().unwrap(), "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["grid"]["nx"], 19);
    assert!((v["origin"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    let csv = fs::read_to_string(out.join("origin_vs_j.csv")).unwrap();
    let w: Vec<f64> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(w.len(), 21);
    assert!((w[0] - 1.0).abs() < 1e-12 && (w[20] + 1.0).abs() < 1e-12);
    assert!(w.windows(2).all(|p| p[1] <= p[0] + 1e-12));
}

#[test]
fn gain_csv_ordering_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(dir.path(), "c.toml", "[gain]\ns = 1000.0\npoints = 50\n");
    let o = run(&["gain", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("gain.csv")).unwrap();
    assert!(csv.contains("# s: 1000"));
    let rows: Vec<Vec<String>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 4 * 50);
    let curve = |label: &str| -> Vec<f64> {
        rows.iter().filter(|r| r[3] == label).map(|r| r[2].parse().unwrap()).collect()
    };
    let (g15, g10, g5, bound) = (curve("15dB"), curve("10dB"), curve("5dB"), curve("bound"));
    assert!(g15[49] > g10[49] && g10[49] > g5[49]);
    for c in [&g15, &g10, &g5] {
        assert!(c.iter().zip(&bound).all(|(g, b)| g <= b));
    }
    // J = 1 endpoints: gain equals the input squeezing relative to S/2 noise
    assert!((g5[49] - (5.0 + 10.0 * 2f64.log10())).abs() < 1e-9);
}

#[test]
fn thermal_budget() {
    let o = run(&["thermal", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    let t = v["t_max_kelvin"].as_f64().unwrap();
    assert!((t - 47.99e-9).abs() < 0.01e-9);
    let dir = tempfile::tempdir().unwrap();
    let both = write(dir.path(), "t.toml", "[thermal]\ntrap_depth_hz = 1e6\ntrap_depth_kelvin = 1e-3\n");
    let o = run(&["thermal", "--config", &both]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("t.toml:3: thermal.trap_depth_kelvin"), "{}", stderr(&o));
}

#[test]
fn validation_errors_exit_one_with_lines() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "seed = 1\n\n[geometry]\nnatoms = 3\n");
    let o = run(&["params", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("u.toml:4:"), "{}", stderr(&o));
    assert!(stderr(&o).contains("natoms"));

    let bad_grid = write(dir.path(), "g.toml", "[wigner]\ngrid = \"-4:4:2\"\n");
    let o = run(&["wigner", "--config", &bad_grid, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("g.toml:2: wigner.grid"), "{}", stderr(&o));

    let bad_state = write(dir.path(), "s.toml", "[state]\nkind = \"cat\"\nm = 4\ncutoff = 3\n");
    let o = run(&["wigner", "--config", &bad_state, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("s.toml:3: state.m"), "{}", stderr(&o));

    let o = run(&["params", "--config", "/nonexistent/x.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["params", "--grid", "-1:1:3,-1:1:3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_report_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // small sizes keep the run short; the exit code follows the records
    let cfg = write(dir.path(), "v.toml", "seed = 9\n[verify]\nn_min = 4\nn_max = 7\nsamples = 4\n");
    let o = run(&["verify", "--config", &cfg, "--out", out.to_str().unwrap(), "--json"]);
    let v = json(&o);
    let records = v["records"].as_array().unwrap();
    assert!(records.len() >= 10);
    for r in records {
        for key in ["check", "parameters", "residual", "tolerance", "pass"] {
            assert!(r.get(key).is_some(), "{key} missing");
        }
    }
    let all_pass = records.iter().all(|r| r["pass"].as_bool().unwrap());
    assert_eq!(v["pass"].as_bool().unwrap(), all_pass);
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 2 }));
    let exact = records.iter().find(|r| r["check"] == "commutation_identity_css").unwrap();
    assert!(exact["pass"].as_bool().unwrap());
    let saved: Value = serde_json::from_str(&fs::read_to_string(out.join("verify_report.json")).unwrap()).unwrap();
    assert_eq!(saved["records"], v["records"]);

    let bad = write(dir.path(), "b.toml", "[verify]\nn_min = 8\nn_max = 7\n");
    let o = run(&["verify", "--config", &bad]);
    assert_eq!(o.status.code(), Some(1));
}

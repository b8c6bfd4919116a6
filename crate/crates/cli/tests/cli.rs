use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn motkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motkit")).args(args).env_remove("MOTKIT_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

#[test]
fn params_json_record() {
    let v = json(&motkit(&["params", "--gamma", "1.0", "--format", "json"]));
    assert_eq!(v["Q"].as_f64().unwrap(), 2.5);
    assert_eq!(v["kappa_prime"].as_f64().unwrap(), 16.0);
    assert_eq!(v["manifest"]["command"], "params");
    assert_eq!(v["manifest"]["parameters"]["gamma"], 1.0);
    assert!(v["manifest"]["seed"].is_null());
}

#[test]
fn ptheta_table_with_manifest_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = motkit(&["ptheta", "table", "--gamma", "1.0", "--steps", "181", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let (head, rows) = read_csv(&out);
    assert_eq!(head, ["theta", "p", "c", "wL", "wR", "inversion_rate"]);
    assert_eq!(rows.len(), 181);
    let row = &rows[120];
    let theta: f64 = row[0].parse().unwrap();
    assert!((theta - std::f64::consts::PI / 6.0).abs() < 1e-14);
    let p: f64 = row[1].parse().unwrap();
    assert!((p - 0.414_213_6).abs() < 1e-7);
    assert!(rows.iter().flatten().all(|c| c.parse::<f64>().unwrap().is_finite()));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("curve.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "ptheta table");
    assert_eq!(m["parameters"]["steps"], 181);
    for k in ["versions", "started", "finished"] {
        assert!(m[k].is_string(), "{k}");
    }
}

#[test]
fn invert_round_trips() {
    let v = json(&motkit(&["ptheta", "invert", "--gamma", "1", "--p", "0.41421356237309503", "--format", "json"]));
    assert!((v["theta"].as_f64().unwrap() - std::f64::consts::PI / 6.0).abs() < 1e-10);
}

#[test]
fn crosscheck_in_degrees_leaves_inadmissible_side_empty() {
    let o = motkit(&["ptheta", "pc-crosscheck", "--gamma", "1", "--theta", "-30", "--degrees"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let head: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let row: Vec<String> = r.records().next().unwrap().unwrap().iter().map(String::from).collect();
    let col = |n: &str| &row[head.iter().position(|h| h == n).unwrap()];
    let l: f64 = col("pc_lcft").parse().unwrap();
    assert!((l / std::f64::consts::SQRT_2 - 1.0).abs() < 1e-7);
    assert_eq!(col("qc_lcft"), "");
}

#[test]
fn exit_codes() {
    // γ outside (0, 2)
    assert_eq!(motkit(&["params", "--gamma", "2.5"]).status.code(), Some(2));
    // Seiberg bounds fail before any sampling
    let o = motkit(&["gmc", "moment", "--gamma", "1", "--betas", "2,1,0.5", "--reps", "10"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    // Γ_b at its pole is a numerical failure
    assert_eq!(motkit(&["specfun", "gammab", "--b", "0.7", "--z", "0"]).status.code(), Some(3));
    // unknown flag, missing value, wrong list length
    assert_eq!(motkit(&["params", "--bogus"]).status.code(), Some(2));
    assert_eq!(motkit(&["params"]).status.code(), Some(2));
    assert_eq!(motkit(&["specfun", "barh", "--gamma", "1", "--betas", "2,2"]).status.code(), Some(2));
    assert_eq!(motkit(&["--help"]).status.code(), Some(0));
    // unwritable destination
    assert_eq!(motkit(&["params", "--gamma", "1", "--out", "/nonexistent/dir/x.csv"]).status.code(), Some(1));
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "gamma = 1.2\nsteps = 7\n[ptheta.table]\nsteps = 11\n").unwrap();
    let c = cfg.to_str().unwrap();
    let out = dir.path().join("t.csv");
    let o = out.to_str().unwrap();

    assert_eq!(motkit(&["ptheta", "table", "--config", c, "--out", o]).status.code(), Some(0));
    assert_eq!(read_csv(&out).1.len(), 11);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["parameters"]["gamma"], 1.2);
    assert_eq!(m["parameters"]["steps"], 11);

    assert_eq!(motkit(&["ptheta", "table", "--config", c, "--steps", "5", "--out", o]).status.code(), Some(0));
    assert_eq!(read_csv(&out).1.len(), 5);

    // the top-level value applies where no section overrides it
    let v = json(&motkit(&["params", "--config", c, "--format", "json"]));
    assert_eq!(v["gamma"].as_f64().unwrap(), 1.2);

    std::fs::write(&cfg, "gamma = [").unwrap();
    assert_eq!(motkit(&["params", "--config", c]).status.code(), Some(2));
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["mc", "skew", "--p", "0.3", "--steps", "100", "--reps", "300", "--seed", "4", "--format", "json"];
    let a = json(&motkit(&args));
    let b = json(&motkit(&args));
    assert_eq!(a["positive_fraction"], b["positive_fraction"]);
    assert_eq!(a["local_time_mean"], b["local_time_mean"]);
    assert_eq!(a["n"], 300);
    assert_eq!(a["manifest"]["seed"], 4);
    // worker count does not change the result
    let c = Command::new(env!("CARGO_BIN_EXE_motkit")).args(args).env("MOTKIT_THREADS", "1").output().unwrap();
    assert_eq!(json(&c)["positive_fraction"], a["positive_fraction"]);
    let other = json(&motkit(&["mc", "skew", "--p", "0.3", "--steps", "100", "--reps", "300", "--seed", "5", "--format", "json"]));
    assert_ne!(other["local_time_mean"], a["local_time_mean"]);
}

#[test]
fn raw_rows_and_t1() {
    let o = motkit(&["mc", "t1", "--reps", "50", "--raw", "--dt", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 51);
    let v = json(&motkit(&["mc", "t1", "--reps", "2000", "--lambdas", "0.5,1", "--format", "json"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[1]["exact"].as_f64().unwrap() - (-(2f64).sqrt()).exp()).abs() < 1e-15);
}

#[test]
fn permuton_and_inversion_rate() {
    let o = motkit(&["mc", "permuton", "--rho", "-0.5", "--q", "0.5", "--steps", "400", "--k", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 21);
    let v = json(&motkit(&[
        "mc", "inversion-rate", "--rho", "-0.5", "--q", "0.5", "--steps", "400", "--k", "20", "--reps", "4", "--format", "json",
    ]));
    assert!((v["theory"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["n"], 4);
    assert_eq!(motkit(&["mc", "permuton", "--rho", "-0.5", "--q", "0.5", "--steps", "400", "--k", "0"]).status.code(), Some(2));
}

#[test]
fn gmc_sample_writes_binary_field() {
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("f.bin");
    let o = motkit(&[
        "gmc", "sample", "--gamma", "1", "--betas", "2,2,2", "--grid", "64", "--half-width", "4", "--seed", "3", "--binary",
        bin.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 65);
    let f = motkit::gmcfield::read_field(std::fs::File::open(&bin).unwrap()).unwrap();
    assert_eq!(f.values.len(), 64);
    assert_eq!(f.grid.half_width, 4.0);
}

#[test]
fn gmc_moment_reports_oracle_at_natural_power() {
    let v = json(&motkit(&[
        "gmc", "moment", "--gamma", "1", "--betas", "2,2,2", "--grid", "128", "--half-width", "4", "--reps", "64", "--format",
        "json",
    ]));
    assert_eq!(v["power"].as_f64().unwrap(), -1.0);
    assert!((v["oracle"].as_f64().unwrap() - 0.114_237).abs() < 1e-6);
    let v = json(&motkit(&[
        "gmc", "moment", "--gamma", "1", "--betas", "2,2,2", "--grid", "128", "--half-width", "4", "--reps", "64", "--power",
        "-0.5", "--format", "json",
    ]));
    assert!(v["oracle"].is_null());
}

#[test]
fn sle_commands() {
    let o = motkit(&["sle", "threshold", "--reps", "3", "--horizon", "0.5", "--dt", "0.01", "--collision-tol", "1e-4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 4);
    let v = json(&motkit(&["sle", "farfield", "--t", "1", "--format", "json"]));
    assert!(v["error"].as_f64().unwrap() < 1e-3);
    let o = motkit(&["sle", "threshold", "--kappa", "2", "--force", "left:0-:-1", "--force", "right:1:0.5", "--reps", "2", "--horizon", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(motkit(&["sle", "threshold", "--kappa", "2", "--force", "up:0:1"]).status.code(), Some(2));
}

#[test]
fn selfcheck_passes() {
    let o = motkit(&["selfcheck"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn json_floats_round_trip_bit_exactly() {
    let v = json(&motkit(&["params", "--gamma", "0.7", "--format", "json"]));
    let p = motkit::ptheta::lqg_params(0.7).unwrap();
    assert_eq!(v["a"].as_f64().unwrap().to_bits(), p.a.to_bits());
    assert_eq!(v["chi_ig"].as_f64().unwrap().to_bits(), p.chi_ig.to_bits());
}

use std::process::{Command, Output};

fn flp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flp")).args(args).output().expect("flp runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("flp-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn periodic_example5() {
    let o = flp(&["periodic", "examples/example5.json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n_crossing"], 0);
    assert_eq!(v["n_sliding"], 2);
    assert_eq!(v["configuration"]["tag"], "F2A_a");
}

#[test]
fn periodic_is_deterministic() {
    let a = flp(&["periodic", "example7"]);
    let b = flp(&["periodic", "example7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn zero_normal_is_malformed_input() {
    let p = write_temp(
        "zero.json",
        r#"{"A_plus":[[1,0],[0,1]],"b_plus":[0,1],"A_minus":[[1,0],[0,1]],"b_minus":[0,1],"c":[0,0]}"#,
    );
    let o = flp(&["classify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0,0)"));
    let _ = std::fs::remove_file(p);
}

#[test]
fn unreadable_json_is_malformed_input() {
    let p = write_temp("broken.json", "{\"A_plus\": [[1, 0]");
    assert_eq!(flp(&["periodic", p.to_str().unwrap()]).status.code(), Some(2));
    let _ = std::fs::remove_file(p);
}

#[test]
fn failed_analysis_exits_1() {
    let o = flp(&["canonical", "dry_friction"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn dfunc_example6_has_one_sign_change() {
    let o = flp(&["dfunc", "examples/example6.json", "--y-min", "0", "--y-max", "50", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["y", "P_R", "P_Linv", "D"]);
    let d: Vec<f64> = r.records().map(|row| row.unwrap()[3].parse().unwrap()).collect();
    assert_eq!(d.len(), 100);
    assert_eq!(d.windows(2).filter(|w| w[0] * w[1] < 0.0).count(), 1);
}

#[test]
fn orbit_csv_has_seventeen_digits() {
    let o = flp(&["orbit", "example1", "--x0", "1", "--y0", "-0.5", "--budget", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["t", "x", "y", "segment_kind"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert!(rows.len() > 10);
    let mantissa = rows[1][0].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
    assert_eq!(&rows[0][1], "1.0000000000000000e0");
    let kinds: std::collections::BTreeSet<&str> = rows.iter().map(|row| row.get(3).unwrap()).collect();
    assert!(kinds.contains("flow_right"));
}

#[test]
fn backward_orbit_runs_in_negative_time() {
    let o = flp(&["orbit", "example2", "--x0", "-1", "--y0", "0.5", "--backward", "--budget", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let t: Vec<f64> = r.records().map(|row| row.unwrap()[0].parse().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn sweep_rows_follow_the_range() {
    let o = flp(&["sweep", "rho_family", "--param", "rho", "--range", "-0.04:-0.03:5"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let v: Vec<f64> = r.records().map(|row| row.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(v.len(), 5);
    assert!(v.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(flp(&["sweep", "rho_family", "--param", "rho", "--range", "1:2"]).status.code(), Some(2));
    assert_eq!(flp(&["sweep", "rho_family", "--param", "nope", "--range", "1:2:3"]).status.code(), Some(2));
}

#[test]
fn survey_honours_the_seed_variable() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_flp")).args(["survey", "--n", "200"]).env("FLP_SEED", seed).output().unwrap()
    };
    let a: serde_json::Value = serde_json::from_slice(&run("5").stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&run("5").stdout).unwrap();
    assert_eq!(a, b);
    assert_eq!(a["seed"], 5);
    assert_eq!(a["n_systems"], 200);
}

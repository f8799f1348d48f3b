use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn isonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isonet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("isonet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn op_curve_with_simulation_is_byte_identical_across_runs() {
    let sc = scenario("fig1_alpha2_eta0.1.json");
    let args = ["op-curve", "--scenario", &sc, "--grid", "0:300:100", "--simulate", "--trials", "2000", "--seed", "11"];
    let a = isonet(&args);
    let b = isonet(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "y0,q_analytic,q_mc,ci_low,ci_high");
    assert_eq!(lines.len(), 2 + 4);
    let other_seed = isonet(&["op-curve", "--scenario", &sc, "--grid", "0:300:100", "--simulate", "--trials", "2000", "--seed", "12"]);
    assert_ne!(a.stdout, other_seed.stdout);
}

#[test]
fn empty_grid_gives_header_only() {
    let o = isonet(&["op-curve", "--scenario", &scenario("fig1_alpha4_eta0.json"), "--grid", "10:0:5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().nth(1), Some("y0,q_analytic"));
}

#[test]
fn json_output_and_out_file() {
    let out = temp_file("gamma.json", "");
    let o = isonet(&[
        "gamma-curve", "--scenario", &scenario("fig2_hotspot.json"), "--grid", "0:600:200", "--format", "json", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["y0", "gamma", "F"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["metadata"]["command"], "gamma-curve");
}

#[test]
fn gamma_curve_rejects_alpha_two() {
    let o = isonet(&["gamma-curve", "--scenario", &scenario("fig1_alpha2_eta0.json"), "--grid", "0:100:50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha = 4"));
}

#[test]
fn validate_stock_scenario_passes() {
    let o = isonet(&["validate", "--scenario", &scenario("exp_power_stock.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn validate_homogeneous_alpha_two_names_tail_condition() {
    let o = isonet(&["validate", "--scenario", &scenario("homogeneous_alpha2.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("tail-condition"));
    assert!(stderr(&o).contains("tail condition"));
}

#[test]
fn corrupted_scenario_exits_two_with_diagnostic() {
    let bad = temp_file("bad.json", r#"{"shape": {"kind": "exp_power", "params": {"scale": 100"#);
    let o = isonet(&["validate", "--scenario", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse"), "{}", stderr(&o));

    let wrong_key = temp_file(
        "wrong.json",
        r#"{"shape":{"kind":"constant"},"lambda":0.001,"channel":{"alpha":4,"c":1,"d":10,"eta":"x","beta":1}}"#,
    );
    let o = isonet(&["op-curve", "--scenario", &wrong_key, "--grid", "0:1:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("channel.eta"), "{}", stderr(&o));
}

#[test]
fn invalid_scenario_lists_violations_and_exits_two() {
    let o = isonet(&["op-curve", "--scenario", &scenario("homogeneous_alpha2.json"), "--grid", "0:100:50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tail-condition"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_grid_is_an_input_error() {
    let sc = scenario("fig1_alpha4_eta0.json");
    for grid in ["0:100:0", "0:100", "a:b:c", "0dB:10dB:1dB"] {
        let o = isonet(&["op-curve", "--scenario", &sc, "--grid", grid]);
        assert_eq!(o.status.code(), Some(2), "{grid}");
    }
}

#[test]
fn empty_network_outage_is_noise_only() {
    let sc = temp_file(
        "empty.json",
        r#"{"shape":{"kind":"exp_power","params":{"scale":100,"exponent":3}},"lambda":0,
            "channel":{"alpha":2,"c":1,"d":10,"eta":0.1,"beta":0.5}}"#,
    );
    let o = isonet(&["op-curve", "--scenario", &sc, "--grid", "0:300:25"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let expect = 1.0 - (-0.05f64).exp();
    let text = stdout(&o);
    for line in text.lines().skip(2) {
        let q: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((q - expect).abs() < 1e-15);
    }
}

#[test]
fn sum_rate_noise_and_interference_free_is_log_curve() {
    let sc = temp_file(
        "free.json",
        r#"{"shape":{"kind":"exponential","params":{"scale":250}},"lambda":0,
            "channel":{"alpha":2,"c":1,"d":10,"eta":0,"beta":1}}"#,
    );
    let o = isonet(&["sum-rate", "--scenario", &sc, "--lambda-r", "0.01", "--grid=-10dB:10dB:5dB"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rates: Vec<(f64, f64)> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| {
            let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(rates.len(), 5);
    for w in rates.windows(2) {
        assert!(w[1].1 > w[0].1);
    }
    for (db, r) in rates {
        // no interference and no noise: every link succeeds
        assert!((r - (1.0 + 10f64.powf(db / 10.0)).log2()).abs() < 1e-6, "{db} {r}");
    }
}

#[test]
fn simulate_raw_dump_and_determinism() {
    let sc = scenario("fig1_alpha4_eta0.json");
    let raw = temp_file("raw.csv", "");
    let args = ["simulate", "--scenario", &sc, "--quantity", "laplace", "--s", "5000", "--y0", "50", "--trials", "500", "--seed", "2", "--raw", &raw];
    let a = isonet(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let dump = std::fs::read_to_string(&raw).unwrap();
    assert_eq!(dump.lines().count(), 501);
    assert!(dump.starts_with("trial_index,interference,sinr,outage_flag"));
    let b = isonet(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(dump, std::fs::read_to_string(&raw).unwrap());

    let missing = isonet(&["simulate", "--scenario", &sc, "--quantity", "laplace"]);
    assert_eq!(missing.status.code(), Some(2));
}

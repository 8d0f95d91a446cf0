use std::collections::BTreeMap;
use std::process::{Command, Output};

use hyperboloid::phase::parse_expr;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperboloid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("hyperboloid-cli-{}-{name}", std::process::id()))
}

#[test]
fn derive_json_and_text_agree() {
    let j = run(&["derive", "--format", "json"]);
    assert_eq!(j.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(doc["all_hold"], true);
    assert_eq!(doc["M_times_inverse_is_identity"], true);
    assert_eq!(doc["constraints"].as_array().unwrap().len(), 4);

    let t = run(&["derive", "--format", "text"]);
    assert_eq!(t.status.code(), Some(0));
    let text = stdout(&t);
    let mut from_text = BTreeMap::new();
    for line in text.lines().filter(|l| l.starts_with('{')) {
        let (k, v) = line.split_once(" = ").unwrap();
        from_text.insert(k.to_string(), parse_expr(v).unwrap());
    }
    let dirac = doc["dirac"].as_object().unwrap();
    assert_eq!(dirac.len(), from_text.len());
    for (k, v) in dirac {
        assert_eq!(parse_expr(v.as_str().unwrap()).unwrap(), from_text[k], "{k}");
    }
    for c in doc["constraints"].as_array().unwrap() {
        let name = c["name"].as_str().unwrap();
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{name} = ")))
            .unwrap();
        let (_, v) = line.split_once(" = ").unwrap();
        assert_eq!(parse_expr(v).unwrap(), parse_expr(c["constraint"].as_str().unwrap()).unwrap());
    }
    for (i, row) in doc["M"].as_array().unwrap().iter().enumerate() {
        for (k, cell) in row.as_array().unwrap().iter().enumerate() {
            let key = format!("M[{}][{}] = ", i + 1, k + 1);
            let line = text.lines().find(|l| l.starts_with(&key)).unwrap();
            assert_eq!(
                parse_expr(&line[key.len()..]).unwrap(),
                parse_expr(cell.as_str().unwrap()).unwrap()
            );
        }
    }
    assert!(text.contains("M[2][3] = 2*a^2"));
}

#[test]
fn simulate_writes_csv_and_passes_at_defaults() {
    let out = scratch("traj.csv");
    let o = run(&["--out", out.to_str().unwrap(), "simulate", "--t-end", "1", "--sample-every", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    std::fs::remove_file(&out).ok();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("t,x,y,z,p_x,p_y,p_z,theta,phi,H"));
    assert_eq!(lines.count(), 11);
}

#[test]
fn zero_momentum_is_a_fixed_point() {
    let o = run(&["--format", "json", "simulate", "--p0", "0,0,0", "--t-end", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for s in doc["samples"].as_array().unwrap() {
        assert_eq!(s["x"], serde_json::json!([0.0, 0.0, 1.0]));
        assert_eq!(s["H"], 0.0);
    }
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["simulate", "--dt", "-0.1"][..],
        &["simulate", "--p0", "1,2"],
        &["spectrum", "--n-phi", "6"],
        &["--a", "0", "derive"],
        &["no-such-command"],
        &["verify", "--only", "nothing"],
    ] {
        assert_eq!(run(args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let cfg = scratch("run.json");
    std::fs::write(&cfg, r#"{"a": 2.0, "lambdas": [1.0], "orders": [1]}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "spectrum", "--stride", "1000"]);
    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"radius": 2.0}"#).unwrap();
    let b = run(&["--config", bad.to_str().unwrap(), "derive"]);
    std::fs::remove_file(&cfg).ok();
    std::fs::remove_file(&bad).ok();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1.0");
    assert_eq!(row[1], "1");
    // E = ħ²(λ² + ¼)/(2ma²) with a = 2
    assert_eq!(row[6].parse::<f64>().unwrap(), 0.15625);
    assert_eq!(b.status.code(), Some(64));
}

#[test]
fn spectrum_energy_column_and_residuals() {
    let o = run(&["spectrum", "--lambda", "1", "--lambda", "0", "--n", "0", "--stride", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut seen = BTreeMap::new();
    for line in text.lines().skip(1) {
        let c: Vec<&str> = line.split(',').collect();
        let e: f64 = c[6].parse().unwrap();
        let r: f64 = c[5].parse().unwrap();
        assert!(r < 1e-4, "{line}");
        seen.insert(c[0].to_string(), e);
    }
    assert_eq!(seen["1.0"], 0.625);
    assert_eq!(seen["0.0"], 0.125);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda = 0"));
}

#[test]
fn verify_only_filters_modules() {
    let o = run(&["--format", "json", "verify", "--only", "geometry"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["pass"], true);
    let checks = doc["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["module"] == "geometry"));
}

#[test]
fn verify_names_the_injected_fault() {
    let o = run(&["--format", "json", "verify", "--only", "spectral", "--inject", "flip-recurrence"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let failures: Vec<&str> = doc["failures"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(failures, ["spectral.order_recurrence"]);
}

use std::process::Command;

fn qsteenrod(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qsteenrod")).args(args).output().expect("binary runs")
}

#[test]
fn exit_codes() {
    assert_eq!(qsteenrod(&["--help"]).status.code(), Some(0));
    assert_eq!(qsteenrod(&["local-p1", "--prime", "4"]).status.code(), Some(1));
    assert_eq!(qsteenrod(&["flat-section", "--prime", "5"]).status.code(), Some(1));
    assert_eq!(qsteenrod(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(qsteenrod(&["local-p1", "--prime", "3"]).status.code(), Some(0));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["tstar-p1", "--prime", "3", "--q-max", "6", "--h-max", "2", "--mu", "1", "--format", "json"];
    let a = qsteenrod(&args);
    let b = qsteenrod(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["command"], "tstar-p1");
    assert_eq!(v["summary"]["fail"], 0);
    assert!(v["reports"].as_array().unwrap().iter().all(|r| r["wall_time_ms"].is_null()));
}

#[test]
fn flat_section_json_shape() {
    let out = qsteenrod(&["flat-section", "--prime", "5", "--mu", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["basis"], "stable");
    assert_eq!(v["result"]["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn writes_to_out_file() {
    let path = std::env::temp_dir().join(format!("qsteenrod-cli-out-{}.json", std::process::id()));
    let out = qsteenrod(&["annihilation", "--prime", "3", "--mu", "1", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["holds"], true);
    let _ = std::fs::remove_file(&path);
}

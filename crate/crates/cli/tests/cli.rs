use std::process::{Command, Output};

fn zetafock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetafock")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn abstract_suite_passes() {
    let o = zetafock(&["verify", "abstract", "--r-max", "2", "--m-max", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["summary"]["failed"], 0);
    assert!(rep["summary"]["total"].as_u64().unwrap() > 0);
    assert!(stderr(&o).contains("result: PASS"));
}

#[test]
fn invalid_setup_is_a_usage_error() {
    let o = zetafock(&["verify", "rep", "--p", "3", "--dims", "0,2,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d_k = d_(p-k)"), "{}", stderr(&o));

    let o = zetafock(&["verify", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = zetafock(&["verify", "abstract", "--m-max", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = zetafock(&["verify", "dims", "--p", "2", "--dims", "0,1", "--degree-max", "1/3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"setup": {{"p": 2, "dims": [0, 1]}}, "suites": ["rep"],
 "bounds": {{"r_max": 1, "m_max": 1, "degree_max": "4"}}, "output": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = zetafock(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("result: PASS"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"vacuum_eigenvalue\"") && text.contains("\"1/16\""));

    std::fs::write(&cfg, "{\n  \"suites\": [\"abstract\"],\n  \"bounds\": {\"r_max\": -1}\n}").unwrap();
    let o = zetafock(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bounds.r_max") && err.contains("line 3"), "{err}");

    std::fs::write(&cfg, r#"{"suites": ["abstract", "unknown"]}"#).unwrap();
    let o = zetafock(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("suites"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["verify", "jacobi", "--p", "2", "--dims", "0,1", "--degree-max", "1", "--window", "1", "--m-max", "1"];
    let a = zetafock(&[&args[..], &["--jobs", "1"]].concat());
    let b = zetafock(&[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tables_and_bernoulli() {
    let o = zetafock(&["table", "corrections", "--p", "2", "--dims", "0,1", "--r-max", "1"]);
    let t = stdout(&o);
    assert!(t.lines().nth(1).unwrap().contains("1/16") && t.lines().nth(2).unwrap().contains("1/128"), "{t}");

    let o = zetafock(&["table", "zeta", "--r-max", "3"]);
    let t = stdout(&o);
    for v in ["-1/12", "1/120", "-1/252", "1/240"] {
        assert!(t.contains(v), "{t}");
    }

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("central.json");
    let o = zetafock(&["table", "central", "--r-max", "0", "--m-max", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let vals: Vec<&str> = rows.as_array().unwrap().iter().map(|r| r["central"].as_str().unwrap()).collect();
    assert_eq!(vals, ["1/12", "2/3", "9/4"]);

    let o = zetafock(&["table", "delta", "--p", "2", "--dims", "0,1", "--s-max", "1"]);
    assert!(stdout(&o).matches("-1/128").count() == 2, "{}", stdout(&o));

    let o = zetafock(&["bernoulli", "--n", "12"]);
    assert_eq!(stdout(&o).trim(), "B_12 = -691/2730");
    let o = zetafock(&["bernoulli", "--n", "3", "--x", "1/3"]);
    assert_eq!(stdout(&o).trim(), "B_3(1/3) = 1/27");
}

use std::fs;
use std::process::Command;

fn fockalg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fockalg"))
}

#[test]
fn list_names_every_experiment() {
    let out = fockalg().arg("list").output().unwrap();
    assert!(out.status.success());
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(str::to_owned).collect();
    assert_eq!(names, fockalg::experiments::EXPERIMENTS);
}

#[test]
fn single_experiment_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("codim.json");
    let status = fockalg().args(["codim-counts", "--level", "5", "--out"]).arg(&path).status().unwrap();
    assert!(status.success());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["params"]["level"], 5.0);
    let dims: Vec<f64> = report["measurements"]["complement_dim"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    // The exact region of L1 at level 5 ends at level 4.
    assert_eq!(dims, [1.0, 1.0, 2.0, 4.0, 8.0]);
}

#[test]
fn report_goes_to_stdout_without_out() {
    let out = fockalg().args(["eigenvector", "--level", "6", "--seed", "3"]).output().unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["name"], "eigenvector");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let status =
            fockalg().args(["ball-search", "--terms", "1", "--level", "2", "--seed", "11", "--out"]).arg(p).status().unwrap();
        assert!(status.success());
    }
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
}

#[test]
fn unknown_experiment_exits_with_error() {
    let out = fockalg().arg("no-such-experiment").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment"));
}

#[test]
fn invalid_parameters_are_errors() {
    let out = fockalg().args(["thin-isometry", "--kmax", "3", "--level", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

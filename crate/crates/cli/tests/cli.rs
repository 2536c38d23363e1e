use std::path::Path;
use std::process::{Command, Output};

use ssered::harness::Report;

fn ssered(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssered"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn generate_then_solve_planted() {
    let dir = tempfile::tempdir().unwrap();
    let gen = ssered(
        dir.path(),
        &[
            "--seed", "3", "generate", "planted", "--n", "6", "--delta", "1/3", "--phi", "1/8", "--out", "g.json",
        ],
    );
    assert!(gen.status.success());
    let sse = ssered(dir.path(), &["solve", "sse", "--graph", "g.json", "--delta", "1/3"]);
    assert!(sse.status.success());
    let v = stdout(&sse);
    assert_eq!(v["verdict"], "completeness");
    assert_eq!(v["expansion"], "1/8");

    let kcut = ssered(dir.path(), &["reduce", "kcut", "--graph", "g.json", "--delta", "1/3"]);
    assert_eq!(stdout(&kcut)["k"], 3);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--seed",
        "9",
        "generate",
        "hypergraph",
        "--vertices",
        "6",
        "--edges",
        "4",
    ];
    let a = ssered(dir.path(), &args);
    let b = ssered(dir.path(), &args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = ssered(
        dir.path(),
        &["verify", "--pipeline", "kcut", "--seed", "2", "--out", "r.json"],
    );
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report = Report::from_json(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report.pipeline, "kcut");
    assert_eq!(report.seed, 2);
    assert!(report.all_pass());
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), report.rows.len() + 1);

    let again = ssered(dir.path(), &["report", "--input", "r.json"]);
    assert!(again.status.success());
    assert_eq!(String::from_utf8(again.stdout).unwrap().trim_end(), csv.trim_end());
}

#[test]
fn config_file_drives_pipeline_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.toml"),
        "pipeline = \"biclique\"\nseed = 1\n[hypergraph]\nvertices = 6\nedges = 4\n",
    )
    .unwrap();
    let run = ssered(
        dir.path(),
        &["verify", "--config", "c.toml", "--seed", "7", "--out", "r.json"],
    );
    assert!(run.status.success());
    let report = Report::from_json(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!((report.pipeline.as_str(), report.seed), ("biclique", 7));
}

#[test]
fn forged_report_fails_recheck() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ssered(dir.path(), &["decode", "--out", "r.json"]).status.success());
    let path = dir.path().join("r.json");
    let mut report = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    report.rows[0].pass = !report.rows[0].pass;
    std::fs::write(&path, report.to_json().unwrap()).unwrap();
    assert_eq!(
        ssered(dir.path(), &["report", "--input", "r.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn failing_rows_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        ssered(dir.path(), &["verify", "--pipeline", "dalks", "--out", "r.json"])
            .status
            .success()
    );
    let path = dir.path().join("r.json");
    let mut report = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let row = &mut report.rows[0];
    row.rhs = &row.lhs + ssered::rational::int(1);
    row.pass = false;
    std::fs::write(&path, report.to_json().unwrap()).unwrap();
    assert_eq!(
        ssered(dir.path(), &["report", "--input", "r.json"]).status.code(),
        Some(1)
    );
}

#[test]
fn malformed_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "pipeline = \"kcut\"\nbogus = 1\n").unwrap();
    let run = ssered(dir.path(), &["verify", "--config", "bad.toml"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("unknown field"));

    let infeasible = ssered(
        dir.path(),
        &["generate", "planted", "--n", "6", "--delta", "1/3", "--phi", "3/2"],
    );
    assert_eq!(infeasible.status.code(), Some(2));
}

//! End-to-end checks on the compiled `selent` binary: exit codes, stream
//! separation, CSV determinism, and the file-to-file plot path.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn selent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selent"))
        .args(args)
        .env_remove("SELENT_QUAD_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    let o = selent(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("analyze"));
    let o = selent(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn unknown_subcommand_exits_one() {
    let o = selent(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn zero_reps_exits_one() {
    let o = selent(&["simulate", "--alpha", "1", "--reps", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn table_default_grid() {
    let o = selent(&["table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("alpha,c1,c2,c3"));
    assert_eq!(lines.count(), 27);
}

#[test]
fn quadrature_env_override() {
    let ok = Command::new(env!("CARGO_BIN_EXE_selent"))
        .args(["constants", "--alpha", "2"])
        .env("SELENT_QUAD_TOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let row = stdout(&ok);
    let c2: f64 = row
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert!((c2 - 0.8659315156584124).abs() < 1e-7);

    let bad = Command::new(env!("CARGO_BIN_EXE_selent"))
        .args(["constants", "--alpha", "2"])
        .env("SELENT_QUAD_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("SELENT_QUAD_TOL"));
}

#[test]
fn simulate_same_seed_same_bytes() {
    let args = [
        "simulate",
        "--alpha",
        "0.5",
        "--reps",
        "400",
        "--mu-grid",
        "1,1.5,4",
        "--seed",
        "7",
        "--estimators",
        "naive-worse=ln-alpha,shrink-worse=ln-alpha",
    ];
    let a = selent(&args);
    let b = selent(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());

    let c = selent(&[
        "simulate",
        "--alpha",
        "0.5",
        "--reps",
        "400",
        "--mu-grid",
        "1,1.5,4",
        "--seed",
        "8",
        "--estimators",
        "naive-worse=ln-alpha,shrink-worse=ln-alpha",
    ]);
    assert_ne!(a.stdout, c.stdout, "different seed must change the draws");
}

#[test]
fn simulate_writes_file_identical_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("risk.csv");
    let args_file = [
        "simulate".to_string(),
        "--alpha".into(),
        "1".into(),
        "--reps".into(),
        "300".into(),
        "--mu-grid".into(),
        "1,2".into(),
        "--out".into(),
        out_path.to_string_lossy().into_owned(),
    ];
    let o = Command::new(env!("CARGO_BIN_EXE_selent"))
        .args(&args_file)
        .env_remove("SELENT_QUAD_TOL")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty(), "file mode keeps stdout clean");
    let from_file = std::fs::read(&out_path).unwrap();
    let direct = selent(&[
        "simulate",
        "--alpha",
        "1",
        "--reps",
        "300",
        "--mu-grid",
        "1,2",
    ]);
    assert_eq!(from_file, direct.stdout);
}

#[test]
fn analyze_reference_files() {
    let o = selent(&[
        "analyze",
        "--a",
        &data("plane_7913.txt"),
        "--b",
        &data("plane_7914.txt"),
        "--shape",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("plane_7913"), "label from file stem");
    assert!(
        text.contains("4.355105"),
        "selected naive value, ln-alpha constant"
    );
    assert!(text.contains("4.160834"));
    assert!(text.contains("no rejection at 5%"));
}

#[test]
fn analyze_csv_mode_round_trips() {
    let o = selent(&[
        "analyze",
        "--a",
        &data("plane_7913.txt"),
        "--b",
        &data("plane_7914.txt"),
        "--shape",
        "1",
        "--csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "target,label,value");
    let worse_naive = lines
        .find(|l| l.starts_with("worse,delta_ln_alpha,"))
        .expect("worse naive row present");
    let v: f64 = worse_naive.rsplit(',').next().unwrap().parse().unwrap();
    assert!((v - 4.355104977107617).abs() < 1e-10);
}

#[test]
fn analyze_missing_file_exits_two() {
    let o = selent(&[
        "analyze",
        "--a",
        "/nonexistent/x.txt",
        "--b",
        &data("plane_7914.txt"),
        "--shape",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot open"));
}

#[test]
fn analyze_parse_error_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::File::create(&bad)
        .unwrap()
        .write_all(b"1, 2, x\n")
        .unwrap();
    let o = selent(&[
        "analyze",
        "--a",
        bad.to_str().unwrap(),
        "--b",
        &data("plane_7914.txt"),
        "--shape",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line 1"), "stderr: {e}");
    assert!(e.contains("column 7"), "stderr: {e}");
}

#[test]
fn analyze_mismatched_sizes_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.txt");
    std::fs::write(&short, "5 6 7\n").unwrap();
    let o = selent(&[
        "analyze",
        "--a",
        short.to_str().unwrap(),
        "--b",
        &data("plane_7914.txt"),
        "--shape",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shape"));
}

#[test]
fn plot_from_simulated_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("risk.csv");
    let svg = dir.path().join("risk.svg");
    let o = Command::new(env!("CARGO_BIN_EXE_selent"))
        .args([
            "simulate",
            "--alpha",
            "1",
            "--reps",
            "500",
            "--mu-grid",
            "1,2,4,8",
            "--out",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = selent(&[
        "plot",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
        "--x",
        "mu",
        "--y",
        "mse",
    ]);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(&o));
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    assert!(body.ends_with("</svg>\n"));
    assert_eq!(
        body.matches("<polyline").count(),
        2,
        "one series per estimator"
    );
    assert!(body.contains("naive_worse"));
    assert!(body.contains("shrink_worse"));
}

#[test]
fn plot_missing_column_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    std::fs::write(&csv, "a,b\n1,2\n").unwrap();
    let o = selent(&[
        "plot",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        dir.path().join("t.svg").to_str().unwrap(),
        "--x",
        "mu",
        "--y",
        "mse",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mu"));
}

#[test]
fn dominance_csv_shape() {
    let o = selent(&[
        "dominance",
        "--alpha",
        "2",
        "--reps",
        "400",
        "--mu-grid",
        "1,3,9",
        "--a",
        "shrink-worse=ln-alpha",
        "--b",
        "naive-worse=ln-alpha",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("a_exceeds_b"));
    for line in lines {
        let last = line.rsplit(',').nth(2).unwrap();
        assert!(last == "true" || last == "false");
    }
}

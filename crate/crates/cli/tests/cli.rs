//! End-to-end tests of the `polarwin` binary.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polarwin"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polarwin-cli-{name}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// CSV text with the wall-time column removed from every row.
fn strip_wall(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string())
        .collect()
}

#[test]
fn construct_then_simulate_is_deterministic() {
    let dir = workdir("sim");
    let spec = dir.join("code.spec");
    let status = bin()
        .args([
            "construct",
            "--n",
            "6",
            "--rate",
            "0.5",
            "--sigma-bar2",
            "0.5",
            "--trials",
            "500",
            "--seed",
            "9",
            "--out",
        ])
        .arg(&spec)
        .status()
        .unwrap();
    assert!(status.success());

    let text = std::fs::read_to_string(&spec).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(header[0], "6");
    assert_eq!(header[1], "32");
    assert_eq!(lines.next().unwrap().split_whitespace().count(), 64);
    assert_eq!(lines.next().unwrap().split_whitespace().count(), 64);

    let run = |out: &PathBuf| {
        let status = bin()
            .args([
                "simulate",
                "--spec",
                spec.to_str().unwrap(),
                "--lambda",
                "16",
                "--sigma-bar2",
                "0.5,0.6",
                "--decoders",
                "sc,scan,swscan,w2scan",
                "--trials",
                "25",
                "--seed",
                "3",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(out).unwrap()
    };
    let a = run(&dir.join("a.csv"));
    let b = run(&dir.join("b.csv"));
    assert_eq!(strip_wall(&a), strip_wall(&b));

    let rows: Vec<&str> = a.lines().collect();
    assert_eq!(
        rows[0],
        "sigma_bar2,eb_n0_db,decoder,alpha,trials,ber,fer,fpr,avg_iters,wall_ms"
    );
    assert_eq!(rows.len(), 1 + 2 * 4);
}

#[test]
fn capacity_table_has_the_expected_shape() {
    let out = bin()
        .args(["capacity", "--lambda", "64", "--sigma-bar2", "0.5,0.65"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "sigma_bar2,eb_n0_db,c_hat,c_bar");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        let c_hat: f64 = fields[2].parse().unwrap();
        let c_bar: f64 = fields[3].parse().unwrap();
        assert!(c_hat > c_bar, "state knowledge strictly helps here");
    }
    let eb0: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!(eb0.abs() < 1e-9, "sigma2 = 0.5 sits at 0 dB");
}

#[test]
fn bad_arguments_are_rejected() {
    let dir = workdir("bad");
    let spec = dir.join("missing.spec");
    assert!(!bin()
        .args(["simulate", "--spec", spec.to_str().unwrap(), "--sigma-bar2", "0.5"])
        .output()
        .unwrap()
        .status
        .success());

    let spec = dir.join("code.spec");
    bin()
        .args([
            "construct", "--n", "4", "--rate", "0.5", "--sigma-bar2", "0.5", "--trials", "100",
            "--out",
        ])
        .arg(&spec)
        .status()
        .unwrap();
    let out = bin()
        .args([
            "simulate",
            "--spec",
            spec.to_str().unwrap(),
            "--sigma-bar2",
            "0.5",
            "--decoders",
            "scanner",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown decoder"), "stderr was: {err}");

    assert!(!bin()
        .args(["construct", "--n", "4", "--rate", "0", "--sigma-bar2", "0.5", "--out", "x"])
        .output()
        .unwrap()
        .status
        .success());
}

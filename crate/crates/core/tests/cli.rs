use std::path::Path;
use std::process::{Command, Output};

use qswalk::graphio::{erdos_renyi, is_strongly_connected};

fn qswalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qswalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// `(time, vertex, probability)` rows of a CSV report.
fn rows(text: &str) -> Vec<(f64, usize, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,vertex,probability"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn two_parent_file(dir: &Path) -> String {
    format!("file:{}", write(dir, "two_parent.edges", "1 3\n2 3\n"))
}

#[test]
fn two_parent_global_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let graph = two_parent_file(dir.path());
    let out = qswalk(&[
        "evolve", "--graph", &graph, "--regime", "global", "--omega", "1", "--time", "100",
        "--init", "1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let probs: Vec<f64> = rows(&stdout(&out)).iter().map(|r| r.2).collect();
    for (got, want) in probs.iter().zip([0.25, 0.25, 0.5]) {
        assert!((got - want).abs() < 1e-6, "{probs:?}");
    }
}

#[test]
fn two_parent_nonmoralizing_reaches_the_sink() {
    let dir = tempfile::tempdir().unwrap();
    let graph = two_parent_file(dir.path());
    let out = qswalk(&[
        "evolve",
        "--graph",
        &graph,
        "--regime",
        "nonmoralizing",
        "--omega",
        "1",
        "--time",
        "100",
        "--init",
        "1",
        "--dense",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let probs: Vec<f64> = rows(&stdout(&out)).iter().map(|r| r.2).collect();
    for (got, want) in probs.iter().zip([0.0, 0.0, 1.0]) {
        assert!((got - want).abs() < 1e-6, "{probs:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let neg = qswalk(&[
        "evolve", "--graph", "path:5", "--regime", "global", "--time", "-1",
    ]);
    assert_eq!(code(&neg), 2);
    assert_eq!(
        String::from_utf8_lossy(&neg.stderr).trim().lines().count(),
        1
    );
    let omega = qswalk(&[
        "evolve", "--graph", "path:5", "--regime", "global", "--omega", "2", "--time", "1",
    ]);
    assert_eq!(code(&omega), 2);
    assert_eq!(
        code(&qswalk(&[
            "evolve", "--graph", "path:5", "--regime", "global", "--time", "1", "--init", "9"
        ])),
        2
    );
    assert_eq!(code(&qswalk(&["frobnicate"])), 2);

    let bad = format!("file:{}", write(dir.path(), "bad.edges", "1 2\n2 x\n"));
    let out = qswalk(&[
        "evolve", "--graph", &bad, "--regime", "global", "--time", "1",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let missing = format!("file:{}", dir.path().join("none.mtx").display());
    assert_eq!(
        code(&qswalk(&[
            "spectrum", "--graph", &missing, "--regime", "local"
        ])),
        3
    );
    let dict = write(dir.path(), "dict.json", "{\"2\": [[1, 1]]}");
    let out = qswalk(&[
        "evolve",
        "--graph",
        "path:5",
        "--regime",
        "nonmoralizing",
        "--time",
        "1",
        "--lind-dict",
        &dict,
    ]);
    assert_eq!(code(&out), 3);

    let big = qswalk(&["spectrum", "--graph", "path:70", "--regime", "global"]);
    assert_eq!(code(&big), 4);
    assert!(String::from_utf8_lossy(&big.stderr).contains("cap"));
}

#[test]
fn spectrum_reports() {
    let dir = tempfile::tempdir().unwrap();
    let loops = format!(
        "file:{}",
        write(dir.path(), "id.edges", "1 1\n2 2\n3 3\n4 4\n")
    );
    let out = qswalk(&["spectrum", "--graph", &loops, "--regime", "closed"]);
    assert_eq!(code(&out), 0);
    assert!(
        stdout(&out).starts_with("null_dim: 16\n"),
        "{}",
        stdout(&out)
    );

    let seed = (0..)
        .find(|&s| is_strongly_connected(&erdos_renyi(10, 0.5, true, s).unwrap()))
        .unwrap();
    let graph = format!("er:10:0.5:{seed}");
    let out = qswalk(&["spectrum", "--graph", &graph, "--regime", "local"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("null_dim: 1\n"), "{text}");
    let total: f64 = text
        .lines()
        .skip_while(|l| !l.starts_with("stationary"))
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn outputs_are_deterministic_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let args = |out: &str, format: &str| {
        qswalk(&[
            "evolve",
            "--graph",
            "uer:12:0.4:3",
            "--regime",
            "local",
            "--omega",
            "0.3",
            "--time",
            "0:5:6",
            "--init",
            "1,4",
            "--out",
            out,
            "--format",
            format,
        ])
    };
    let path = csv.to_str().unwrap();
    assert_eq!(code(&args(path, "csv")), 0);
    let first = std::fs::read(&csv).unwrap();
    assert_eq!(code(&args(path, "csv")), 0);
    assert_eq!(first, std::fs::read(&csv).unwrap());

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["regime"], "local");
    assert_eq!(meta["omega"], 0.3);
    assert!(meta["evolve_seconds"].as_f64().is_some());

    let json_path = dir.path().join("run.json");
    assert_eq!(code(&args(json_path.to_str().unwrap(), "json")), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let from_json: Vec<f64> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| {
            r["probabilities"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| p.as_f64().unwrap())
        })
        .collect();
    let from_csv: Vec<f64> = rows(&String::from_utf8(first).unwrap())
        .iter()
        .map(|r| r.2)
        .collect();
    assert_eq!(from_json.len(), from_csv.len());
    assert!(from_json
        .iter()
        .zip(&from_csv)
        .all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn lind_dicts_cancel_the_drift() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        "{\"1\": [[1]], \"2\": [[1, 1], [1, -1]]}",
    );
    let b = write(
        dir.path(),
        "b.json",
        "{\"1\": [[1]], \"2\": [[1, 1], [-1, 1]]}",
    );
    let out = qswalk(&[
        "evolve",
        "--graph",
        "path:21",
        "--regime",
        "nonmoralizing",
        "--omega",
        "0.5",
        "--time",
        "5",
        "--format",
        "json",
        "--lind-dict",
        &a,
        "--lind-dict",
        &b,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = &report["metadata"]["moments"][0];
    assert!((m["mean"].as_f64().unwrap() - 11.0).abs() < 1e-6, "{m}");
}

#[test]
fn global_path_spreads_ballistically() {
    let out = qswalk(&[
        "evolve", "--graph", "path:251", "--regime", "global", "--omega", "0.5", "--time",
        "0:100:51", "--init", "mid", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m2: Vec<f64> = report["metadata"]["moments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["second_central"].as_f64().unwrap())
        .collect();
    assert!(m2.windows(2).all(|w| w[1] > w[0]));
    // Superlinear: equal time steps give growing increments.
    let inc: Vec<f64> = m2.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(inc[inc.len() - 1] > 2.0 * inc[1]);
}

#[test]
fn bench_sweep() {
    let out = qswalk(&["bench", "--sizes", "10:100:10", "--time", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("order,state_dim,superoperator_dim,seconds")
    );
    let dims: Vec<usize> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(dims.len(), 10);
    assert!(dims.windows(2).all(|w| w[1] >= w[0]));
}

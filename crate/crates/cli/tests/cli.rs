use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fieldprobe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fieldprobe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a trial CSV as (i_true, i_est) pairs.
fn estimates(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("trial_id"))
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[3].parse().unwrap(), cols[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn method_ii_reads_pi_within_ten_alpha() {
    let out = fieldprobe(&[
        "simulate",
        "--protocol",
        "method-ii",
        "--target-i",
        "3.141592653589793",
        "--n-qubits",
        "30",
        "--m-scale",
        "5",
        "--trials",
        "1",
        "--seed",
        "7",
    ]);
    let text = stdout(&out);
    let rows = estimates(&text);
    assert_eq!(rows.len(), 1);
    let alpha = 50.0 / 2f64.powi(30);
    assert!((rows[0].1 - rows[0].0).abs() <= 10.0 * alpha, "{rows:?}");
    assert!(text.contains("# seed = 7"));
    assert!(text.contains("\"n_qubits\":30"));
}

#[test]
fn classical_zero_reads_zero() {
    let text = stdout(&fieldprobe(&[
        "simulate",
        "--protocol",
        "classical",
        "--target-i",
        "0",
        "--trials",
        "5",
    ]));
    assert!(estimates(&text).iter().all(|&(_, est)| est == 0.0));
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 6] = [
        &["simulate", "--protocol", "classical"],
        &[
            "simulate",
            "--target-i",
            "1",
            "--alpha",
            "0.1",
            "--guard",
            "3",
        ],
        &[
            "simulate",
            "--target-i",
            "1",
            "--alpha",
            "0.1",
            "--m-scale",
            "3",
        ],
        &[
            "simulate",
            "--target-i",
            "1",
            "--protocol",
            "classical",
            "--alpha",
            "0.1",
        ],
        &["simulate", "--target-i", "1", "--n0", "30"],
        &["simulate", "--target-i", "1", "--no-such-flag"],
    ];
    for args in cases {
        assert_eq!(fieldprobe(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = fieldprobe(&[
        "simulate",
        "--target-i",
        "1",
        "--trials",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_owned();
    full.extend(["--out", &p]);
    stdout(&fieldprobe(&full));
    fs::read(&path).unwrap()
}

#[test]
fn identical_command_lines_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 5] = [
        &[
            "simulate",
            "--protocol",
            "combined",
            "--n0",
            "8",
            "--target-i",
            "2.5",
            "--target-i",
            "-1",
            "--trials",
            "300",
            "--seed",
            "11",
        ],
        &[
            "simulate",
            "--protocol",
            "counter",
            "--n-bits",
            "20",
            "--target-i",
            "4",
            "--trials",
            "300",
            "--format",
            "json",
        ],
        &["table1", "--seed", "3"],
        &["error-profile", "--format", "csv"],
        &["optimize-lambda", "--format", "json"],
    ];
    for (i, args) in commands.iter().enumerate() {
        let a = run_to(dir.path(), &format!("a{i}"), args);
        let b = run_to(dir.path(), &format!("b{i}"), args);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn table1_layout() {
    let text = stdout(&fieldprobe(&["table1"]));
    assert!(text.starts_with("# seed = 0, N = 30, M = 5, guard = 10, lambda = 0.24"));
    let row3 = text
        .lines()
        .find(|l| l.trim_start().starts_with("3 |"))
        .unwrap();
    let cols: Vec<f64> = row3
        .split('|')
        .skip(1)
        .map(|c| c.trim().parse().unwrap())
        .collect();
    assert_eq!(format!("{:.9}", cols[0]), "9.424777961");
    let close = text
        .lines()
        .filter(|l| l.contains('|') && !l.contains("quantum"))
        .filter(|l| {
            let c: Vec<f64> = l
                .split('|')
                .skip(1)
                .map(|c| c.trim().parse().unwrap())
                .collect();
            (c[0] - c[1]).abs() < 5e-7
        })
        .count();
    assert!(close >= 9, "{text}");
}

#[test]
fn error_profile_endpoints() {
    let text = stdout(&fieldprobe(&[
        "error-profile",
        "--format",
        "json",
        "--max-n-alpha",
        "2",
        "--per-alpha",
        "1",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["probability"].as_f64().unwrap(), 1.0);
    assert!(rows[1]["probability"].as_f64().unwrap() < 1e-12);
    let tail10 = v["tails"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["threshold"] == 10)
        .unwrap();
    assert!((tail10["tail"].as_f64().unwrap() - 0.020451067899070).abs() < 1e-12);
    assert_eq!(v["n_qubits"], 30);
}

#[test]
fn optimize_lambda_reports_the_gap() {
    let text = stdout(&fieldprobe(&["optimize-lambda"]));
    assert!(text.contains("lambda* M = 1.593624"), "{text}");
    assert!(text.contains("+2.15% above the minimum"), "{text}");
    let other_n = stdout(&fieldprobe(&["optimize-lambda", "--n-bits", "1000"]));
    assert!(other_n.contains("lambda* M = 1.593624"));
}

#[test]
fn field_file_drives_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.txt");
    fs::write(
        &path,
        "# triangle\nkind = sampled-grid\nsamples = 0, 1, 2, 1, 0\ndx = 0.5\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let text = stdout(&fieldprobe(&["simulate", "--field", p, "--trials", "3"]));
    let rows = estimates(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|&(truth, _)| truth == 2.0));

    fs::write(&path, "kind = constant\namplitude = -1\nlength = 2\n").unwrap();
    let out = fieldprobe(&[
        "simulate",
        "--protocol",
        "classical",
        "--field",
        p,
        "--trials",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    stdout(&fieldprobe(&["simulate", "--field", p, "--trials", "1"]));

    fs::write(&path, "kind = constant\namplitude = 1\n").unwrap();
    assert_eq!(
        fieldprobe(&["simulate", "--field", p]).status.code(),
        Some(2)
    );
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use zerosum_core::io::read_sequence;

fn zerosum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args(args)
        .env_remove("ZEROSUM_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = zerosum(&full);
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: bad json ({e}): {}", stdout(&out)));
    (code(&out), v)
}

fn assert_no_floats(v: &Value) {
    match v {
        Value::Number(n) => assert!(!n.is_f64(), "float in report: {n}"),
        Value::Array(items) => items.iter().for_each(assert_no_floats),
        Value::Object(map) => map.values().for_each(assert_no_floats),
        _ => {}
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bound_examples() {
    let out = zerosum(&["bound", "--r", "1", "--s", "2", "--k", "6"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("= 10"));
    let out = zerosum(&["bound", "--r", "1", "--s", "1", "--k", "6"]);
    assert!(stdout(&out).contains("= 9"));
    let out = zerosum(&["bound", "--r", "1", "--s", "1", "--k", "6", "--t", "2"]);
    assert!(stdout(&out).contains("= 6"));

    let (c, v) = json(&["bound", "--r", "1", "--s", "2", "--k", "6"]);
    assert_eq!(c, 0);
    assert_eq!(v["command"], "bound");
    assert_eq!(v["indexing"], "0-based");
    assert_eq!(v["params"]["k"], 6);
    assert_eq!(v["result"]["n_exact"], 10);
    assert_eq!(v["result"]["tPrime"], 2);
    assert!(v["toolVersion"].is_string() && v["elapsedMillis"].is_u64());
    assert_no_floats(&v);

    let (_, v) = json(&["bound", "--r", "1", "--s", "1", "--k", "6", "--q", "0"]);
    assert_eq!(v["result"]["n_sufficient"], 10);
}

#[test]
fn bound_rejects_bad_parameters() {
    let out = zerosum(&["bound", "--r", "2", "--s", "4", "--k", "6"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("gcd"));
    assert_eq!(
        code(&zerosum(&["bound", "--r", "1", "--s", "2", "--k", "7"])),
        2
    );
    assert_eq!(
        code(&zerosum(&[
            "bound", "--r", "1", "--s", "2", "--k", "6", "--t", "2"
        ])),
        2
    );
    assert_eq!(code(&zerosum(&["bound", "--k"])), 2);
    assert_eq!(code(&zerosum(&["frobnicate"])), 2);
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.txt");
    let f = path_str(&file);

    let out = zerosum(&[
        "construct",
        "--kind",
        "block-extremal",
        "--r",
        "1",
        "--s",
        "2",
        "--k",
        "6",
        "--out",
        f,
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        std::fs::read_to_string(&file).unwrap(),
        "# zerosum v1 r=1 s=2 n=9\n-1 -1 -1 2 2 2 -1 -1 -1\n"
    );
    let (c, v) = json(&["verify", "--mode", "block", "--k", "6", "--in", f]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["minAbsWeight"], 3);
    assert_eq!(v["result"]["mode"], "Block");
    assert_eq!(v["result"]["found"], false);

    assert_eq!(
        code(&zerosum(&[
            "construct",
            "--kind",
            "ap-mod-k1",
            "--r",
            "1",
            "--s",
            "1",
            "--k",
            "8",
            "--out",
            f
        ])),
        0
    );
    assert_eq!(read_sequence(&file).unwrap().len(), 12);
    assert_eq!(
        code(&zerosum(&["verify", "--mode", "ap", "--k", "8", "--in", f])),
        0
    );

    assert_eq!(
        code(&zerosum(&[
            "construct",
            "--kind",
            "ap-two-p",
            "--p",
            "3",
            "--out",
            f
        ])),
        0
    );
    assert_eq!(read_sequence(&file).unwrap().len(), 8);
    assert_eq!(
        code(&zerosum(&["verify", "--mode", "ap", "--k", "6", "--in", f])),
        0
    );
}

#[test]
fn every_kind_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str], &str, &str); 6] = [
        (
            "block-extremal",
            &["--r", "2", "--s", "3", "--k", "10"],
            "block",
            "10",
        ),
        (
            "block-extremal-neg",
            &["--r", "2", "--s", "3", "--k", "10"],
            "block",
            "10",
        ),
        ("ap-mod-k", &["--k", "14"], "ap", "14"),
        ("ap-mod-k1", &["--k", "20"], "ap", "20"),
        (
            "ap-good-shift",
            &["--r", "1", "--s", "2", "--k", "12"],
            "ap",
            "12",
        ),
        ("ap-two-p", &["--p", "5"], "ap", "10"),
    ];
    for (kind, extra, mode, k) in cases {
        for encoding in ["values", "bits"] {
            let file = dir.path().join(format!("{kind}-{encoding}.txt"));
            let mut args = vec![
                "construct",
                "--kind",
                kind,
                "--encoding",
                encoding,
                "--out",
                path_str(&file),
            ];
            args.extend_from_slice(extra);
            let out = zerosum(&args);
            assert_eq!(
                code(&out),
                0,
                "{kind}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            let seq = read_sequence(&file).unwrap();
            assert_eq!(seq.total_weight().0, 0, "{kind}");
            let out = zerosum(&["verify", "--mode", mode, "--k", k, "--in", path_str(&file)]);
            assert_eq!(code(&out), 0, "{kind}: {}", stdout(&out));
        }
    }
}

#[test]
fn product_table_and_degenerate_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f.txt");
    let f = path_str(&file);
    let (c, v) = json(&[
        "construct",
        "--kind",
        "ap-product",
        "--k",
        "30",
        "--factors",
        "3,5",
        "--out",
        f,
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["length"], 30);
    assert_eq!(v["params"]["factors"], serde_json::json!([3, 5]));
    let seq = read_sequence(&file).unwrap();
    assert_eq!(seq.count_positive(), 16);

    let out = zerosum(&["construct", "--kind", "ap-mod-k", "--k", "6", "--out", f]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    assert_eq!(
        std::fs::read_to_string(&file).unwrap(),
        "# zerosum v1 r=1 s=1 n=0\n"
    );

    assert_eq!(
        code(&zerosum(&[
            "construct",
            "--kind",
            "ap-two-p",
            "--p",
            "9",
            "--out",
            f
        ])),
        2
    );
    assert_eq!(
        code(&zerosum(&[
            "construct",
            "--kind",
            "nope",
            "--k",
            "6",
            "--out",
            f
        ])),
        2
    );
}

#[test]
fn verify_reports_witnesses_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("alt.txt");
    std::fs::write(&file, "# zerosum v1 r=1 s=1 n=4\n1 -1 1 -1\n").unwrap();
    let f = path_str(&file);
    let (c, v) = json(&["verify", "--mode", "block", "--k", "2", "--in", f]);
    assert_eq!(c, 1);
    assert_eq!(v["result"]["witness"]["start"], 0);
    assert_eq!(v["result"]["witness"]["difference"], 1);

    let out = zerosum(&[
        "verify", "--mode", "smallsum", "--k", "4", "--t", "2", "--in", f,
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(
        code(&zerosum(&[
            "verify", "--mode", "smallsum", "--k", "4", "--in", f
        ])),
        2
    );
    assert_eq!(
        code(&zerosum(&[
            "verify", "--mode", "block", "--k", "5", "--in", f
        ])),
        2
    );

    std::fs::write(&file, "# zerosum v1 r=1 s=1 n=3\n1 2 1\n").unwrap();
    let out = zerosum(&["verify", "--mode", "block", "--k", "2", "--in", f]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn oracle_targets() {
    let (c, v) = json(&[
        "oracle",
        "--target",
        "block-threshold",
        "--r",
        "1",
        "--s",
        "2",
        "--k",
        "6",
        "--cap",
        "18",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["derivedThreshold"], 10);
    assert_eq!(v["result"]["maxAvoidingN"], 9);
    assert_eq!(v["result"]["exhaustive"], true);
    assert_eq!(
        v["result"]["witnesses"][0]["values"],
        serde_json::json!([-1, -1, -1, 2, 2, 2, -1, -1, -1])
    );
    assert_no_floats(&v);

    let base = zerosum(&[
        "oracle",
        "--target",
        "block-threshold",
        "--k",
        "6",
        "--cap",
        "16",
        "--threads",
        "1",
    ]);
    let many = zerosum(&[
        "oracle",
        "--target",
        "block-threshold",
        "--k",
        "6",
        "--cap",
        "16",
        "--threads",
        "4",
    ]);
    assert_eq!(stdout(&base), stdout(&many));

    let out = zerosum(&["oracle", "--target", "two-k", "--k", "6"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verified"));
    let (c, v) = json(&["oracle", "--target", "pow2", "--v", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["functionsChecked"], 256);
    assert_eq!(v["result"]["survivors"].as_array().unwrap().len(), 2);
    let (c, v) = json(&[
        "oracle",
        "--target",
        "residue-lemma",
        "--k",
        "30",
        "--factors",
        "3,5",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["plusCount"], 16);
    let (_, v) = json(&[
        "oracle",
        "--target",
        "ap-threshold",
        "--k",
        "4",
        "--cap",
        "16",
    ]);
    assert_eq!(v["result"]["mode"], "AP");
}

#[test]
fn oracle_budget_refusal() {
    let out = Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args([
            "oracle",
            "--target",
            "block-threshold",
            "--k",
            "6",
            "--cap",
            "20",
        ])
        .env("ZEROSUM_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimated"));
    let out = zerosum(&[
        "oracle",
        "--target",
        "block-threshold",
        "--k",
        "6",
        "--budget",
        "100",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn shift_examples() {
    let out = zerosum(&["shift", "--r", "1", "--s", "1", "--k", "100"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("alpha = 1 "));
    let (c, v) = json(&["shift", "--r", "1", "--s", "2", "--k", "21"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["alpha"], 2);
    assert_eq!(v["result"]["good"], true);
    let (_, v) = json(&["shift", "--r", "1", "--s", "2", "--k", "20"]);
    assert_eq!(v["result"]["primeFactorsOfA"], serde_json::json!([3, 7]));
    let (_, v) = json(&["shift", "--r", "2", "--s", "3", "--k", "100", "--prime"]);
    assert_eq!(v["result"]["a"], 101);

    let out = zerosum(&[
        "shift",
        "--r",
        "1",
        "--s",
        "2",
        "--k",
        "21",
        "--max-alpha",
        "1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[1, 1]"));
}

#[test]
fn table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.csv");
    let out = zerosum(&[
        "table",
        "--r",
        "1",
        "--s",
        "1",
        "--k-min",
        "6",
        "--k-max",
        "60",
        "--what",
        "ap-lb",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&file).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,value"));
    let rows: Vec<(u64, u64)> = lines
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 28);
    for (k, v) in rows {
        assert_eq!(v, (k + 4) * ((k - 2) / 6), "k={k}");
    }
    assert!(!text.contains('"') && !text.contains('\r'));

    let out = zerosum(&[
        "table", "--r", "1", "--s", "2", "--k-min", "3", "--k-max", "9", "--what", "N",
    ]);
    assert_eq!(stdout(&out), "k,value\n3,3\n6,10\n9,16\n");
    let out = zerosum(&[
        "table", "--r", "1", "--s", "2", "--k-min", "18", "--k-max", "24", "--what", "shift",
    ]);
    assert_eq!(stdout(&out), "k,value\n18,1\n21,2\n24,1\n");
    assert_eq!(
        code(&zerosum(&[
            "table", "--k-min", "9", "--k-max", "3", "--what", "N"
        ])),
        2
    );
}

use std::path::PathBuf;
use std::process::{Command, Output};

use assembly_core::{BigRational, MomentReport, SweepDocument, SweepSummary};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assembly-tk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exited normally")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("assembly-tk-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn permutation_counts_are_one() {
    let text = stdout(&[
        "count",
        "--class",
        "permutations",
        "--n",
        "10",
        "--mode",
        "exact",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,Q,G"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 10);
    let mut factorial = 1u64;
    for (i, row) in rows.iter().enumerate() {
        factorial *= i as u64 + 1;
        assert_eq!(row[0], (i + 1).to_string());
        assert_eq!(row[1], "1");
        assert_eq!(row[2], factorial.to_string());
    }
}

#[test]
fn small_permutation_report() {
    let text = stdout(&["tk", "--class", "permutations", "--n", "3", "--family", "w"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,mean,variance,rhs1,rhs2,ratio1,ratio2");
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[0], "3");
    assert_eq!(row[1], "11/6");
    assert_eq!(row[2], "17/36");
    assert_eq!(row[4], "11/6");
    assert_eq!(row[6], "17/66");
}

#[test]
fn set_partitions_fail_lower_sum_with_witness() {
    let text = stdout(&[
        "check",
        "--class",
        "set_partitions",
        "--rho",
        "1",
        "--auto",
        "--N",
        "100",
        "--format",
        "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let verdicts = doc["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 4);
    let lower = verdicts
        .iter()
        .find(|v| v["condition"] == "lower_sum")
        .unwrap();
    assert_eq!(lower["holds"], false);
    let index = lower["witness"]["index"].as_u64().unwrap();
    assert!(index > 50 && index <= 100);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(
        code(&["count", "--class", "permutations", "--n", "5", "--bogus"]),
        1
    );
    assert_eq!(code(&["count", "--class", "no_such_class", "--n", "5"]), 1);
    assert_eq!(
        code(&["count", "--config", "/nonexistent/class.json", "--n", "5"]),
        1
    );
    assert_eq!(code(&["sample", "--class", "permutations", "--n", "5"]), 1);
    assert_eq!(
        code(&["count", "--class", "mappings", "--n", "41", "--verify"]),
        1
    );
    // no 2-regular graph on two vertices
    assert_eq!(
        code(&["tk", "--class", "two_regular_graphs", "--n", "2"]),
        2
    );
    assert_eq!(
        code(&[
            "sample",
            "--class",
            "permutations",
            "--n",
            "30",
            "--seed",
            "1",
            "--max-rejections",
            "1"
        ]),
        2
    );
}

#[test]
fn verify_passes_within_cap() {
    for args in [
        &["count", "--class", "forests", "--n", "30", "--verify"][..],
        &[
            "pmf",
            "--class",
            "two_regular_graphs",
            "--n",
            "12",
            "--j",
            "3",
            "--verify",
        ],
        &[
            "tk", "--class", "mappings", "--n", "14", "--family", "distinct", "--verify",
        ],
        &[
            "sweep",
            "--class",
            "set_partitions",
            "--to",
            "12",
            "--family",
            "half",
            "--verify",
        ],
    ] {
        assert_eq!(code(args), 0, "{args:?}");
    }
}

#[test]
fn exact_sweep_round_trips_through_csv_and_json() {
    let base = [
        "sweep",
        "--class",
        "mappings",
        "--to",
        "25",
        "--family",
        "rademacher:5",
    ];
    let csv = stdout(&base);
    let from_csv = SweepSummary::<BigRational>::read_csv(csv.as_bytes()).unwrap();
    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let doc: SweepDocument = serde_json::from_str(&stdout(&json_args)).unwrap();
    assert_eq!(doc.class, "mappings");
    assert_eq!(doc.family, "rademacher:5");
    let from_json: Vec<MomentReport<BigRational>> = doc.reports().unwrap();
    assert_eq!(from_csv.len(), 25);
    assert_eq!(from_csv, from_json);

    let mut rewritten = Vec::new();
    SweepSummary::new(from_csv, Vec::new())
        .write_csv(&mut rewritten)
        .unwrap();
    assert_eq!(String::from_utf8(rewritten).unwrap(), csv);
}

#[test]
fn float_sweep_round_trips() {
    let csv = stdout(&[
        "sweep",
        "--class",
        "two_regular_graphs",
        "--to",
        "60",
        "--family",
        "log",
        "--mode",
        "float",
    ]);
    let reports = SweepSummary::<f64>::read_csv(csv.as_bytes()).unwrap();
    let mut rewritten = Vec::new();
    SweepSummary::new(reports, Vec::new())
        .write_csv(&mut rewritten)
        .unwrap();
    // orders without structures are skipped, so the rewrite covers the same rows
    assert_eq!(String::from_utf8(rewritten).unwrap(), csv);
}

#[test]
fn output_file_matches_stdout() {
    let path = scratch("pmf.csv");
    let args = ["pmf", "--class", "set_partitions", "--n", "20", "--j", "2"];
    let printed = stdout(&args);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    assert!(stdout(&with_out).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    let mut total = BigRational::from_integer(0.into());
    for line in printed.lines().skip(1) {
        let p: BigRational = line.split(',').nth(1).unwrap().parse().unwrap();
        total += p;
    }
    assert_eq!(total, BigRational::from_integer(1.into()));
}

#[test]
fn sample_is_seeded_and_dumps_profiles() {
    let dump = scratch("profiles.csv");
    let args = [
        "sample",
        "--class",
        "permutations",
        "--n",
        "12",
        "--reps",
        "500",
        "--seed",
        "9",
        "--format",
        "json",
        "--dump",
        dump.to_str().unwrap(),
    ];
    let first = stdout(&args);
    assert_eq!(stdout(&args), first);
    let doc: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(doc["metadata"]["accepted"], 500);
    assert_eq!(doc["metadata"]["seed"], 9);

    let rows = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(rows.lines().next(), Some("sample,j,s_j"));
    let mut sizes = vec![0u64; 500];
    for line in rows.lines().skip(1) {
        let f: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        sizes[f[0] as usize] += f[1] * f[2];
    }
    assert!(sizes.iter().all(|&s| s == 12));
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dump.with_extension("csv.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["seed"], 9);

    let other = stdout(&[
        "sample",
        "--class",
        "permutations",
        "--n",
        "12",
        "--reps",
        "500",
        "--seed",
        "10",
        "--format",
        "json",
    ]);
    assert_ne!(other, first);
}

#[test]
fn classes_lists_builtins() {
    let text = stdout(&["classes"]);
    for name in [
        "permutations",
        "mappings",
        "two_regular_graphs",
        "set_partitions",
        "forests",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn config_file_class() {
    // cycles of length at most 3, so every permutation of 3 points counts
    let path = scratch("cycles.json");
    std::fs::write(
        &path,
        r#"{"name": "short_cycles", "rho": "1", "weights": ["1", "1/2", "1/3"]}"#,
    )
    .unwrap();
    let text = stdout(&["count", "--config", path.to_str().unwrap(), "--n", "4"]);
    assert_eq!(text, "n,Q,G\n1,1,1\n2,1,2\n3,1,6\n4,3/4,18\n");

    let toml = scratch("cycles.toml");
    std::fs::write(
        &toml,
        "name = \"short_cycles\"\nweights = [\"1\", \"1/2\", \"1/3\"]\n",
    )
    .unwrap();
    // no radius given
    assert_eq!(
        code(&["count", "--config", toml.to_str().unwrap(), "--n", "4"]),
        1
    );
}

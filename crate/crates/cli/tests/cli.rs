use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;

use serde_json::Value;

use cyclosieve_cli::{run, EXIT_OK, EXIT_USAGE, EXIT_VIOLATED};

fn cli(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("cyclosieve")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = cli(args);
    assert!(err.is_empty(), "stderr for {args:?}: {err}");
    (
        code,
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}")),
    )
}

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas/output.schema.json");
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        jsonschema::validator_for(&schema).expect("schema compiles")
    })
}

fn assert_valid(doc: &Value) {
    let errors: Vec<String> = validator()
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

const JSON_COMMANDS: &[&[&str]] = &[
    &["cyclo", "phi", "--m", "5", "--a", "3", "--b", "-1"],
    &["cyclo", "order", "--a", "2", "--q", "11"],
    &["symbol", "--p", "5", "--q", "11", "--n", "5", "--alpha", "2"],
    &[
        "symbol", "--p", "5", "--q", "7", "--n", "3", "--coeffs", "1,2,0,1",
    ],
    &[
        "criterion",
        "main",
        "--p",
        "5",
        "--q",
        "31",
        "--u",
        "1",
        "--v",
        "3",
    ],
    &[
        "criterion",
        "special",
        "--p",
        "5",
        "--q",
        "11",
        "--u",
        "3",
        "--v",
        "1",
    ],
    &["criterion", "special", "--p", "5", "--q", "11", "--n", "10"],
    &[
        "criterion",
        "twisted",
        "--p",
        "5",
        "--q",
        "31",
        "--n",
        "30",
        "--m",
        "2",
    ],
    &[
        "criterion",
        "twisted",
        "--p",
        "5",
        "--q",
        "31",
        "--n",
        "30",
        "--all-m",
    ],
    &[
        "criterion",
        "audit",
        "--p",
        "5",
        "--u",
        "3",
        "--v",
        "1",
        "--q",
        "11,31,41",
    ],
    &[
        "criterion",
        "audit",
        "--p",
        "7",
        "--u",
        "2",
        "--v",
        "1",
        "--qmax",
        "60",
    ],
    &[
        "survey",
        "even-order",
        "--p",
        "491",
        "--bound",
        "491",
        "--compare",
        "paper",
    ],
    &["survey", "even-order", "--p", "7", "--bound", "100"],
    &["survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "200"],
    &[
        "survey",
        "scan",
        "--p",
        "5",
        "--qmin",
        "7",
        "--qmax",
        "200",
        "--mode",
        "special-auto",
    ],
    &["survey", "hypothesis", "--p", "5", "--q", "31"],
    &["survey", "rank", "--p", "5", "--n", "10", "--trials", "10"],
    &["bounds", "--p", "5"],
    &["bounds", "--p", "37"],
];

#[test]
fn every_json_output_matches_schema() {
    for args in JSON_COMMANDS {
        let (code, doc) = json(args);
        assert!(code == EXIT_OK || code == EXIT_VIOLATED, "{args:?} exited {code}");
        assert_eq!(doc["schema_version"], 1);
        assert_valid(&doc);
    }
}

#[test]
fn schema_rejects_malformed_envelopes() {
    let bad = serde_json::json!({"schema_version": 1, "command": "bounds", "result": {"p": 5}});
    assert!(!validator().is_valid(&bad));
    let bad = serde_json::json!({"schema_version": 2, "command": "bounds", "result": {}});
    assert!(!validator().is_valid(&bad));
}

#[test]
fn audit_violation_exits_one() {
    let (code, doc) = json(&[
        "criterion",
        "audit",
        "--p",
        "5",
        "--u",
        "3",
        "--v",
        "1",
        "--q",
        "11",
    ]);
    assert_eq!(code, EXIT_VIOLATED);
    let entry = &doc["result"]["entries"][0];
    assert_eq!(entry["q"], 11);
    assert_eq!(entry["params"]["n"], 5);
    let verdict = &entry["verdicts"][0];
    assert_eq!(verdict["kind"], "special-n-p");
    assert_eq!(verdict["holds"], false);
    assert_eq!(verdict["clauses"][0]["name"], "q mod p^2 = 1");
    assert_eq!(verdict["clauses"][0]["holds"], false);
}

#[test]
fn policy_never_turns_violation_into_success() {
    let args = [
        "criterion",
        "audit",
        "--p",
        "5",
        "--u",
        "3",
        "--v",
        "1",
        "--q",
        "11",
        "--assume-p-principal",
        "never",
    ];
    let (code, doc) = json(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(doc["result"]["violated"], false);
    assert_eq!(doc["result"]["entries"][0]["verdicts"][0]["holds"], false);
}

#[test]
fn main_criterion_powers() {
    let (code, doc) = json(&[
        "criterion",
        "main",
        "--p",
        "5",
        "--q",
        "31",
        "--u",
        "1",
        "--v",
        "3",
    ]);
    assert_eq!(code, EXIT_VIOLATED);
    assert_eq!(doc["result"]["paper_applicable"], true);
    let v = &doc["result"]["verdict"];
    assert_eq!(v["kind"], "main-with-k-p-1");
    assert_eq!(v["holds"], false);
}

#[test]
fn bounds_example() {
    let (code, doc) = json(&["bounds", "--p", "5"]);
    assert_eq!(code, EXIT_OK);
    let m = doc["result"]["minkowski"].as_f64().unwrap();
    assert!((m - 1.699).abs() < 1e-3, "{m}");
    assert_eq!(doc["result"]["regular"], true);
}

#[test]
fn even_order_comparison_itemizes_differences() {
    let (code, doc) = json(&[
        "survey",
        "even-order",
        "--p",
        "491",
        "--bound",
        "491",
        "--compare",
        "paper",
    ]);
    assert_eq!(code, EXIT_OK);
    let primes: Vec<u64> = serde_json::from_value(doc["result"]["primes"].clone()).unwrap();
    assert_eq!(&primes[..11], &[2, 7, 19, 23, 29, 47, 53, 59, 67, 73, 89]);
    let c = &doc["result"]["comparison"];
    assert_eq!(c["reference_count_raw"], 48);
    assert_eq!(c["missing_from_reference"], serde_json::json!([449]));
    assert_eq!(c["extra_in_reference"], serde_json::json!([]));
}

#[test]
fn big_values_are_strings() {
    let (_, doc) = json(&[
        "cyclo",
        "phi",
        "--m",
        "7",
        "--a",
        "123456789",
        "--b",
        "-987654321",
    ]);
    let s = doc["result"]["value"].as_str().unwrap();
    assert!(s.len() > 40, "{s}");
}

#[test]
fn json_is_deterministic() {
    for args in JSON_COMMANDS {
        assert_eq!(cli(args).1, cli(args).1, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["bogus"],
        &["bounds"],
        &["bounds", "--p", "5", "--nope"],
        &["criterion", "main", "--p", "5", "--q", "11"],
        &["criterion", "main", "--p", "4", "--q", "11", "--n", "2"],
        &["criterion", "main", "--p", "5", "--q", "12", "--n", "2"],
        &["criterion", "main", "--p", "5", "--q", "11", "--n", "3"],
        &["criterion", "main", "--p", "5", "--q", "11", "--u", "3"],
        &[
            "symbol", "--p", "5", "--q", "11", "--n", "5", "--alpha", "2", "--coeffs", "1",
        ],
        &[
            "survey",
            "scan",
            "--p",
            "5",
            "--qmin",
            "7",
            "--qmax",
            "50",
            "--workers",
            "0",
        ],
        &[
            "survey",
            "scan",
            "--p",
            "5",
            "--qmin",
            "7",
            "--qmax",
            "50",
            "--stop-after",
            "3",
        ],
        &["survey", "rank", "--p", "5", "--n", "10", "--trials", "2"],
        &["--format", "xml", "bounds", "--p", "5"],
    ];
    for args in cases {
        let (code, out, err) = cli(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {out}{err}");
        assert!(out.is_empty(), "{args:?} wrote to stdout");
        assert!(err.starts_with("error:"), "{args:?}: {err}");
    }
}

#[test]
fn validation_errors_are_single_line() {
    let (code, _, err) = cli(&["criterion", "main", "--p", "5", "--q", "11", "--n", "3"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["survey", "scan", "--help"]] {
        let (code, out, _) = cli(args);
        assert_eq!(code, EXIT_OK);
        assert!(!out.is_empty());
    }
}

#[test]
fn human_format() {
    let (code, out, _) = cli(&[
        "cyclo", "phi", "--m", "5", "--a", "3", "--b", "-1", "--format", "human",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "Phi_5(3, -1) = 61");
    let (code, out, _) = cli(&[
        "criterion",
        "audit",
        "--p",
        "5",
        "--u",
        "3",
        "--v",
        "1",
        "--q",
        "11",
        "--format",
        "human",
    ]);
    assert_eq!(code, EXIT_VIOLATED);
    assert!(out.contains("violated at q = 11"), "{out}");
}

#[test]
fn jsonl_scan_rows_match_json_aggregates() {
    let args = ["survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "300"];
    let (_, doc) = json(&args);
    let (code, out, _) = cli(&[&args[..], &["--format", "jsonl"]].concat());
    assert_eq!(code, EXIT_OK);
    let rows: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let agg = &doc["result"]["aggregates"];
    assert_eq!(rows.len() as u64, agg["records"].as_u64().unwrap());
    let full = rows.iter().filter(|r| r["holds"] == true).count() as u64;
    assert_eq!(full, agg["main"]["full_family_passes"].as_u64().unwrap());
    let qs: Vec<u64> = rows.iter().map(|r| r["q"].as_u64().unwrap()).collect();
    assert!(qs.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn csv_scan_has_header_and_rows() {
    let (code, out, _) = cli(&[
        "survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "100", "--format", "csv",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..4], ["p", "q", "f", "n"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.len() == header.len()));
}

#[test]
fn csv_key_value_for_scalar_commands() {
    let (code, out, _) = cli(&["bounds", "--p", "5", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("key,value\n"));
    assert!(out.contains("\nregular,true\n"));
}

#[test]
fn checkpoint_resume_matches_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let base = ["survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "600"];
    let (full_rec, full_ck) = (path("full.jsonl"), path("full.ck"));
    let (code, full) = json(&[&base[..], &["--records", &full_rec, "--checkpoint", &full_ck]].concat());
    assert_eq!(code, EXIT_OK);
    assert_eq!(full["result"]["completed"], true);

    let (part_rec, part_ck) = (path("part.jsonl"), path("part.ck"));
    let resumable = [&base[..], &["--records", &part_rec, "--checkpoint", &part_ck]].concat();
    let (code, first) = json(&[&resumable[..], &["--stop-after", "20"]].concat());
    assert_eq!(code, EXIT_OK);
    assert_eq!(first["result"]["completed"], false);
    let (code, resumed) = json(&resumable);
    assert_eq!(code, EXIT_OK);
    assert_eq!(resumed["result"]["completed"], true);
    assert_eq!(full["result"]["aggregates"], resumed["result"]["aggregates"]);
    assert_eq!(
        std::fs::read(&full_rec).unwrap(),
        std::fs::read(&part_rec).unwrap()
    );
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclosieve"))
}

#[test]
fn workers_env_fallback() {
    let args = [
        "survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "400", "--format", "jsonl",
    ];
    let serial = binary()
        .args(args)
        .env_remove("CYCLOSIEVE_WORKERS")
        .output()
        .unwrap();
    let parallel = binary()
        .args(args)
        .env("CYCLOSIEVE_WORKERS", "4")
        .output()
        .unwrap();
    assert!(serial.status.success() && parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);

    let bad = binary()
        .args(args)
        .env("CYCLOSIEVE_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(bad.stdout.is_empty());
    let bad = binary()
        .args(args)
        .env("CYCLOSIEVE_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));

    // explicit flag wins over the environment
    let flag = binary()
        .args(args)
        .args(["--workers", "2"])
        .env("CYCLOSIEVE_WORKERS", "0")
        .output()
        .unwrap();
    assert!(flag.status.success());
    assert_eq!(flag.stdout, serial.stdout);
}

#[test]
fn binary_exit_codes_and_streams() {
    let out = binary()
        .args([
            "criterion",
            "audit",
            "--p",
            "5",
            "--u",
            "3",
            "--v",
            "1",
            "--q",
            "11",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VIOLATED));
    assert!(out.stderr.is_empty());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid(&doc);

    let out = binary().args(["bounds", "--p", "5", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

struct ClosedPipe;

impl std::io::Write for ClosedPipe {
    fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
        Err(std::io::ErrorKind::BrokenPipe.into())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

#[test]
fn closed_stdout_ends_quietly() {
    for format in ["json", "jsonl", "csv", "human"] {
        let argv = [
            "cyclosieve",
            "survey",
            "scan",
            "--p",
            "5",
            "--qmin",
            "7",
            "--qmax",
            "200",
            "--format",
            format,
        ];
        let mut err = Vec::new();
        let code = run(argv, &mut ClosedPipe, &mut err);
        assert_eq!(code, EXIT_OK, "{format}: {}", String::from_utf8_lossy(&err));
        assert!(err.is_empty(), "{format}");
    }
}

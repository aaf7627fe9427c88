//! End-to-end tests of the `polbench` binary: exit codes, stream separation,
//! deterministic output, flag/file equivalence, and JSON schema conformance.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const SEED_ENV: &str = "POLBENCH_SEED";

fn polbench(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_polbench"));
    // Isolate from whatever the ambient environment defines.
    cmd.env_remove(SEED_ENV);
    cmd.args(args);
    cmd
}

fn output(cmd: &mut Command) -> Output {
    cmd.output().expect("binary spawns")
}

fn run_ok(args: &[&str]) -> String {
    let out = output(&mut polbench(args));
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        out.stderr.is_empty(),
        "stderr not empty for {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is UTF-8")
}

fn run_fail(args: &[&str]) -> (i32, String) {
    let out = output(&mut polbench(args));
    let code = out.status.code().expect("no signal");
    assert_ne!(code, 0, "expected failure for {args:?}");
    assert!(
        out.stdout.is_empty(),
        "failed command wrote to stdout: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    (code, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn bench_file(content: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(content.as_bytes()).expect("write bench file");
    file
}

fn path_of(file: &tempfile::NamedTempFile) -> &str {
    file.path().to_str().expect("UTF-8 temp path")
}

#[test]
fn exit_zero_on_success_and_help() {
    run_ok(&["simulate", "--theta", "90,0,0,90"]);
    assert!(output(polbench(&["--help"]).env_remove(SEED_ENV))
        .status
        .success());
}

#[test]
fn exit_two_on_usage_errors() {
    for args in [
        vec!["simulate", "--theta", "1,2,3"],
        vec!["simulate", "--theta", "1,2,3,nope"],
        vec!["simulate", "--theta", "0,0,0,0", "--e", "2"],
        vec!["simulate", "--theta", "0,0,0,0", "--samples", "10"],
        vec!["curve", "--kind", "sideways"],
        vec!["curve", "--kind", "upper", "--e", "0.5"],
        vec!["sweep", "--theta", "0,0,0,0", "--estimator", "incoherent"],
        vec!["regimes", "--estimator", "nonsense"],
        vec!["no-such-command"],
    ] {
        let (code, stderr) = run_fail(&args);
        assert_eq!(code, 2, "args {args:?}, stderr: {stderr}");
    }
}

#[test]
fn exit_three_on_file_errors() {
    let (code, stderr) = run_fail(&["run", "/nonexistent/path.bench"]);
    assert_eq!(code, 3, "stderr: {stderr}");

    let bad = bench_file("analyzers_deg 0 0 0\n");
    let (code, stderr) = run_fail(&["run", path_of(&bad)]);
    assert_eq!(code, 3);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");

    let (code, stderr) = run_fail(&["validate", path_of(&bad)]);
    assert_eq!(code, 3);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["regimes", "--format", "csv"],
        vec!["regimes", "--format", "json"],
        vec![
            "simulate",
            "--theta",
            "30,60,10,80",
            "--estimator",
            "coherent-mc",
            "--samples",
            "20000",
            "--seed",
            "5",
        ],
        vec![
            "simulate",
            "--theta",
            "30,60,10,80",
            "--estimator",
            "detection-mc",
            "--samples",
            "20000",
            "--seed",
            "5",
            "--format",
            "json",
        ],
        vec!["curve", "--kind", "all", "--points", "19"],
        vec!["sweep", "--theta", "45,45,45,45", "--points", "11"],
    ] {
        let first = run_ok(&args);
        let second = run_ok(&args);
        assert_eq!(first, second, "args {args:?}");
    }
}

#[test]
fn run_file_matches_equivalent_flags() {
    let cases: Vec<(String, Vec<&str>)> = vec![
        (
            "analyzers_deg 45 45 45 45\ninterference 1\nestimator coherent-mc\nsamples 5000\nseed 7\n".into(),
            vec![
                "simulate", "--theta", "45,45,45,45", "--estimator", "coherent-mc",
                "--samples", "5000", "--seed", "7",
            ],
        ),
        (
            "analyzers_deg 10 20 30 40\ninterference 0.5\n".into(),
            vec!["simulate", "--theta", "10,20,30,40", "--e", "0.5"],
        ),
        (
            "interference 1\nestimator incoherent\nscan regimes\n".into(),
            vec!["regimes", "--estimator", "incoherent"],
        ),
        (
            "scan skew-middle points 31\n".into(),
            vec!["curve", "--kind", "middle", "--points", "31"],
        ),
        (
            "scan skew-lower\n".into(),
            vec!["curve", "--kind", "lower"],
        ),
        (
            "analyzers_deg 45 45 45 45\nscan overlap points 21\n".into(),
            vec!["sweep", "--theta", "45,45,45,45", "--points", "21"],
        ),
    ];
    for (content, flags) in cases {
        let file = bench_file(&content);
        for format in ["csv", "json"] {
            let run_args = vec!["run", path_of(&file), "--format", format];
            let mut flag_args = flags.clone();
            flag_args.extend(["--format", format]);
            let from_file = run_ok(&run_args);
            let from_flags = run_ok(&flag_args);
            assert_eq!(
                from_file, from_flags,
                "file {content:?} vs flags {flags:?} ({format})"
            );
        }
    }
}

#[test]
fn reports_never_mention_the_input_path() {
    let file = bench_file("scan skew-upper points 5\n");
    let text = run_ok(&["run", path_of(&file)]);
    assert!(!text.contains(path_of(&file)));
}

#[test]
fn validate_prints_canonical_form() {
    let file = bench_file(
        "# trailing comment\n\nseed 9\nanalyzers_deg 0 45 90 135\nestimator detection-mc\n",
    );
    let text = run_ok(&["validate", path_of(&file)]);
    assert_eq!(
        text,
        "analyzers_deg 0 45 90 135\ninterference 1\nestimator detection-mc\nseed 9\n"
    );

    // Canonical output is a fixed point of validate.
    let canonical = bench_file(&text);
    assert_eq!(run_ok(&["validate", path_of(&canonical)]), text);
}

#[test]
fn seed_environment_fallback() {
    let args = [
        "simulate",
        "--theta",
        "10,20,30,40",
        "--estimator",
        "coherent-mc",
        "--samples",
        "1000",
    ];

    let unseeded = run_ok(&args);
    assert!(unseeded.contains("# seed: 0\n"));

    let out = output(polbench(&args).env(SEED_ENV, "9"));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# seed: 9\n"));

    // An explicit flag wins over the environment.
    let mut flag_args = args.to_vec();
    flag_args.extend(["--seed", "4"]);
    let out = output(polbench(&flag_args).env(SEED_ENV, "9"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# seed: 4\n"));

    // A file seed also wins over the environment.
    let file = bench_file(
        "analyzers_deg 10 20 30 40\nestimator coherent-mc\nsamples 1000\nseed 4\n",
    );
    let out = output(polbench(&["run", path_of(&file)]).env(SEED_ENV, "9"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# seed: 4\n"));

    // A garbage value only matters when it is actually consulted.
    let out = output(polbench(&args).env(SEED_ENV, "not-a-seed"));
    assert_eq!(out.status.code(), Some(2));
    let out = output(
        polbench(&["simulate", "--theta", "0,0,0,0"]).env(SEED_ENV, "not-a-seed"),
    );
    assert!(out.status.success());
}

#[test]
fn matching_seeds_match_across_entry_points() {
    let args = [
        "simulate",
        "--theta",
        "10,20,30,40",
        "--estimator",
        "coherent-mc",
        "--samples",
        "1000",
    ];
    let unseeded = run_ok(&args);
    let mut seeded_args = args.to_vec();
    seeded_args.extend(["--seed", "0"]);
    assert_eq!(unseeded, run_ok(&seeded_args));

    let out = output(polbench(&args).env(SEED_ENV, "0"));
    assert_eq!(unseeded, String::from_utf8(out.stdout).unwrap());
}

fn schema_params() -> Vec<String> {
    let schema_path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schema/output-v1.schema.json"
    );
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    schema["properties"]["params"]["properties"]
        .as_object()
        .expect("schema lists params")
        .keys()
        .cloned()
        .collect()
}

fn assert_matches_schema(doc: &Value, known_params: &[String]) {
    let object = doc.as_object().expect("report is an object");
    for key in ["schema_version", "command", "params", "decisions", "columns", "rows"] {
        assert!(object.contains_key(key), "missing {key}");
    }
    assert_eq!(object.len(), 6, "unexpected top-level keys");
    assert_eq!(doc["schema_version"], "1");
    let command = doc["command"].as_str().expect("command is a string");
    assert!(["simulate", "regimes", "curve", "sweep"].contains(&command));
    for key in doc["params"].as_object().expect("params object").keys() {
        assert!(
            known_params.iter().any(|k| k == key),
            "param {key:?} missing from the schema"
        );
    }
    for value in doc["decisions"].as_object().expect("decisions object").values() {
        assert!(value.is_string());
    }
    let columns = doc["columns"].as_array().expect("columns array");
    assert!(!columns.is_empty());
    assert!(columns.iter().all(Value::is_string));
    for row in doc["rows"].as_array().expect("rows array") {
        let cells = row.as_array().expect("row is an array");
        assert_eq!(cells.len(), columns.len(), "ragged row");
        assert!(cells.iter().all(|c| c.is_number() || c.is_string()));
    }
}

#[test]
fn json_reports_conform_to_the_shipped_schema() {
    let known_params = schema_params();
    for args in [
        vec!["simulate", "--theta", "90,0,0,90"],
        vec![
            "simulate", "--theta", "45,45,45,45", "--estimator", "detection-mc",
            "--samples", "2000", "--seed", "1",
        ],
        vec!["regimes", "--estimator", "coherent-mc", "--samples", "2000"],
        vec!["curve", "--kind", "all", "--points", "5"],
        vec!["curve", "--kind", "upper", "--points", "5"],
        vec!["sweep", "--theta", "45,45,45,45", "--points", "5"],
    ] {
        let mut json_args = args.clone();
        json_args.extend(["--format", "json"]);
        let text = run_ok(&json_args);
        let doc: Value = serde_json::from_str(&text).expect("valid JSON");
        assert_matches_schema(&doc, &known_params);
    }
}

#[test]
fn csv_and_json_agree_on_the_numbers() {
    let args = ["curve", "--kind", "middle", "--points", "7"];
    let csv = run_ok(&args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let doc: Value = serde_json::from_str(&run_ok(&json_args)).unwrap();

    let csv_rows: Vec<&str> = csv
        .lines()
        .filter(|line| !line.starts_with('#'))
        .skip(1)
        .collect();
    let json_rows = doc["rows"].as_array().unwrap();
    assert_eq!(csv_rows.len(), json_rows.len());
    for (line, row) in csv_rows.iter().zip(json_rows) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        for (field, cell) in fields.iter().zip(row.as_array().unwrap()) {
            assert_eq!(*field, cell.as_f64().unwrap());
        }
    }
}

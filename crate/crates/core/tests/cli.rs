use std::path::PathBuf;
use std::process::{Command, Output};
use ybx::cli_harness::{catalog_append, catalog_digests, catalog_specs, parse_spec_str, serialize_spec, spec_digest, BUNDLED};

fn ybx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ybx"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("YBX_JOBS")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ybx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = std::fs::remove_file(&p);
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn bundled_documents_round_trip() {
    for (name, text) in BUNDLED {
        let spec = parse_spec_str(text, name).unwrap();
        assert_eq!(serialize_spec(&spec), text, "{name}");
        let again = parse_spec_str(&serialize_spec(&spec), name).unwrap();
        assert_eq!(spec_digest(&again), spec_digest(&spec));
    }
}

#[test]
fn generate_reproduces_bundled_constant() {
    let o = ybx(&["generate", "constant", "--m", "3", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("../specs/constant_m3.json"));
}

#[test]
fn passing_check_exits_zero() {
    let o = ybx(&["check", "double-jacobi", "-i", "specs/constant_m3.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS] db"));
}

#[test]
fn failing_check_exits_one_with_counterexample() {
    let o = ybx(&["check", "reflection-form", "-i", "specs/quadratic_m2.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample"));
}

#[test]
fn input_errors_exit_two() {
    let o = ybx(&["check", "aybe", "-i", "specs/no_such_file.json"]);
    assert_eq!(o.status.code(), Some(2));

    let bad = scratch("malformed.json");
    std::fs::write(&bad, "{\n \"format\": ,\n}").unwrap();
    let o = ybx(&["check", "double-jacobi", "-i", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed.json:2:"), "{}", stderr(&o));

    let skew = scratch("not_skew.json");
    std::fs::write(&skew, r#"{"format":"ybx-trace/1","kind":"constant","m":2,"c":[["0","1"],["1","0"]]}"#).unwrap();
    let o = ybx(&["check", "double-jacobi", "-i", skew.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dconst"));

    let o = ybx(&["check", "qybe", "-i", "specs/constant_m3.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_output_is_byte_stable() {
    let args = ["check", "double-jacobi", "--m", "3", "--samples", "5", "--seed", "17", "--jobs", "3", "--format", "json"];
    let first = ybx(&args);
    let second = ybx(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let single = ybx(&["check", "double-jacobi", "--m", "3", "--samples", "5", "--seed", "17", "--jobs", "1", "--format", "json"]);
    assert_eq!(first.stdout, single.stdout);
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 5);
}

#[test]
fn catalog_is_idempotent() {
    let cat = scratch("catalog.jsonl");
    for _ in 0..2 {
        let o = ybx(&["check", "double-jacobi", "-i", "specs/constant_m3.json", "--catalog", cat.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(catalog_digests(&cat).unwrap().len(), 1);

    let spec = parse_spec_str(BUNDLED[0].1, BUNDLED[0].0).unwrap();
    assert!(!catalog_append(&spec, &[], 0, &cat).unwrap());
    let other = parse_spec_str(BUNDLED[1].1, BUNDLED[1].0).unwrap();
    assert!(catalog_append(&other, &[], 0, &cat).unwrap());
    let stored = catalog_specs(&cat).unwrap();
    assert_eq!(stored.len(), 2);
    assert_eq!(spec_digest(&stored[1]), spec_digest(&other));
}

#[test]
fn search_writes_solutions_to_catalog() {
    let cat = scratch("search.jsonl");
    let o = ybx(&["search", "quadratic", "--m", "2", "--support", "2", "--catalog", cat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let stored = catalog_specs(&cat).unwrap();
    assert!(!stored.is_empty());
    assert!(stored.iter().all(|s| s.kind_name() == "quadratic"));
}

#[test]
fn unknown_check_name_is_a_usage_error() {
    let o = ybx(&["check", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
}

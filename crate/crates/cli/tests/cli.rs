use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hurwitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurwitz"))
        .args(args)
        .env_remove("HURWITZ_BUDGET")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        write(dir.path(), "trivial3.json", r#"{"kind": "trivial", "n": 3}"#);
        write(dir.path(), "bad.json", r#"{"kind": "table", "act": [[1, 1], [0, 1]]}"#);
        write(
            dir.path(),
            "s3t.json",
            r#"{"kind": "conjugation", "group": {"kind": "symmetric", "n": 3}, "classes": ["(1,2)"]}"#,
        );
        write(dir.path(), "s3.json", r#"{"kind": "symmetric", "n": 3}"#);
        write(dir.path(), "z3.json", r#"{"kind": "cyclic", "n": 3}"#);
        write(dir.path(), "z2.json", r#"{"kind": "cyclic", "n": 2}"#);
        write(dir.path(), "inv.json", r#"[{"gamma": "1", "images": {"1": "2"}}]"#);
        Fixture { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }
}

#[test]
fn rack_check_exit_codes() {
    let f = Fixture::new();
    let ok = hurwitz(&["rack", "check", &f.path("trivial3.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["status"], "valid");
    let bad = hurwitz(&["rack", "check", &f.path("bad.json")]);
    assert_eq!(bad.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(v["status"], "invalid");
}

#[test]
fn usage_errors_exit_2() {
    let f = Fixture::new();
    assert_eq!(hurwitz(&["rack", "check", &f.path("trivial3.json"), "--bogus"]).status.code(), Some(2));
    assert_eq!(hurwitz(&["components", "enumerate", &f.path("s3t.json")]).status.code(), Some(2));
    assert_eq!(hurwitz(&["--workers", "0", "group", "info", &f.path("s3.json")]).status.code(), Some(2));
    assert_eq!(hurwitz(&["--budget", "0", "group", "info", &f.path("s3.json")]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1_with_json() {
    let f = Fixture::new();
    let out = hurwitz(&["--error-json", "frobenius", "d", "--group", &f.path("s3.json"), "--classes", "(1,2)", "--q", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "GcdViolation");
    assert!(err["message"].as_str().unwrap().contains('3'));
    let missing = hurwitz(&["group", "info", &f.path("nope.json")]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.json"));
}

#[test]
fn budget_exceeded_is_a_domain_error() {
    let f = Fixture::new();
    let out = hurwitz(&["--error-json", "--budget", "10", "components", "enumerate", &f.path("s3t.json"), "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "BudgetExceeded");
}

#[test]
fn enumerate_s3_transpositions() {
    let f = Fixture::new();
    let v = json(&hurwitz(&["components", "enumerate", &f.path("s3t.json"), "--n", "2"]));
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 5);
    let mut sizes: Vec<u64> = records.iter().map(|r| r["orbit_size"].as_u64().unwrap()).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 1, 1, 3, 3]);
}

#[test]
fn catalog_round_trips_through_frobenius() {
    let f = Fixture::new();
    let cat = f.path("cat.json");
    let out = hurwitz(&["--out", &cat, "components", "enumerate", &f.path("s3t.json"), "--n", "3"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let fixed = json(&hurwitz(&["frobenius", "fixed", &cat, "--q", "5"]));
    let rows = fixed["records"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["fixed"] == true));
    let csv = hurwitz(&["--format", "csv", "frobenius", "fixed", &cat, "--q", "5"]);
    assert!(csv.status.success());
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "record,canonical_rep,multidegree,boundary_monodromy,image,fixed"
    );
}

#[test]
fn csv_headers_match_help() {
    let f = Fixture::new();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (
            vec!["components".into(), "enumerate".into(), f.path("s3t.json"), "--n".into(), "2".into()],
            "record,canonical_rep,orbit_size,multidegree,boundary_monodromy,generated_subgroup",
        ),
        (
            vec![
                "components".into(),
                "stable-scan".into(),
                f.path("s3.json"),
                "--classes".into(),
                "(1,2)".into(),
                "--n-range".into(),
                "2..4".into(),
            ],
            "monodromy,n,count,obstructed",
        ),
        (
            vec!["malle".into(), "series".into(), "--orbits".into(), "2:1".into(), "--q".into(), "2".into(), "--delta-max".into(), "6".into()],
            "delta,a_delta,partial_sum,normalized",
        ),
    ];
    for (args, header) in cases {
        let mut full = vec!["--format".to_string(), "csv".to_string()];
        full.extend(args.iter().cloned());
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        let out = hurwitz(&refs);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next().unwrap(), header);
        let help = hurwitz(&[args[0].as_str(), args[1].as_str(), "--help"]);
        assert!(String::from_utf8_lossy(&help.stdout).contains(header), "help for {:?}", &args[..2]);
    }
}

#[test]
fn clm_csv_has_header_line() {
    let f = Fixture::new();
    let out = hurwitz(&[
        "--format",
        "csv",
        "clm",
        "compare",
        "--H",
        &f.path("z3.json"),
        "--Gamma",
        &f.path("z2.json"),
        "--action",
        &f.path("inv.json"),
        "--q",
        "5",
        "--n-range",
        "2..6",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(header["moment"], "1/3");
    assert_eq!(lines.next().unwrap(), "n,pi_G,pi_Gamma,diff,d_G,d_Gamma");
}

#[test]
fn outputs_are_byte_identical() {
    let f = Fixture::new();
    let runs = [
        vec!["components".to_string(), "enumerate".into(), f.path("s3t.json"), "--n".into(), "4".into()],
        vec!["h2".to_string(), f.path("s3.json"), "--classes".into(), "all".into(), "--emit-cycles".into()],
        vec!["group".to_string(), "info".into(), f.path("s3.json")],
    ];
    for args in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = hurwitz(&refs);
        let b = hurwitz(&[&["--workers", "3"][..], &refs].concat());
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn group_info_summary() {
    let f = Fixture::new();
    let v = json(&hurwitz(&["group", "info", &f.path("s3.json")]));
    assert_eq!(v["order"], 6);
    assert_eq!(v["abelian"], false);
}

#[test]
fn multidegree_filter_parses_a_list() {
    let f = Fixture::new();
    let rack = write(
        f.dir.path(),
        "z3nz.json",
        r#"{"kind": "conjugation", "group": {"kind": "cyclic", "n": 3}, "subset": ["1", "2"]}"#,
    );
    let v = json(&hurwitz(&["components", "enumerate", rack.to_str().unwrap(), "--n", "3", "--multidegree", "1,2"]));
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["orbit_size"], 3);
    assert_eq!(v["multidegree_filter"], serde_json::json!([1, 2]));
}

use std::fs;
use std::path::{Path, PathBuf};

use tfsmell::cli::run;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn tfsmell(args: &[&str]) -> Out {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("tfsmell").chain(args.iter().copied());
    let code = run(argv, &mut stdout, &mut stderr);
    Out { code, stdout: String::from_utf8(stdout).unwrap(), stderr: String::from_utf8(stderr).unwrap() }
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn temp_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn catalog_lists_seven_smells() {
    let out = tfsmell(&["catalog"]);
    assert_eq!(out.code, 0);
    for id in ["SS1", "SS2", "SS3", "SS4", "SS5", "SS6", "SS7"] {
        assert_eq!(out.stdout.matches(&format!("\n{id} ")).count(), 1, "{id}");
    }
    assert_eq!(out.stdout.matches("fix: ").count(), 7);
    assert!(out.stdout.contains("[General]") && out.stdout.contains("[Demand]") && out.stdout.contains("[Application]"));
}

#[test]
fn catalog_json_is_loadable_shape() {
    let out = tfsmell(&["catalog", "--format", "json"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 7);
    assert_eq!(items[0]["id"], "SS1");
    assert_eq!(items[0]["category"], 2);
}

#[test]
fn lint_clean_and_smelly() {
    let clean = tfsmell(&["lint", &fixture("clean")]);
    assert_eq!(clean.code, 0, "{}", clean.stdout);
    let smelly = tfsmell(&["lint", &fixture("smelly")]);
    assert_eq!(smelly.code, 1);
    // expected from the fixture's construction
    for line in [
        "main.tf:1:1: SS6",
        "main.tf:10:3: SS2",
        "main.tf:12:3: SS1",
        "main.tf:15:1: SS3",
        "main.tf:22:3: SS4",
        "rules.tf:1:1: SS7",
    ] {
        assert!(smelly.stdout.contains(line), "missing {line}\n{}", smelly.stdout);
    }
    assert_eq!(smelly.stdout.lines().filter(|l| l.contains(": SS")).count(), 6);
}

#[test]
fn lint_json_and_sarif() {
    let out = tfsmell(&["lint", &fixture("smelly"), "--format", "json"]);
    assert_eq!(out.code, 1);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["findings"].as_array().unwrap().len(), 6);
    let out = tfsmell(&["lint", &fixture("smelly"), "--format", "sarif"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["version"], "2.1.0");
}

#[test]
fn empty_report_json_is_canonical() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["lint", "scan"] {
        let out = tfsmell(&[sub, dir.path().to_str().unwrap(), "--format", "json"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout, r#"{"scanned_files":0,"findings":[]}"#);
    }
}

#[test]
fn scan_reports_prevalence() {
    let out = tfsmell(&["scan", &fixture("smelly"), "--format", "json", "--jobs", "3", "--seed", "9"]);
    assert_eq!(out.code, 1);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let ss7 = v["stats"]["smells"].as_array().unwrap().iter().find(|s| s["smell"] == "SS7").unwrap();
    assert_eq!(ss7["files_affected"], 1);
    assert_eq!(ss7["percent"], "50.00%");
    let text = tfsmell(&["scan", &fixture("smelly")]);
    assert!(text.stdout.contains("50.00%"));
}

#[test]
fn config_threshold_changes_result() {
    let dir = tempfile::tempdir().unwrap();
    let proj = dir.path().join("p");
    fs::create_dir(&proj).unwrap();
    let six: String = (0..6).map(|k| format!("resource \"null_resource\" \"r{k}\" {{}}\n")).collect();
    temp_file(&proj, "main.tf", &format!("terraform {{\n  backend \"s3\" {{}}\n}}\n{six}"));
    let cfg = temp_file(dir.path(), "cfg.json", r#"{"ss7_max_resources_per_file": 5}"#);
    assert_eq!(tfsmell(&["lint", proj.to_str().unwrap()]).code, 0);
    let out = tfsmell(&["lint", proj.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("SS7"), "{}", out.stdout);
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = temp_file(dir.path(), "cfg.json", "{\n  \"ss9_foo\": 1\n}\n");
    let out = tfsmell(&["lint", &fixture("clean"), "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("ss9_foo"), "{}", out.stderr);
    assert!(out.stderr.contains("cfg.json:2:"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    for args in [&["frobnicate"][..], &["lint"], &["lint", ".", "--bogus"], &[]] {
        let out = tfsmell(args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stderr.contains("Usage"), "{args:?}: {}", out.stderr);
    }
    let out = tfsmell(&["scan", ".", "--engine", "magic"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("unknown engine `magic`"), "{}", out.stderr);
}

#[test]
fn conflicting_flags_are_rejected() {
    let out = tfsmell(&["sample", ".", "--manifest", "m.jsonl", "--seed", "1"]);
    assert_eq!(out.code, 2);
    let out = tfsmell(&["cluster", "--format", "sarif"]);
    assert_eq!(out.code, 2);
}

#[test]
fn version_and_help() {
    let out = tfsmell(&["--version"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("tfsmell") && out.stdout.contains("catalog 1"), "{}", out.stdout);
    let out = tfsmell(&["--help"]);
    assert_eq!(out.code, 0);
    for sub in ["lint", "scan", "cluster", "harvest", "catalog", "sample"] {
        assert!(out.stdout.contains(sub), "{sub}");
    }
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = tfsmell(&["lint", &fixture("smelly"), "--format", "json", "--output", dest.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dest).unwrap()).unwrap();
    assert_eq!(v["scanned_files"], 2);
}

#[test]
fn missing_root_is_an_error() {
    let out = tfsmell(&["scan", "/definitely/not/here"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with("error:"));
}

#[test]
fn cluster_outputs() {
    let out = tfsmell(&["cluster", "--format", "json"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["leaves"].as_array().unwrap().len(), 7);
    assert_eq!(v["merges"].as_array().unwrap().len(), 6);
    for m in v["merges"].as_array().unwrap() {
        assert!(m["a"].is_u64() && m["b"].is_u64() && m["distance"].is_f64());
    }
    for linkage in ["single", "complete", "average"] {
        let out = tfsmell(&["cluster", "--linkage", linkage]);
        assert!(out.stdout.starts_with("1 General: SS3, SS4, SS6, SS7\n2 Demand: SS1, SS2\n3 Application: SS5\n"), "{}", out.stdout);
    }
}

#[test]
fn custom_catalog_restricts_findings() {
    let dir = tempfile::tempdir().unwrap();
    let cat = temp_file(
        dir.path(),
        "cat.json",
        r#"[{"id":"SS7","name":"Monolith","attributes":[false,false,true,false],"summary":"s","remediation":"r"}]"#,
    );
    let out = tfsmell(&["lint", &fixture("smelly"), "--catalog", cat.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert_eq!(out.stdout.lines().filter(|l| l.contains(": SS")).count(), 1);
    assert!(out.stdout.contains("rules.tf:1:1: SS7"));
}

#[test]
fn sample_from_directory() {
    let dir = tempfile::tempdir().unwrap();
    for r in 0..3 {
        for f in 0..7 {
            let p = dir.path().join(format!("own/r{r}/m{f}.tf"));
            fs::create_dir_all(p.parent().unwrap()).unwrap();
            fs::write(p, "").unwrap();
        }
    }
    let a = tfsmell(&["sample", dir.path().to_str().unwrap(), "--seed", "7", "--format", "json"]);
    assert_eq!(a.code, 0);
    let b = tfsmell(&["sample", dir.path().to_str().unwrap(), "--seed", "7", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    let sel = v["selections"].as_object().unwrap();
    assert_eq!(sel.len(), 3);
    for files in sel.values() {
        let n = files.as_array().unwrap().len();
        assert!(n == 4 || n == 5);
    }
}

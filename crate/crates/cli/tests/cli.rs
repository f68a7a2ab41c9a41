use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn prodsys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodsys")).args(args).output().expect("binary runs")
}

fn config(text: &str, suffix: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const FREE_PRODUCT_TRIVIAL: &str = "schema = 1
[monoid]
kind = \"free-product\"
factors = [{ dim = 1 }, { dim = 1 }]
[truncation]
L = 3
";

const NATURALS_DIM_2: &str = "schema = 1
[monoid]
kind = \"total-order\"
factors = [{ dim = 2 }]
[truncation]
L = 3
";

const NATURALS_INFINITE: &str = "schema = 1
[monoid]
kind = \"total-order\"
factors = [{ kind = \"integers\", dim = \"infinite\" }]
[truncation]
L = 3
";

const DENSE: &str = "schema = 1
[monoid]
kind = \"total-order\"
factors = [{ kind = \"rationals-dense\" }]
[truncation]
L = 2
";

#[test]
fn join_oracle_passes_on_free_product_config() {
    let cfg = config(FREE_PRODUCT_TRIVIAL, ".toml");
    let out = prodsys(&["--config", cfg.path().to_str().unwrap(), "check", "--suite", "join-oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("[pass] join-oracle"));
    assert!(text.contains("mismatches=0"));
}

#[test]
fn lemma_suite_passes_on_word_graded_naturals() {
    let cfg = config(NATURALS_DIM_2, ".toml");
    let out = prodsys(&["--config", cfg.path().to_str().unwrap(), "check", "--suite", "lemma-1.1", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("[fail]"));
}

#[test]
fn fixed_seed_output_is_byte_stable() {
    let run = || prodsys(&["check", "--suite", "expectation", "--seed", "11"]).stdout;
    let first = run();
    assert!(!first.is_empty());
    assert_eq!(first, run());
}

#[test]
fn machine_format_is_versioned_json() {
    let out = prodsys(&["--format", "machine", "check", "--suite", "theta"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "check");
    let reports = v["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["status"] == "pass" && r.get("wall_ms").is_none()));

    let out = prodsys(&["--format", "machine", "join", "a", "b"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["join"], "inf");
}

#[test]
fn json_config_is_accepted() {
    let cfg = config(r#"{"schema": 1, "monoid": {"kind": "direct-sum", "rank": 2}}"#, ".json");
    let out = prodsys(&["--config", cfg.path().to_str().unwrap(), "join", "a", "b"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "(1,1)");
}

#[test]
fn verbs_on_default_system() {
    let out = prodsys(&["leq", "ab", "a^2 b"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "false");
    let out = prodsys(&["wick-mul", "i*(a:0)", "i(a:1)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn inexact_result_exits_one() {
    let cfg = config(NATURALS_INFINITE, ".toml");
    let out = prodsys(&["--config", cfg.path().to_str().unwrap(), "norm-diag", "i(e:)i*(e:) + i(a:0)i*(a:0)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("inexact"));
}

#[test]
fn bad_inputs_exit_two() {
    let dense_dim = config(
        "schema = 1\n[monoid]\nkind = \"total-order\"\nfactors = [{ kind = \"rationals-dense\", dim = 3 }]\n",
        ".toml",
    );
    let out = prodsys(&["--config", dense_dim.path().to_str().unwrap(), "join", "a", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dense factors require dimension 1"));

    let no_truncation =
        config("schema = 1\n[monoid]\nkind = \"free-product\"\nfactors = [{ dim = 2 }, { dim = 2 }]\n", ".toml");
    let out = prodsys(&["--config", no_truncation.path().to_str().unwrap(), "fock", "i(a:0)"]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(prodsys(&["join", "a", "c"]).status.code(), Some(2));
    assert_eq!(prodsys(&["check", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(prodsys(&["demo", "nope"]).status.code(), Some(2));
    assert_eq!(prodsys(&["bogus"]).status.code(), Some(2));
}

#[test]
fn dense_monoid_suites_are_unsupported() {
    let cfg = config(DENSE, ".toml");
    let out = prodsys(&["--config", cfg.path().to_str().unwrap(), "check", "--suite", "expectation"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("[unsupported]"));
}

#[test]
fn demos_pass() {
    let out = prodsys(&["demo", "example-1.2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("[64, 64, 64, 64]"));
    assert!(text.contains("[64, 63, 61, 57]"));
    for name in ["oinfty-faithfulness", "free-product-kill"] {
        assert_eq!(prodsys(&["demo", name]).status.code(), Some(0), "{name}");
    }
}

#[test]
fn fock_writes_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let out = prodsys(&["fock", "i(a:0)", "--bound", "2", "--matrix-out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("trusted columns 5/21"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["dim"], 21);
    assert_eq!(v["exact_columns"].as_array().unwrap().iter().filter(|b| b.as_bool() == Some(true)).count(), 5);
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwlab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_reports_validity_in_the_exit_code() {
    let ok = cwlab(&["verify", &fixture("a_4_10.txt"), "--coins", "10", "--mode", "fc"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("valid"));

    let pseudo = fixture("pseudo_4_11.txt");
    let fc = cwlab(&["verify", &pseudo, "--coins", "11", "--mode", "fc"]);
    assert_eq!(fc.status.code(), Some(1));
    assert!(stdout(&fc).contains("fake-set"));
    assert_eq!(cwlab(&["verify", &pseudo, "--coins", "11", "--mode", "pseudo"]).status.code(), Some(0));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(cwlab(&["verify", "missing.txt"]).status.code(), Some(2));
    assert_eq!(cwlab(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0. 1 v 2 : (1), (2).\n").unwrap();
    let o = cwlab(&["verify", bad.to_str().unwrap(), "--coins", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at 1:"));
}

#[test]
fn missing_coin_count_is_inferred_with_a_warning() {
    let o = cwlab(&["verify", &fixture("inline_2_3.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("assuming 3"));
}

#[test]
fn scale_emits_a_valid_larger_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("four_nine.txt");
    let o = cwlab(&["scale", &fixture("inline_2_3.txt"), "--coins", "3", "--times", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(4,9) valid"));
    let back = cwlab(&["verify", out.to_str().unwrap(), "--coins", "9"]);
    assert_eq!(back.status.code(), Some(0));

    let refused = cwlab(&["scale", &fixture("inline_2_4.txt"), "--coins", "4"]);
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn expand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (name, coins) in [("a_4_10.txt", "10"), ("inline_3_6.txt", "6")] {
        let text = cwlab(&["expand", &fixture(name), "--coins", coins]);
        assert!(!stdout(&text).contains("sym"));
        let t = dir.path().join("expanded.txt");
        std::fs::write(&t, text.stdout).unwrap();
        let j = dir.path().join("expanded.json");
        let doc: serde_json::Value =
            serde_json::from_slice(&cwlab(&["--format", "json", "expand", &fixture(name), "--coins", coins]).stdout).unwrap();
        std::fs::write(&j, doc["tree"].to_string()).unwrap();

        let original = stdout(&cwlab(&["verify", &fixture(name), "--coins", coins]));
        for p in [&t, &j] {
            assert_eq!(stdout(&cwlab(&["verify", p.to_str().unwrap(), "--coins", coins])), original);
        }
    }
}

#[test]
fn search_verdicts() {
    let none = cwlab(&["search", "--weighings", "2", "--coins", "5"]);
    assert_eq!(none.status.code(), Some(1));
    assert!(stdout(&none).contains("no solution"));

    let found = cwlab(&["--format", "json", "search", "--weighings", "3", "--coins", "6", "--mode", "scalable"]);
    assert_eq!(found.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&found.stdout).unwrap();
    assert_eq!(v["verdict"], "found");
    assert_eq!(v["schema_version"], "cwlab-cli/1");

    let budget = cwlab(&["search", "--weighings", "4", "--coins", "12", "--node-budget", "50"]);
    assert_eq!(budget.status.code(), Some(1));
    assert!(stdout(&budget).contains("budget exceeded"));
}

#[test]
fn bounds_table_reaches_344() {
    let o = cwlab(&["bounds", "--max-w", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().find(|l| l.trim_start().starts_with("10 ")).unwrap().to_string();
    assert_eq!(row.split_whitespace().collect::<Vec<_>>(), ["10", "324", "344", "343", "343"]);
}

#[test]
fn compose_verifies_its_product() {
    let o = cwlab(&["compose", "--coins", "12", "--group-size", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("valid"));
    assert_eq!(cwlab(&["compose", "--coins", "3", "--group-size", "3"]).status.code(), Some(2));
}

#[test]
fn json_is_stable_across_runs() {
    let args = ["--format", "json", "verify", &fixture("d_6_36.txt"), "--coins", "36"];
    let (a, b) = (cwlab(&args), cwlab(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["input_digest"].as_str().unwrap().starts_with("sha256:"));
}

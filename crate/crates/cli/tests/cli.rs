use std::fs;
use std::process::{Command, Output};

use emc_core::report::from_json;

fn emc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_prints_json_by_default() {
    let o = emc(&["verify", "--n", "6", "--k", "2", "--s", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &v[0];
    assert_eq!(r["claim_id"], "conjecture");
    assert_eq!(r["lhs"], "10/1");
    assert_eq!(r["cmp"], "==");
    assert_eq!(r["pass"], true);
    assert_eq!(r["params"]["n"], 6);
    assert!(r.get("witness").is_none());
}

#[test]
fn out_file_gets_report_and_stdout_gets_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = emc(&["crossover", "--k", "2", "--s", "3..5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().nth(1).unwrap().starts_with("crossover,2,3,"));
    let text = stdout(&o);
    assert!(text.contains("PASS crossover"));
    assert!(text.ends_with("3 reports, 0 failed\n"));
}

#[test]
fn audit_subsets() {
    for claim in ["2", "4", "rx", "lemmas"] {
        let o = emc(&["audit", "--k", "5", "--s", "12626", "--n", "63135", "--claim", claim]);
        assert_eq!(o.status.code(), Some(0), "claim {claim}");
        let r = from_json(&stdout(&o)).unwrap();
        assert!(!r.is_empty() && r.iter().all(|x| x.pass));
    }
    let o = emc(&["audit", "--k", "5", "--s", "12626", "--n", "63135", "--claim", "4", "--g", "1"]);
    let r = from_json(&stdout(&o)).unwrap();
    assert!(r.iter().all(|x| x.params.g.is_none() || x.params.g == Some(1)));
    assert_eq!(emc(&["audit", "--claim", "2", "--g", "1"]).status.code(), Some(2));
}

#[test]
fn window_and_input_errors_exit_two() {
    // Just past the window end.
    assert_eq!(emc(&["audit", "--k", "5", "--s", "12626", "--n", "63161"]).status.code(), Some(2));
    assert_eq!(emc(&["audit", "--k", "5", "--s", "12626", "--n", "63260"]).status.code(), Some(2));
    assert_eq!(emc(&["audit", "--k", "4", "--s", "7000"]).status.code(), Some(2));
    assert_eq!(emc(&["verify", "--n", "20", "--k", "3", "--s", "4"]).status.code(), Some(2));
    assert_eq!(emc(&["transversal", "--k", "9"]).status.code(), Some(2));
    assert_eq!(emc(&["crossover", "--k", "3", "--s", "2"]).status.code(), Some(2));
    assert_eq!(emc(&["verify", "--n", "6", "--k", "2", "--s", "2", "--jobs", "0"]).status.code(), Some(2));
    assert_eq!(emc(&["bogus"]).status.code(), Some(2));
}

#[test]
fn unknown_search_exits_one() {
    let o = emc(&["verify", "--n", "9", "--k", "2", "--s", "3", "--method", "bnb", "--node-budget", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown"));
}

#[test]
fn shift_and_find_g0_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.txt");
    fs::write(&input, "6 2\n4,5\n2,6\n").unwrap();
    let o = emc(&["shift", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "6 2\n1,2\n1,3\n");

    let out = dir.path().join("g.txt");
    let o = emc(&["shift", "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "6 2\n1,2\n1,3\n");

    let o = emc(&["find-g0", "--in", input.to_str().unwrap(), "--s", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "none\n");

    let b = emc_core::constructions::build_b(7, 2, 2).unwrap();
    fs::write(&input, b.to_text()).unwrap();
    let o = emc(&["find-g0", "--in", input.to_str().unwrap(), "--s", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    fs::write(&input, "6 2\n1,2,3\n").unwrap();
    assert_eq!(emc(&["shift", "--in", input.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.txt");
    assert_eq!(emc(&["shift", "--in", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn identities_on_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.txt");
    fs::write(&input, emc_core::constructions::build_a(9, 2, 3).unwrap().to_text()).unwrap();
    let o = emc(&["identities", "--k", "2", "--s", "3", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = from_json(&stdout(&o)).unwrap();
    assert!(r.iter().any(|x| x.claim_id == "identity.weight.file"));
    assert!(r.iter().all(|x| x.pass));
}

#[test]
fn shift_suite_reports_counts() {
    let o = emc(&["shift", "--trials", "60", "--seed", "4", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("shift.families,,,,,,,60/1,60/1,==,true,"));
}

#[test]
fn transversal_checks_individually() {
    for check in ["counts", "cyclic", "badpairs", "q", "product"] {
        let o = emc(&["transversal", "--k", "3,4", "--check", check]);
        assert_eq!(o.status.code(), Some(0), "{check}");
        let r = from_json(&stdout(&o)).unwrap();
        assert!(!r.is_empty());
    }
}

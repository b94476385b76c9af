use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use zalg_cli::{export_artifacts, run_many, Context, Manifest, Params, ScenarioReport, SCENARIOS};
use zalg_core::automata::Dfa;
use zalg_core::partitions::{brute_force_counts, ConstraintSet};

fn zalg(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zalg"));
    cmd.args(args).env_remove("ZALG_OUTPUT_DIR").env_remove("ZALG_CACHE_DIR").env_remove("ZALG_CONFIG");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full = vec!["--out", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    zalg(&full, &[])
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn manifest(dir: &Path) -> Manifest {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn pt_equiv_example_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["pt-equiv", "--lhs", "KR1", "--rhs", "T9:1,3,6,8", "--max-n", "60"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = read_json(&tmp.path().join("pt-equiv/report.json"));
    assert_eq!(report["status"], "pass");
    assert_eq!(report["params"]["max-n"], "60");
    assert_eq!(report["params"]["brute-n"], "60");
    let csv = fs::read_to_string(tmp.path().join("pt-equiv/pt_equiv.csv")).unwrap();
    let counts = brute_force_counts(&"KR1".parse::<ConstraintSet>().unwrap(), 60);
    let expected: Vec<String> = counts.iter().enumerate().map(|(n, c)| format!("KR1,\"T9:1,3,6,8\",{n},{c},{c}")).collect();
    assert_eq!(csv.lines().skip(1).collect::<Vec<_>>(), expected);
}

#[test]
fn published_l2_recurrence_is_flagged_not_failed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["qdiff-verify-paper", "--a", "2", "--order", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&tmp.path().join("qdiff-verify-paper/report.json"));
    assert_eq!(report["status"], "flagged");
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks[0]["status"], "flagged");
    assert_eq!(checks[0]["witness"]["x"], 4);
    assert_eq!(checks[0]["witness"]["q"], 14);
    assert_eq!(checks[1]["status"], "pass");
}

#[test]
fn rank_table_for_kr3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["rank", "--type", "D4-3", "--a", "3", "--max-n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("rank/rank_D4-3.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("a,n,count,rank,product-coefficient"));
    let product = brute_force_counts(&"T9:3,4,5,6".parse::<ConstraintSet>().unwrap(), 10);
    let family = brute_force_counts(&"KR3".parse::<ConstraintSet>().unwrap(), 10);
    for (n, line) in lines.enumerate() {
        let cols: Vec<u64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols, vec![3, n as u64, family[n], family[n], product[n]]);
    }
    let m = manifest(&tmp.path().join("rank"));
    assert_eq!(m.files.len(), 1);
    assert_eq!(m.files[0].name, "rank_D4-3.csv");
}

#[test]
fn automaton_artifacts_are_hashed() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run_in(tmp.path(), &["automaton"]).status.code(), Some(0));
    let dir = tmp.path().join("automaton");
    let m = manifest(&dir);
    let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["l3.dfa.json", "l3.dot", "l3.table.csv"]);
    for f in &m.files {
        let bytes = fs::read(dir.join(&f.name)).unwrap();
        assert_eq!(f.bytes, bytes.len());
        assert_eq!(f.sha256, hex::encode(Sha256::digest(&bytes)));
    }
    let table = fs::read_to_string(dir.join("l3.table.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 3);
    assert_eq!(table.lines().next().unwrap().split(',').count(), 1 + Dfa::reference_l3().len());
    let dfa = read_json(&dir.join("l3.dfa.json"));
    assert_eq!(dfa["accepting"].as_array().unwrap().len(), 1);
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for scenario in [["triple-sum", "--order", "20"], ["fourier", "--radius", "12"], ["kernel", "--max-mode", "8"]] {
        assert_eq!(run_in(a.path(), &scenario).status.code(), Some(0));
        assert_eq!(run_in(b.path(), &scenario).status.code(), Some(0));
        let (ma, mb) = (manifest(&a.path().join(scenario[0])), manifest(&b.path().join(scenario[0])));
        assert!(!ma.files.is_empty());
        assert_eq!(ma, mb, "{}", scenario[0]);
    }
}

#[test]
fn empty_report_has_empty_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let report = ScenarioReport::new("empty", BTreeMap::new());
    let m = export_artifacts(&report, tmp.path()).unwrap();
    assert!(m.files.is_empty());
    assert_eq!(manifest(tmp.path()), m);
    assert_eq!(read_json(&tmp.path().join("report.json"))["status"], "pass");
}

#[test]
fn failing_check_exits_one_and_still_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["pt-equiv", "--lhs", "KR1", "--rhs", "KR2", "--max-n", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let report = read_json(&tmp.path().join("pt-equiv/report.json"));
    assert_eq!(report["status"], "fail");
    let failed = report["checks"].as_array().unwrap().iter().find(|c| c["status"] == "fail").unwrap();
    assert_eq!(failed["witness"]["n"], 1);
    assert!(tmp.path().join("pt-equiv/pt_equiv.csv").exists());
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec![],
        vec!["fourier", "--identity", "9"],
        vec!["rank", "--type", "E8-1"],
        vec!["kernel", "--bogus", "1"],
        vec!["--all", "kernel"],
        vec!["triple-sum", "--order", "x"],
    ] {
        let out = run_in(tmp.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(!tmp.path().join("fourier").exists());
}

#[test]
fn config_file_and_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("from-config");
    let cfg = tmp.path().join("zalg.toml");
    fs::write(&cfg, format!("output_dir = {:?}\n\n[params.triple-sum]\norder = 10\na = [1, 2]\n", out_dir.to_str().unwrap())).unwrap();

    assert_eq!(zalg(&["triple-sum"], &[("ZALG_CONFIG", &cfg)]).status.code(), Some(0));
    let report = read_json(&out_dir.join("triple-sum/report.json"));
    assert_eq!(report["params"]["order"], "10");
    assert_eq!(report["params"]["a"], "1,2");

    let env_out = tmp.path().join("from-env");
    let cfg_arg = cfg.to_str().unwrap();
    assert_eq!(zalg(&["--config", cfg_arg, "triple-sum", "--order", "12"], &[("ZALG_OUTPUT_DIR", &env_out)]).status.code(), Some(0));
    let report = read_json(&env_out.join("triple-sum/report.json"));
    assert_eq!(report["params"]["order"], "12");
    assert_eq!(report["params"]["a"], "1,2");

    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(zalg(&["triple-sum"], &[("ZALG_CONFIG", &cfg)]).status.code(), Some(2));
}

#[test]
fn relation_verdicts_are_cached() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let args = ["relations", "--relation", "1,3", "--bound", "1", "--max-deg", "3"];
    let first = zalg(&[&["--out", tmp.path().join("a").to_str().unwrap()], &args[..]].concat(), &[("ZALG_CACHE_DIR", &cache)]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    let cached = fs::read_dir(cache.join("relations")).unwrap().count();
    assert_eq!(cached, 9 + 6);
    let second = zalg(&[&["--out", tmp.path().join("b").to_str().unwrap(), "--cache", cache.to_str().unwrap()], &args[..]].concat(), &[]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(manifest(&tmp.path().join("a/relations")), manifest(&tmp.path().join("b/relations")));
    let csv = fs::read_to_string(tmp.path().join("a/relations/relations.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn worker_pool_preserves_job_order() {
    let jobs: Vec<(String, Params)> = ["constants", "kernel", "triple-sum", "automaton"]
        .iter()
        .map(|s| (s.to_string(), if *s == "triple-sum" { [("order".to_string(), "10".to_string())].into() } else { Params::new() }))
        .collect();
    for workers in [1, 3] {
        let reports = run_many(&jobs, &Context::default(), workers);
        let names: Vec<String> = reports.into_iter().map(|r| r.unwrap().scenario).collect();
        assert_eq!(names, ["constants", "kernel", "triple-sum", "automaton"]);
    }
    assert_eq!(SCENARIOS.len(), 10);
}

use std::fs;
use std::process::{Command, Output};

use cumseries::cumulants::SeriesOptions;
use cumseries::estimator::series_estimate;
use cumseries::generators::{gen_aps, gen_subgraph_copies, SmallRGraph};
use cumseries::oracles::{log_exact_probability, DEFAULT_M_CAP};
use cumseries::{Hypergraph, Probabilities};
use cumseries_cli::report::{reemit, EstimateJson, ExactJson, McJson, SelftestJson, SymbolicJson};

fn cumseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cumseries")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = cumseries(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn num(x: &Option<serde_json::Number>) -> f64 {
    x.as_ref().unwrap().as_f64().unwrap()
}

#[test]
fn gen_writes_a_parseable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k6.txt");
    stdout(&["gen", "--family", "k3", "--n", "6", "-o", path.to_str().unwrap()]);
    let h = Hypergraph::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    let direct = gen_subgraph_copies(&[SmallRGraph::triangle()], 6).unwrap().hypergraph;
    assert_eq!(h, direct);

    let text = stdout(&["gen", "--family", "ap:3", "--n", "10"]);
    assert_eq!(Hypergraph::parse(&text).unwrap(), gen_aps(10, 3).unwrap());
}

#[test]
fn estimate_from_file_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k6.txt");
    let h = gen_subgraph_copies(&[SmallRGraph::triangle()], 6).unwrap().hypergraph;
    fs::write(&path, h.to_text()).unwrap();
    let text = stdout(&["estimate", "--input", path.to_str().unwrap(), "--p", "0.1", "--k", "3"]);
    let report: EstimateJson = serde_json::from_str(&text).unwrap();
    let lib = series_estimate(&h, &Probabilities::Uniform(0.1), 3, &SeriesOptions::default()).unwrap();
    assert_eq!(num(&report.log_estimate), lib.log_estimate);
    assert_eq!(num(&report.error_budget), lib.error_budget);
    assert_eq!(num(&report.harris_log), lib.harris_log);
    assert_eq!(num(&report.janson_log), lib.janson_log);
    assert_eq!(report.kappa.len(), 3);
    assert_eq!(report.big_delta.len(), 4);
    assert_eq!(report.delta.len(), 4);
    assert_eq!(report.cluster_counts, lib.cluster_counts.0);
    assert_eq!(report.lambda_range, "exhaustive");
}

#[test]
fn estimate_with_per_vertex_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.txt");
    let values: Vec<String> = (0..10).map(|i| format!("{}", 0.05 + 0.01 * i as f64)).collect();
    fs::write(&p, values.join("\n")).unwrap();
    let text = stdout(&["estimate", "--family", "ap:3", "--n", "10", "--p-file", p.to_str().unwrap()]);
    let report: EstimateJson = serde_json::from_str(&text).unwrap();
    assert_eq!(report.p_kind, "per-vertex");
    assert!(report.p.is_none());
    let exact: ExactJson = serde_json::from_str(&stdout(&[
        "exact",
        "--family",
        "ap:3",
        "--n",
        "10",
        "--p-file",
        p.to_str().unwrap(),
    ]))
    .unwrap();
    assert!(exact.profile.is_none());
    let lp = num(&exact.log_probability);
    assert!(num(&report.harris_log) <= lp && lp <= num(&report.janson_log));
}

#[test]
fn exact_matches_library_bit_for_bit() {
    let report: ExactJson = serde_json::from_str(&stdout(&["exact", "--family", "ap:3", "--n", "16", "--p", "0.3"])).unwrap();
    let h = gen_aps(16, 3).unwrap();
    let lib = log_exact_probability(&h, &Probabilities::Uniform(0.3), DEFAULT_M_CAP).unwrap();
    assert_eq!(num(&report.log_probability), lib);
    let profile = report.profile.unwrap();
    assert_eq!(profile.len(), 17);
    assert_eq!(profile[0].to_string(), "1");
    assert_eq!(profile[1].to_string(), "16");
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = ["mc", "--family", "k3", "--n", "6", "--p", "0.15", "--trials", "20000", "--seed", "5", "--shards", "3"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let r: McJson = serde_json::from_str(&a).unwrap();
    assert_eq!(r.algorithm, "chacha8-stream-per-shard");
    assert_eq!(r.trials, 20000);
    assert!(num(&r.lower) <= num(&r.estimate) && num(&r.estimate) <= num(&r.upper));
}

#[test]
fn symbolic_reports_types() {
    let r: SymbolicJson = serde_json::from_str(&stdout(&["symbolic", "--family", "k3", "--k", "2"])).unwrap();
    assert_eq!(r.kappa[0].falling, "1/6 * ff(n,3) * p^3");
    assert_eq!(r.kappa[1].falling, "1/4 * ff(n,4) * p^5 + -1/4 * ff(n,4) * p^6");
    assert_eq!(r.types.len(), 2);
    assert_eq!((r.types[0].vertices, r.types[0].aut), (3, 6));
    assert_eq!((r.types[1].vertices, r.types[1].aut), (4, 4));
    assert!(r.reduced.is_none());
}

#[test]
fn reports_round_trip_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("points.txt");
    fs::write(&pts, "0 0\n1 1\n2 2\n3 3\n0 1\n0 2\n1 0\n2 0\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["estimate", "--family", "k3", "--n", "6", "--p", "0.2", "--k", "3", "--exact-rho"],
        vec!["estimate", "--points", pts.to_str().unwrap(), "--p", "0.3"],
        vec!["exact", "--family", "k3", "--n", "5", "--p", "0.25"],
        vec!["mc", "--family", "k3", "--n", "5", "--p", "0.25", "--trials", "1000"],
        vec!["symbolic", "--family", "k3,c4", "--k", "2", "--alpha", "4/5"],
        vec!["diagnose", "--family", "k3,c4", "--n", "8", "--p", "0.1"],
        vec!["diagnose", "--family", "ap:3", "--n", "30", "--p", "0.1"],
        vec!["selftest"],
    ];
    for args in runs {
        let text = stdout(&args);
        assert_eq!(reemit(&text).unwrap(), text, "{args:?}");
    }
}

#[test]
fn csv_and_text_formats() {
    let csv = stdout(&["estimate", "--family", "k3", "--n", "5", "--p", "0.1", "--format", "csv"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "i,kappa,Delta,delta,Lambda,clusters");
    assert_eq!(lines.count(), 3);
    let text = stdout(&["selftest", "--format", "text"]);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
    let r: SelftestJson = serde_json::from_str(&stdout(&["selftest"])).unwrap();
    assert!(r.passed);
}

#[test]
fn diagnose_skips_instance_for_large_n() {
    let text = stdout(&["diagnose", "--family", "k3,c4", "--n", "1000", "--p", "0.001"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["instance_metrics"], false);
    assert_eq!(v["d"], "1/1");
    assert_eq!(v["m_star"], "3/2");
}

#[test]
fn validation_errors_exit_with_code_two() {
    for args in [
        vec!["estimate", "--family", "k3", "--n", "6", "--p", "1.5"],
        vec!["estimate", "--family", "k3", "--n", "6", "--p", "0"],
        vec!["symbolic", "--family", "k3", "--alpha", "-1/2"],
        vec!["estimate", "--family", "ap:4", "--p", "0.1"],
        vec!["estimate", "--input", "/nonexistent/file", "--p", "0.1"],
    ] {
        let out = cumseries(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.starts_with("error: kind="), "{err}");
    }
}

#[test]
fn budget_errors_exit_with_code_three() {
    let out = cumseries(&["estimate", "--family", "k3", "--n", "12", "--p", "0.1", "--k", "4", "--cluster-budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error: kind=Overflow"));
    let out = cumseries(&["exact", "--family", "k3", "--n", "9", "--p", "0.1", "--m-cap", "20"]);
    assert_eq!(out.status.code(), Some(3));
    let out = cumseries(&["symbolic", "--family", "k3", "--k", "9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exactly_one_source_is_required() {
    assert_eq!(cumseries(&["estimate", "--p", "0.1"]).status.code(), Some(2));
    assert_eq!(
        cumseries(&["estimate", "--family", "k3", "--points", "x", "--n", "5", "--p", "0.1"]).status.code(),
        Some(2)
    );
}

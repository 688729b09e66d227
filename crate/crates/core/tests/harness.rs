use std::path::Path;

use cckp::harness::{
    derive_seed, execute, run_experiment, summarize_dir, write_stats_report, CellStatus,
    ExperimentConfig, RUNS_FILE, SUMMARY_FILE,
};

fn config(extra: &str, alphas: &str, reps: usize) -> ExperimentConfig {
    let text = format!(
        r#"
        repetitions = {reps}
        base_seed = 99
        budget = 1500
        [generator]
        family = "bsc"
        n = 30
        range = 100
        fraction = 0.3
        seed = 4
        [grid]
        alpha = {alphas}
        delta = [2.0, 5.0]
        bound = ["chernoff"]
        [[algorithm]]
        label = "(1+1) EA HT"
        kind = "one-plus-one"
        mutation = "heavy-tail"
        [[algorithm]]
        label = "GSEMO"
        kind = "gsemo"
        {extra}
        "#
    );
    ExperimentConfig::from_toml_str(&text, Path::new(".")).unwrap()
}

#[test]
fn cartesian_accounting() {
    let out = execute(&config("", "[0.001, 0.01, 0.1]", 5)).unwrap();
    assert_eq!(out.summary.len(), 12);
    assert_eq!(out.runs.len(), 60);
    assert_eq!(out.timings.len(), 60);
    assert!(out.summary.iter().all(|r| r.status == CellStatus::Ok));
    assert!(out.runs.iter().all(|r| r.evaluations == 1500));

    let mut seeds: Vec<u64> = out.runs.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 60);
}

#[test]
fn single_repetition_single_cell() {
    let mut cfg = config("", "[0.1]", 1);
    cfg.algorithms.truncate(1);
    cfg.deltas.truncate(1);
    let out = execute(&cfg).unwrap();
    assert_eq!((out.runs.len(), out.summary.len()), (1, 1));
    assert_eq!(out.summary[0].std, Some(0.0));
    assert_eq!(out.summary[0].mean, out.runs[0].best_profit);
}

#[test]
fn adding_cells_keeps_existing_seeds() {
    let small = execute(&config("", "[0.1]", 3)).unwrap();
    let big = execute(&config("", "[0.01, 0.1]", 3)).unwrap();
    for r in &small.runs {
        let twin = big
            .runs
            .iter()
            .find(|b| b.cell.same_cell(&r.cell) && b.rep == r.rep)
            .unwrap();
        assert_eq!(twin, r);
        assert_eq!(derive_seed(99, &r.cell, r.rep), r.seed);
    }
}

#[test]
fn bad_cells_do_not_stop_the_grid() {
    let extra = r#"
        [[algorithm]]
        label = "broken"
        kind = "mu-plus-one"
        mu = 1
        crossover = "ps"
    "#;
    let out = execute(&config(extra, "[0.1]", 2)).unwrap();
    assert_eq!(out.summary.len(), 6);
    assert_eq!(out.runs.len(), 8);
    for row in &out.summary {
        match row.cell.algorithm.as_str() {
            "broken" => assert!(matches!(row.status, CellStatus::Error(_))),
            _ => assert_eq!(row.status, CellStatus::Ok),
        }
    }
}

#[test]
fn files_are_reproducible_and_consistent() {
    let cfg = config("", "[0.01, 0.1]", 4);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&cfg, a.path()).unwrap();
    run_experiment(&cfg, b.path()).unwrap();
    for file in [RUNS_FILE, SUMMARY_FILE] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs");
    }
    let rows = summarize_dir(a.path()).unwrap();
    assert_eq!(rows.len(), 8);
    let report = write_stats_report(a.path(), a.path().join("report.csv")).unwrap();
    assert_eq!(report.len(), 8);
    assert!(report.iter().all(|r| r.kruskal_wallis.is_some()));
}

#[test]
fn tampered_summary_is_detected() {
    let cfg = config("", "[0.1]", 3);
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg, dir.path()).unwrap();
    let path = dir.path().join(RUNS_FILE);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<String> = lines[1].split(',').map(String::from).collect();
    fields[8] = "1".into();
    lines[1] = fields.join(",");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    assert!(summarize_dir(dir.path()).is_err());
}

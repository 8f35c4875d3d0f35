use std::fs;

use relaxcb::harness::config::ExperimentConfig;
use relaxcb::harness::output::{emit_outputs, regret_csv};
use relaxcb::harness::run::run_experiment;
use relaxcb::Error;

fn config(k: usize, t: usize, reps: usize, learner: &str) -> ExperimentConfig {
    ExperimentConfig::from_json_str(&format!(
        r#"{{
            "K": {k}, "T": {t}, "L": "auto", "learner": "{learner}",
            "policyClass": {{"type": "threshold", "U": 4, "K": {k}}},
            "environment": {{
                "context": {{"U": 4, "uniform": true}},
                "adversary": {{"type": "stochastic-gap", "delta": 0.3}}
            }},
            "reps": {reps}, "seed": 9
        }}"#
    ))
    .unwrap()
}

#[test]
fn single_round_regret_is_nonnegative_with_covering_class() {
    for seed in 0..20 {
        let mut c = config(3, 1, 1, "relax");
        c.seed = seed;
        let r = run_experiment(&c).unwrap();
        assert!(r.final_point().mean_regret >= -1e-12, "seed {seed}");
    }
}

#[test]
fn csv_has_header_plus_t_rows_and_zero_stderr_for_one_rep() {
    let r = run_experiment(&config(3, 40, 1, "relax")).unwrap();
    let csv = regret_csv(&r);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 41);
    assert_eq!(lines[0], "round,mean_regret,stderr_regret,bound");
    for (i, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0], (i + 1).to_string());
        assert_eq!(cols[2], "0");
    }
}

#[test]
fn summary_matches_shipped_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/summary.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for learner in ["relax", "exp4", "uniform"] {
        let r = run_experiment(&config(2, 30, 3, learner)).unwrap();
        let paths = emit_outputs(&r, dir.path()).unwrap();
        let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&paths.summary_json).unwrap()).unwrap();
        let errors: Vec<String> = validator.iter_errors(&summary).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{learner}: {errors:?}");
        assert_eq!(summary["oracleCallsTotal"], if learner == "relax" { 3 * 30 * 3 } else { 0 });
        // the config echo parses back to the same config
        let echo: ExperimentConfig = serde_json::from_value(summary["config"].clone()).unwrap();
        assert_eq!(echo, r.config);
    }
}

#[test]
fn schema_rejects_a_mangled_summary() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/summary.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let r = run_experiment(&config(2, 10, 1, "relax")).unwrap();
    let paths = emit_outputs(&r, dir.path()).unwrap();
    let mut summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&paths.summary_json).unwrap()).unwrap();
    summary["finalStderrRegret"] = serde_json::json!(-1.0);
    assert!(!validator.is_valid(&summary));
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = config(3, 60, 4, "relax");
    let pa = emit_outputs(&run_experiment(&c).unwrap(), a.path()).unwrap();
    let pb = emit_outputs(&run_experiment(&c).unwrap(), b.path()).unwrap();
    assert_eq!(fs::read(pa.regret_csv).unwrap(), fs::read(pb.regret_csv).unwrap());
    assert_eq!(fs::read(pa.realized_csv).unwrap(), fs::read(pb.realized_csv).unwrap());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let r = run_experiment(&config(2, 5, 1, "uniform")).unwrap();
    match emit_outputs(&r, &blocker.join("sub")) {
        Err(Error::Io { .. }) => {}
        other => panic!("expected an i/o error, got {other:?}"),
    }
}

#[test]
fn regret_identity_holds_per_round() {
    let r = run_experiment(&config(3, 80, 2, "exp4")).unwrap();
    for run in &r.runs {
        let total: f64 = run.per_round.iter().map(|p| p.expected_cost).sum();
        assert!((total - run.comparator_loss - run.final_regret()).abs() < 1e-6);
    }
}

#![no_main]

use libfuzzer_sys::fuzz_target;
use relaxcb::harness::config::{ExperimentConfig, PolicyClassSpec};
use relaxcb::harness::run::run_experiment;

fuzz_target!(|data: &[u8]| {
    let Ok(config) = ExperimentConfig::from_json_bytes(data) else {
        return;
    };
    // a validated config survives a round trip
    let back = ExperimentConfig::from_json_str(&config.to_json_pretty()).expect("re-parse");
    assert_eq!(back, config);

    let small_class = match &config.policy_class {
        PolicyClassSpec::Table { num_policies, universe, .. } => num_policies * universe <= 512,
        PolicyClassSpec::Explicit { table } => table.len() <= 64,
        PolicyClassSpec::Threshold { universe, num_actions } => universe * num_actions * num_actions <= 512,
    };
    if small_class && config.horizon <= 8 && config.reps <= 2 {
        if let Ok(result) = run_experiment(&config) {
            assert_eq!(result.curve.len(), config.horizon);
            for run in &result.runs {
                let total: f64 = run.per_round.iter().map(|r| r.expected_cost).sum();
                assert!((total - run.comparator_loss - run.final_regret()).abs() < 1e-6);
            }
        }
    }
});

//! Replays the checked-in fuzz seeds and throws random bytes at the parsers.

use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;

use relaxcb::environment::AdversarySpec;
use relaxcb::harness::config::ExperimentConfig;
use relaxcb::policy::PolicyClass;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds_are_valid() {
    for (path, bytes) in corpus("config_json") {
        let c = ExperimentConfig::from_json_bytes(&bytes).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        c.build_policy_class().unwrap();
    }
}

#[test]
fn policy_table_seeds_are_valid() {
    for (path, bytes) in corpus("policy_table") {
        let (k, rest) = bytes.split_first().unwrap();
        let rows: Vec<Vec<usize>> = serde_json::from_slice(rest).unwrap();
        PolicyClass::from_table(*k as usize, rows).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn adversary_seeds_are_valid() {
    for (path, bytes) in corpus("adversary_spec") {
        serde_json::from_slice::<AdversarySpec>(&bytes).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

proptest! {
    #[test]
    fn config_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let _ = ExperimentConfig::from_json_bytes(&bytes);
    }

    #[test]
    fn mutated_seed_never_panics(pos in 0usize..200, byte in any::<u8>()) {
        let mut seed = include_bytes!("../../../fuzz/corpus/config_json/explicit_tiny.json").to_vec();
        let i = pos % seed.len();
        seed[i] = byte;
        if let Ok(c) = ExperimentConfig::from_json_bytes(&seed) {
            let _ = c.build_policy_class();
            let _ = c.adversary_spec();
        }
    }
}

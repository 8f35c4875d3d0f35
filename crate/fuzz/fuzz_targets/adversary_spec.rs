#![no_main]

use libfuzzer_sys::fuzz_target;
use rand::SeedableRng;
use relaxcb::environment::{make_adversary, AdversarySpec, ContextDistribution};
use relaxcb::policy::PolicyClass;
use relaxcb::rng::SimRng;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<AdversarySpec>(data) else {
        return;
    };
    let mut rng = SimRng::seed_from_u64(data.len() as u64);
    let class = PolicyClass::from_table(3, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).expect("fixed class");
    let contexts = ContextDistribution::uniform(2).expect("uniform").draw_sequence(16, &mut rng);
    if let Ok(schedule) = make_adversary(&spec, &class, &contexts, &mut rng) {
        assert_eq!(schedule.len(), contexts.len());
        for c in schedule.costs() {
            assert!(c.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
});

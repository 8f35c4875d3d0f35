#![no_main]

use libfuzzer_sys::fuzz_target;
use relaxcb::policy::PolicyClass;
use relaxcb::types::Context;

// First byte picks K, the rest is a JSON table of zero-based actions.
fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else {
        return;
    };
    let Ok(rows) = serde_json::from_slice::<Vec<Vec<usize>>>(rest) else {
        return;
    };
    let Ok(class) = PolicyClass::from_table(k as usize, rows.clone()) else {
        return;
    };
    assert_eq!(class.len(), rows.len());
    for (p, row) in rows.iter().enumerate() {
        for (x, a) in row.iter().enumerate() {
            let got = class.action(p, Context(x as u32));
            assert_eq!(got.index(), *a);
            assert!(got.index() < class.num_actions());
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use netcap_core::fabric::{FabricPolicy, TierPair};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(policy) = FabricPolicy::from_json(text) {
        for pair in TierPair::ALL {
            assert!(*policy.threshold(pair).numer() > 0);
        }
    }
});

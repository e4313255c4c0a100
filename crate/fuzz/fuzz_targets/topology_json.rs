#![no_main]

use libfuzzer_sys::fuzz_target;
use netcap_core::fabric::{audit, FabricPolicy, Topology};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(topology) = Topology::from_json(text) {
        let _ = audit(&topology, &FabricPolicy::default());
    }
});

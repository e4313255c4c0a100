#![no_main]

use libfuzzer_sys::fuzz_target;
use netcap_core::fabric::parse_decimal_ratio;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Some(ratio) = parse_decimal_ratio(text) {
        assert!(*ratio.numer() > 0 && *ratio.denom() > 0);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use netcap::units::{parse_count, parse_quantity};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(value) = parse_quantity(text) {
        assert!(value.is_finite());
    }
    if let Ok(count) = parse_count(text) {
        assert_eq!(parse_quantity(text).ok(), Some(count as f64));
    }
});

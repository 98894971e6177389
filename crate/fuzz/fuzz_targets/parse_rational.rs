#![no_main]

use alignment_core::rational::{canonical, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(value) = parse_rational(text) {
        // Canonical output parses back to the same value.
        assert_eq!(parse_rational(&canonical(&value)).as_ref(), Ok(&value));
    }
});

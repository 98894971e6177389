#![no_main]

use alignment_cli::document::{game_spec_to_json, parse_game_spec, render};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_game_spec(text) {
        // Rendered specs round-trip.
        let again = parse_game_spec(&render(&game_spec_to_json(&spec))).expect("rendered spec parses");
        assert_eq!(again, spec);
    }
});

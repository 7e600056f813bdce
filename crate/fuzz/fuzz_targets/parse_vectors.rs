//! The comma-separated vector parsers used for --chips/--state/--witness
//! must never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = abelnet::netfile::parse_count_vector(text);
    let _ = abelnet::netfile::parse_state_vector(text);
});

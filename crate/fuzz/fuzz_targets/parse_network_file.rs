//! Parse arbitrary bytes as a network file; anything that parses must build
//! or fail cleanly, and small networks must survive the axiom validator.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = abelnet::netfile::parse_network_file(text) else { return };
    let Ok(net) = abelnet::zoo::build(&spec) else { return };
    // keep the exhaustive axiom check to networks of modest table size
    let work: usize = net
        .processors
        .iter()
        .map(|p| p.num_states.saturating_mul(p.letters.len() * p.letters.len()))
        .sum();
    if work <= 1 << 16 {
        let _ = abelnet::zoo::validate_abelian(&net);
    }
});

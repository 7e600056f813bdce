//! Any network that builds must export to the explicit file form, re-parse,
//! and rebuild into identical tables.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = abelnet::netfile::parse_network_file(text) else { return };
    let Ok(net) = abelnet::zoo::build(&spec) else { return };
    let doc = abelnet::netfile::network_to_file(&net);
    let json = abelnet::netfile::to_json(&doc);
    let spec2 = abelnet::netfile::parse_network_file(&json).expect("exported form must reparse");
    let net2 = abelnet::zoo::build(&spec2).expect("exported form must rebuild");
    assert_eq!(net.processors, net2.processors, "round trip changed the tables");
});

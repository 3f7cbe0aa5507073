#![no_main]

use libfuzzer_sys::fuzz_target;
use rctailor_core::RandomizedCircuit;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rc) = RandomizedCircuit::from_json(text) {
        let again = RandomizedCircuit::from_json(&rc.to_json()).expect("serialized circuit parses");
        assert_eq!(again, rc);
    }
});

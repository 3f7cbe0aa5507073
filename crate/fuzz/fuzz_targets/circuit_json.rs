#![no_main]

use libfuzzer_sys::fuzz_target;
use rctailor_core::Circuit;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(circuit) = Circuit::from_json(text) {
        let again = Circuit::from_json(&circuit.to_json()).expect("serialized circuit parses");
        assert_eq!(again, circuit);
    }
});

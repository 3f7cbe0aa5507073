//! Replays the checked-in fuzz corpus through both parsers.

use std::path::Path;

use rctailor_core::{Circuit, RandomizedCircuit};

fn corpus(name: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(name);
    let mut files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files.into_iter().map(|p| (p.display().to_string(), std::fs::read_to_string(&p).unwrap())).collect()
}

#[test]
fn circuit_corpus() {
    let mut parsed = 0;
    for (path, text) in corpus("circuit_json") {
        if let Ok(c) = Circuit::from_json(&text) {
            assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c, "{path}");
            parsed += 1;
        }
    }
    assert!(parsed >= 5);
    for bad in ["bad_last_round.json", "empty.json"] {
        let (_, text) = corpus("circuit_json").into_iter().find(|(p, _)| p.ends_with(bad)).unwrap();
        assert!(Circuit::from_json(&text).is_err(), "{bad}");
    }
}

#[test]
fn randomized_corpus() {
    for (path, text) in corpus("randomized_json") {
        let rc = RandomizedCircuit::from_json(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
        assert_eq!(RandomizedCircuit::from_json(&rc.to_json()).unwrap(), rc);
    }
}

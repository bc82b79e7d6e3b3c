#![no_main]

use libfuzzer_sys::fuzz_target;
use quadlat::io;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    if let Ok(m) = io::minimal_pair_from_json(&v, Some(3)) {
        assert_eq!(io::minimal_pair_from_json(&io::minimal_pair_to_json(&m), None).unwrap(), m);
    }
});

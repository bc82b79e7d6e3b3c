#![no_main]

use libfuzzer_sys::fuzz_target;
use quadlat::io;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    if let Ok(s) = io::space_from_json(&v) {
        assert_eq!(io::space_from_json(&io::space_to_json(&s)).unwrap(), s);
    }
});

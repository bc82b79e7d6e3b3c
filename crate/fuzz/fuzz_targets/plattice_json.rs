#![no_main]

use libfuzzer_sys::fuzz_target;
use quadlat::io;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    if let Ok(l) = io::plattice_from_json(&v) {
        assert_eq!(io::plattice_from_json(&io::plattice_to_json(&l)).unwrap(), l);
    }
});

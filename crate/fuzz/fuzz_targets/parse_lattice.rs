#![no_main]

use libfuzzer_sys::fuzz_target;
use quadlat::io;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(l) = io::parse_lattice(text) {
        let back = io::lattice_to_json(&l);
        assert_eq!(io::lattice_from_json(&back).unwrap(), l);
    }
});

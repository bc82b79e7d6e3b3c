#![no_main]

use libfuzzer_sys::fuzz_target;
use quadlat::lattice::standard_lattice;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(l) = standard_lattice(text) {
        let _ = l.det();
    }
});

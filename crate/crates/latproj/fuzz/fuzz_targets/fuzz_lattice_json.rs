#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing may reject the bytes, but it must never panic; a file that
// parses must also convert to a lattice without panicking.
fuzz_target!(|data: &[u8]| {
    if let Ok(file) = latproj::io::parse_lattice_json(data) {
        if let Ok(lattice) = file.to_lattice() {
            // a lattice that loads must survive a round trip
            let back = latproj::io::LatticeFile::from_lattice("roundtrip", &lattice);
            let _ = latproj::io::parse_lattice_json(back.to_json().as_bytes());
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;

// Builtin spec resolution must never panic. Ok(None) ("treat as a file
// path") is fine; no file IO happens here.
fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = latproj::io::parse_source_spec(s);
    }
});

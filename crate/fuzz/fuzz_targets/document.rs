#![no_main]

use libfuzzer_sys::fuzz_target;
use shapeinv_cli::reemit_json;

// Whatever is accepted once must be a fixed point of re-emission.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(once) = reemit_json(text) {
        assert_eq!(reemit_json(&once).unwrap(), once);
    }
});

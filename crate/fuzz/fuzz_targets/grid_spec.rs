#![no_main]

use libfuzzer_sys::fuzz_target;
use shapeinv_cli::parse_grid_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(grid) = parse_grid_spec(text) {
        assert!(grid.len() >= 3);
        assert!(grid.spacing() > 0.0 && grid.spacing().is_finite());
    }
});

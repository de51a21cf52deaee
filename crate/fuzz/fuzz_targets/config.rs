#![no_main]

use libfuzzer_sys::fuzz_target;
use shapeinv_cli::{parse_config, Flags, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_config(text) {
        if let Ok(cfg) = RunConfig::resolve(&Flags::default(), &file) {
            assert!(cfg.levels > 0 && cfg.partnerships > 0);
            assert!(cfg.physics_tol > 0.0 && cfg.structural_tol > 0.0);
        }
    }
});

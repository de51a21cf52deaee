//! Replays the checked-in fuzz seeds through the same properties the fuzz
//! targets assert.

use std::fs;
use std::path::PathBuf;

use shapeinv_cli::{parse_config, parse_grid_spec, reemit_json, Flags, RunConfig};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds in {}", dir.display());
    paths.iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

#[test]
fn config_seeds() {
    let mut resolved = 0;
    for text in seeds("config") {
        if let Ok(file) = parse_config(&text) {
            if let Ok(cfg) = RunConfig::resolve(&Flags::default(), &file) {
                assert!(cfg.levels > 0 && cfg.partnerships > 0);
                resolved += 1;
            }
        }
    }
    assert!(resolved >= 1);
}

#[test]
fn grid_spec_seeds() {
    for text in seeds("grid_spec") {
        if let Ok(grid) = parse_grid_spec(&text) {
            assert!(grid.len() >= 3);
            assert!(grid.spacing() > 0.0 && grid.spacing().is_finite());
        }
    }
}

#[test]
fn document_seeds() {
    for text in seeds("document") {
        if let Ok(once) = reemit_json(&text) {
            assert_eq!(reemit_json(&once).unwrap(), once);
        }
    }
}

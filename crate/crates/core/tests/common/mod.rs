#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use asphint::solver::{Backend, ClingoBackend, FixtureBackend};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/solver")
}

/// Live clingo when available (recording fixtures if `ASPHINT_RECORD` is
/// set), otherwise replay of the recorded fixtures.
pub fn backend() -> Arc<dyn Backend> {
    static BACKEND: OnceLock<Arc<dyn Backend>> = OnceLock::new();
    BACKEND
        .get_or_init(|| match ClingoBackend::discover(None) {
            Ok(live) if std::env::var_os("ASPHINT_RECORD").is_some() => {
                Arc::new(FixtureBackend::recording(fixture_dir(), Arc::new(live)))
            }
            Ok(live) => Arc::new(live),
            Err(_) => Arc::new(FixtureBackend::replay(fixture_dir())),
        })
        .clone()
}

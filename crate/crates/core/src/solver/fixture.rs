use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Backend, ModelLimit, SolveRequest, SolveResult, SolveStatus, SolverError};
use crate::syntax::Signature;

/// Replays recorded solver results keyed by [`SolveRequest::fingerprint`].
///
/// With a live backend attached, misses are forwarded to it and, when
/// recording, the answer is written back. Timeouts are never recorded.
#[derive(Clone)]
pub struct FixtureBackend {
    dir: PathBuf,
    live: Option<Arc<dyn Backend>>,
    record: bool,
}

#[derive(Serialize, Deserialize)]
struct Fixture {
    program: String,
    projection: Option<BTreeSet<Signature>>,
    max_models: ModelLimit,
    result: SolveResult,
}

impl FixtureBackend {
    /// Replay only; a miss is an error.
    pub fn replay(dir: impl Into<PathBuf>) -> Self {
        FixtureBackend { dir: dir.into(), live: None, record: false }
    }

    /// Replay, falling back to `live` on a miss and recording its answer.
    pub fn recording(dir: impl Into<PathBuf>, live: Arc<dyn Backend>) -> Self {
        FixtureBackend { dir: dir.into(), live: Some(live), record: true }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, request: &SolveRequest) -> PathBuf {
        self.dir.join(format!("{}.json", request.fingerprint()))
    }

    fn load(path: &Path) -> Result<Option<SolveResult>, SolverError> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let fixture: Fixture = serde_json::from_str(&text)
            .map_err(|e| SolverError::CorruptFixture { path: path.display().to_string(), reason: e.to_string() })?;
        Ok(Some(fixture.result))
    }

    fn store(&self, path: &Path, request: &SolveRequest, result: &SolveResult) -> Result<(), SolverError> {
        std::fs::create_dir_all(&self.dir)?;
        let fixture = Fixture {
            program: request.program.clone(),
            projection: request.projection.clone(),
            max_models: request.max_models,
            result: result.clone(),
        };
        let text = serde_json::to_string_pretty(&fixture).expect("fixture serializes");
        // Write-then-rename so concurrent readers never see a partial file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

impl Backend for FixtureBackend {
    fn solve(&self, request: &SolveRequest) -> Result<SolveResult, SolverError> {
        let path = self.path(request);
        if let Some(result) = Self::load(&path)? {
            return Ok(result);
        }
        let Some(live) = &self.live else {
            return Err(SolverError::MissingFixture { fingerprint: request.fingerprint() });
        };
        let result = live.solve(request)?.finalize(request);
        if self.record && result.status != SolveStatus::Timeout {
            self.store(&path, request, &result)?;
        }
        Ok(result)
    }
}

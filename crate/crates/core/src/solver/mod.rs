//! Answer-set enumeration through an external grounder/solver.
//!
//! Grounding and stable-model search are never done in-process. A [`Backend`]
//! receives the program text and returns the (projected) answer sets; the
//! [`ClingoBackend`] drives a clingo executable over its text output and the
//! [`FixtureBackend`] replays recorded results for hermetic runs.

mod atoms;
mod clingo;
mod fixture;

use std::collections::BTreeSet;
use std::fmt;
use std::num::NonZeroUsize;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::syntax::Signature;

pub use atoms::{parse_ground_atom, AnswerSet, GroundAtom, GroundTerm};
pub use clingo::ClingoBackend;
pub use fixture::FixtureBackend;

/// Default cap on enumerated models per call.
pub const DEFAULT_MAX_MODELS: usize = 1000;
/// Default per-call deadline.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelLimit {
    All,
    Count(NonZeroUsize),
}

impl ModelLimit {
    pub fn count(n: usize) -> Self {
        NonZeroUsize::new(n).map(ModelLimit::Count).unwrap_or(ModelLimit::All)
    }

    pub fn allows(self, n: usize) -> bool {
        match self {
            ModelLimit::All => true,
            ModelLimit::Count(c) => n <= c.get(),
        }
    }
}

impl fmt::Display for ModelLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelLimit::All => f.write_str("all"),
            ModelLimit::Count(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveRequest {
    pub program: String,
    /// `None` keeps every atom; `Some(set)` keeps only atoms whose signature
    /// is in the set.
    pub projection: Option<BTreeSet<Signature>>,
    pub max_models: ModelLimit,
    pub timeout: Duration,
}

impl SolveRequest {
    pub fn new(program: impl Into<String>) -> Self {
        SolveRequest {
            program: program.into(),
            projection: None,
            max_models: ModelLimit::All,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn project(mut self, signatures: impl IntoIterator<Item = Signature>) -> Self {
        self.projection = Some(signatures.into_iter().collect());
        self
    }

    pub fn max_models(mut self, limit: ModelLimit) -> Self {
        self.max_models = limit;
        self
    }

    pub fn timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Stable key for fixture lookup. The timeout does not take part.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.program.as_bytes());
        h.update(b"\0projection:");
        match &self.projection {
            None => h.update(b"*"),
            Some(sigs) => {
                for s in sigs {
                    h.update(s.to_string().as_bytes());
                    h.update(b",");
                }
            }
        }
        h.update(b"\0models:");
        h.update(self.max_models.to_string().as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum SolveStatus {
    Sat,
    Unsat,
    Timeout,
    SolverError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub answer_sets: Vec<AnswerSet>,
    /// True iff the solver proved that no further models exist.
    pub exhausted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<String>,
}

impl SolveResult {
    pub fn unsat() -> Self {
        SolveResult { status: SolveStatus::Unsat, answer_sets: Vec::new(), exhausted: true, stderr: None }
    }

    /// Applies projection, removes duplicates, sorts, and truncates to the
    /// model limit.
    pub(crate) fn finalize(mut self, request: &SolveRequest) -> Self {
        if let Some(sigs) = &request.projection {
            for set in &mut self.answer_sets {
                *set = set.project(sigs);
            }
        }
        self.answer_sets.sort();
        self.answer_sets.dedup();
        if let ModelLimit::Count(c) = request.max_models {
            if self.answer_sets.len() > c.get() {
                self.answer_sets.truncate(c.get());
                self.exhausted = false;
            }
        }
        if self.status == SolveStatus::Unsat {
            self.answer_sets.clear();
        }
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("solver unavailable: {0}")]
    Unavailable(String),
    #[error("solver I/O failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("no recorded fixture for request {fingerprint}")]
    MissingFixture { fingerprint: String },
    #[error("corrupt fixture {path}: {reason}")]
    CorruptFixture { path: String, reason: String },
    #[error("solver reported an error: {0}")]
    Backend(String),
}

/// Something that can enumerate answer sets for a program.
pub trait Backend: Send + Sync {
    fn solve(&self, request: &SolveRequest) -> Result<SolveResult, SolverError>;
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn solve(&self, request: &SolveRequest) -> Result<SolveResult, SolverError> {
        (**self).solve(request)
    }
}

impl<B: Backend + ?Sized> Backend for &B {
    fn solve(&self, request: &SolveRequest) -> Result<SolveResult, SolverError> {
        (**self).solve(request)
    }
}

/// All (up to the limit) answer sets of the request, projected and in
/// canonical order.
pub fn enumerate_answer_sets(backend: &dyn Backend, request: &SolveRequest) -> Result<SolveResult, SolverError> {
    Ok(backend.solve(request)?.finalize(request))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Satisfiability {
    Sat,
    Unsat,
    Timeout,
}

/// One-model satisfiability check; a backend error is returned as `Err`.
pub fn check_satisfiable(
    backend: &dyn Backend,
    program: &str,
    timeout: Duration,
) -> Result<Satisfiability, SolverError> {
    let request = SolveRequest::new(program).max_models(ModelLimit::count(1)).timeout(timeout).project([]);
    let result = enumerate_answer_sets(backend, &request)?;
    match result.status {
        SolveStatus::Sat => Ok(Satisfiability::Sat),
        SolveStatus::Unsat => Ok(Satisfiability::Unsat),
        SolveStatus::Timeout if !result.answer_sets.is_empty() => Ok(Satisfiability::Sat),
        SolveStatus::Timeout => Ok(Satisfiability::Timeout),
        SolveStatus::SolverError => Err(SolverError::Backend(result.stderr.unwrap_or_default())),
    }
}

//! The JSON report of one `check`, `localize` or `repair` run. The schema is
//! documented in `docs/report-schema.md` at the repository root; bump [`SCHEMA_VERSION`] on any
//! incompatible change.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::fl::{localize, LlmSetup, Localization, LocalizeOptions, ModelChoice, Provenance};
use crate::repair::{repair, RepairOptions, RepairOutcome, RepairPhase, RepairStats, RepairStatus};
use crate::solver::AnswerSet;
use crate::syntax::Program;
use crate::verify::{Verdict, VerificationResult, Verifier, VerifyError};

pub const SCHEMA_VERSION: u32 = 1;

/// How far the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Check,
    Localize,
    Repair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailingTest {
    pub test_id: String,
    pub missing: Vec<AnswerSet>,
    pub extra: Vec<AnswerSet>,
    pub submission_empty: bool,
    pub capped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsEntry {
    pub lines: BTreeSet<usize>,
    pub score: f64,
    pub provenance: BTreeSet<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    /// Ranked, best first.
    pub acs: Vec<AcsEntry>,
    pub msics: Vec<BTreeSet<usize>>,
    pub msics_partial: bool,
    pub msics_errors: Vec<String>,
    pub suspicious: Vec<usize>,
    pub model: ModelChoice,
    pub missing_lines: bool,
    pub line_scores: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub llm_error: Option<String>,
}

impl From<&Localization> for LocalizationReport {
    fn from(l: &Localization) -> Self {
        LocalizationReport {
            acs: l
                .acs
                .iter()
                .map(|a| AcsEntry { lines: a.lines.clone(), score: a.score, provenance: a.provenance.clone() })
                .collect(),
            msics: l.msics.iter().map(|m| m.0.clone()).collect(),
            msics_partial: l.msics_partial,
            msics_errors: l.msics_errors.clone(),
            suspicious: l.matching.suspicious.clone(),
            model: l.model,
            missing_lines: l.missing_lines(),
            line_scores: l.scores.scores.clone(),
            llm_error: l.llm_error.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairReport {
    pub status: RepairStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<RepairPhase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repaired: Option<String>,
    pub changed_lines: BTreeSet<usize>,
    pub stats: RepairStats,
}

impl From<&RepairOutcome> for RepairReport {
    fn from(o: &RepairOutcome) -> Self {
        RepairReport {
            status: o.status,
            phase: o.phase,
            repaired: o.repaired.as_ref().map(|p| p.to_string()),
            changed_lines: o.hint.as_ref().map(|h| h.changed_lines.clone()).unwrap_or_default(),
            stats: o.stats.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub stage: Stage,
    pub problem: String,
    pub verdict: Verdict,
    pub failing_tests: Vec<FailingTest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub localization: Option<LocalizationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repair: Option<RepairReport>,
    /// Byte-exact [`crate::repair::Hint::text`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
    /// Wall-clock seconds per module, plus `total`.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn failing_tests(result: &VerificationResult) -> Vec<FailingTest> {
    result
        .failing()
        .map(|t| FailingTest {
            test_id: t.test_id.clone(),
            missing: t.missing.clone(),
            extra: t.extra.clone(),
            submission_empty: t.submission_empty,
            capped: t.capped,
            diagnostic: t.diagnostic.clone(),
        })
        .collect()
}

/// Runs the pipeline up to `stage`. Localization and repair only run on
/// incorrect submissions.
pub fn run_pipeline(
    submission: &Program,
    verifier: &Verifier,
    stage: Stage,
    llm: LlmSetup<'_>,
    localize_options: &LocalizeOptions,
    repair_options: &RepairOptions,
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    let mut timings = BTreeMap::new();
    let result = verifier.verify(submission)?;
    timings.insert("verify".to_owned(), started.elapsed().as_secs_f64());
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        stage,
        problem: verifier.spec().problem.clone(),
        verdict: result.verdict,
        failing_tests: failing_tests(&result),
        localization: None,
        repair: None,
        hint: None,
        timings,
    };
    if stage >= Stage::Localize && !result.is_correct() {
        let t = Instant::now();
        let loc = localize(submission, verifier.spec(), &result, &**verifier.backend(), llm, localize_options);
        report.timings.insert("localize".to_owned(), t.elapsed().as_secs_f64());
        report.localization = Some(LocalizationReport::from(&loc));
        if stage == Stage::Repair {
            let t = Instant::now();
            let outcome = repair(submission, verifier, &loc, llm, repair_options);
            report.timings.insert("repair".to_owned(), t.elapsed().as_secs_f64());
            report.hint = outcome.hint.as_ref().map(|h| h.text.clone());
            report.repair = Some(RepairReport::from(&outcome));
        }
    }
    report.timings.insert("total".to_owned(), started.elapsed().as_secs_f64());
    Ok(report)
}

//! Judging a submission against the reference implementation.
//!
//! A submission is correct when, on every test case, each of its answer sets
//! (projected on the solution predicates) is an answer set of the reference,
//! and it has at least one answer set whenever the reference does. Missing
//! answer sets alone never fail a submission.

mod instance;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub(crate) use instance::compose_with;
pub use instance::{compose, InstanceError, InstanceSpec, TestCase, TestCaseFile};

use crate::solver::{
    check_satisfiable, enumerate_answer_sets, AnswerSet, Backend, ModelLimit, Satisfiability, SolveRequest,
    SolveStatus, DEFAULT_MAX_MODELS, DEFAULT_TIMEOUT,
};
use crate::syntax::{Program, Signature};

/// Number of missing/extra sets per test case handed to fault localization.
pub const FL_SET_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_id: String,
    /// Reference answer sets the submission lacks, smallest first.
    pub missing: Vec<AnswerSet>,
    /// Submission answer sets the reference lacks, smallest first.
    pub extra: Vec<AnswerSet>,
    pub submission_empty: bool,
    /// Enumeration hit the model cap or the timeout on some side.
    pub capped: bool,
    /// Grounding error or timeout of the submission.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl TestOutcome {
    pub fn passed(&self) -> bool {
        self.extra.is_empty() && !self.submission_empty && self.diagnostic.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub verdict: Verdict,
    pub tests: Vec<TestOutcome>,
}

impl VerificationResult {
    pub fn is_correct(&self) -> bool {
        self.verdict == Verdict::Correct
    }

    pub fn failing(&self) -> impl Iterator<Item = &TestOutcome> {
        self.tests.iter().filter(|t| !t.passed())
    }

    pub fn capped(&self) -> bool {
        self.tests.iter().any(|t| t.capped)
    }

    /// Copy with every missing/extra list cut to `cap` entries.
    pub fn for_localization(&self, cap: usize) -> VerificationResult {
        let mut out = self.clone();
        for t in &mut out.tests {
            t.missing.truncate(cap);
            t.extra.truncate(cap);
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("reference failed on test case `{test_id}`: {reason}")]
    SolverFailure { test_id: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    pub max_models: usize,
    #[serde(with = "crate::llm::secs")]
    pub timeout: Duration,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_models: DEFAULT_MAX_MODELS, timeout: DEFAULT_TIMEOUT }
    }
}

#[derive(Debug)]
struct Sets {
    sets: BTreeSet<AnswerSet>,
    capped: bool,
}

/// Verifier bound to one instance. Reference enumerations are cached, and
/// [`Verifier::verify_fast`] tries historically failing tests first.
pub struct Verifier {
    backend: Arc<dyn Backend>,
    spec: Arc<InstanceSpec>,
    options: VerifyOptions,
    reference: Mutex<HashMap<String, Arc<Sets>>>,
    failures: Mutex<Vec<u32>>,
}

impl Verifier {
    pub fn new(backend: Arc<dyn Backend>, spec: Arc<InstanceSpec>, options: VerifyOptions) -> Self {
        let n = spec.test_cases.len();
        Verifier { backend, spec, options, reference: Mutex::new(HashMap::new()), failures: Mutex::new(vec![0; n]) }
    }

    pub fn spec(&self) -> &Arc<InstanceSpec> {
        &self.spec
    }

    pub fn backend(&self) -> &Arc<dyn Backend> {
        &self.backend
    }

    pub fn options(&self) -> VerifyOptions {
        self.options
    }

    /// Full verification over every test case.
    pub fn verify(&self, submission: &Program) -> Result<VerificationResult, VerifyError> {
        let tests: Vec<TestOutcome> = self
            .spec
            .test_cases
            .par_iter()
            .map(|t| self.verify_test(submission, t))
            .collect::<Result<_, _>>()?;
        let verdict = if tests.iter().all(TestOutcome::passed) { Verdict::Correct } else { Verdict::Incorrect };
        Ok(VerificationResult { verdict, tests })
    }

    /// Same verdict as [`Verifier::verify`], but stops at the first failing
    /// test case, which is the only one reported.
    pub fn verify_fast(&self, submission: &Program) -> Result<VerificationResult, VerifyError> {
        let order: Vec<usize> = {
            let failures = self.failures.lock().expect("poisoned");
            let mut idx: Vec<usize> = (0..self.spec.test_cases.len()).collect();
            idx.sort_by_key(|&i| std::cmp::Reverse(failures[i]));
            idx
        };
        let mut tests = Vec::with_capacity(order.len());
        for i in order {
            let outcome = self.verify_test(submission, &self.spec.test_cases[i])?;
            if !outcome.passed() {
                self.failures.lock().expect("poisoned")[i] += 1;
                return Ok(VerificationResult { verdict: Verdict::Incorrect, tests: vec![outcome] });
            }
            tests.push(outcome);
        }
        let ids: Vec<&str> = self.spec.test_cases.iter().map(|t| t.id.as_str()).collect();
        tests.sort_by_key(|t| ids.iter().position(|id| *id == t.test_id));
        Ok(VerificationResult { verdict: Verdict::Correct, tests })
    }

    fn request(&self, text: String) -> SolveRequest {
        SolveRequest::new(text)
            .project(self.spec.solution_predicates.iter().cloned())
            .max_models(ModelLimit::count(self.options.max_models))
            .timeout(self.options.timeout)
    }

    fn reference_sets(&self, test: &TestCase) -> Result<Arc<Sets>, VerifyError> {
        if let Some(s) = self.reference.lock().expect("poisoned").get(&test.id) {
            return Ok(s.clone());
        }
        let failure = |reason: String| VerifyError::SolverFailure { test_id: test.id.clone(), reason };
        let result = enumerate_answer_sets(&*self.backend, &self.request(compose(&self.spec.reference, test)))
            .map_err(|e| failure(e.to_string()))?;
        let sets = match result.status {
            SolveStatus::Sat | SolveStatus::Unsat => {
                Arc::new(Sets { capped: !result.exhausted, sets: result.answer_sets.into_iter().collect() })
            }
            SolveStatus::Timeout => return Err(failure("timeout".into())),
            SolveStatus::SolverError => return Err(failure(result.stderr.unwrap_or_default())),
        };
        self.reference.lock().expect("poisoned").insert(test.id.clone(), sets.clone());
        Ok(sets)
    }

    fn verify_test(&self, submission: &Program, test: &TestCase) -> Result<TestOutcome, VerifyError> {
        let reference = self.reference_sets(test)?;
        let sub_text = compose(submission, test);
        let result = enumerate_answer_sets(&*self.backend, &self.request(sub_text.clone()))
            .map_err(|e| VerifyError::SolverFailure { test_id: test.id.clone(), reason: e.to_string() })?;
        let mut diagnostic = None;
        let (sub, sub_capped) = match result.status {
            SolveStatus::Sat | SolveStatus::Unsat => (result.answer_sets, !result.exhausted),
            SolveStatus::Timeout => {
                diagnostic = Some(format!("submission timed out after {:?}", self.options.timeout));
                (result.answer_sets, true)
            }
            SolveStatus::SolverError => {
                diagnostic = Some(result.stderr.unwrap_or_else(|| "solver error".into()));
                (Vec::new(), false)
            }
        };
        let sub: BTreeSet<AnswerSet> = sub.into_iter().collect();
        let mut extra: Vec<AnswerSet> = sub.difference(&reference.sets).cloned().collect();
        let mut missing: Vec<AnswerSet> = reference.sets.difference(&sub).cloned().collect();
        // Truncated enumerations make plain set difference unreliable; confirm
        // each difference with a membership query on the other side.
        if reference.capped {
            let ref_text = compose(&self.spec.reference, test);
            extra.retain(|s| !self.is_answer_set(&ref_text, s));
        }
        if sub_capped && diagnostic.is_none() {
            missing.retain(|s| !self.is_answer_set(&sub_text, s));
        }
        extra.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        missing.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        Ok(TestOutcome {
            test_id: test.id.clone(),
            submission_empty: sub.is_empty() && !reference.sets.is_empty(),
            missing,
            extra,
            capped: reference.capped || sub_capped,
            diagnostic,
        })
    }

    /// Whether `set` is the projection of some answer set of `program`.
    /// Undecided queries count as "yes", keeping reported differences sound.
    fn is_answer_set(&self, program: &str, set: &AnswerSet) -> bool {
        let text = format!("{program}{}", exact_set_constraints(set, &self.spec.solution_predicates));
        !matches!(check_satisfiable(&*self.backend, &text, self.options.timeout), Ok(Satisfiability::Unsat))
    }
}

/// One-shot verification.
pub fn verify(
    submission: &Program,
    spec: &InstanceSpec,
    backend: Arc<dyn Backend>,
) -> Result<VerificationResult, VerifyError> {
    Verifier::new(backend, Arc::new(spec.clone()), VerifyOptions::default()).verify(submission)
}

/// Name of the auxiliary predicate listing the forced atoms of `sig`.
pub(crate) fn in_set_name(name: &str, classical: bool) -> String {
    if classical {
        format!("_in_neg_{name}")
    } else {
        format!("_in_{name}")
    }
}

/// Constraints admitting exactly the answer sets whose projection on
/// `signatures` equals `set`.
pub fn exact_set_constraints(set: &AnswerSet, signatures: &BTreeSet<Signature>) -> String {
    let mut out = String::new();
    for a in set.atoms() {
        let _ = writeln!(out, ":- not {a}.");
        let mut aux = a.clone();
        aux.name = in_set_name(&a.name, a.classical);
        aux.classical = false;
        let _ = writeln!(out, "{aux}.");
    }
    for sig in signatures {
        let vars: Vec<String> = (1..=sig.arity).map(|i| format!("X{i}")).collect();
        let args = if vars.is_empty() { String::new() } else { format!("({})", vars.join(",")) };
        let _ = writeln!(out, ":- {}{args}, not {}{args}.", sig.name, in_set_name(&sig.name, false));
        let _ = writeln!(out, ":- -{}{args}, not {}{args}.", sig.name, in_set_name(&sig.name, true));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::parse_ground_atom;

    #[test]
    fn exact_constraints_text() {
        let set = AnswerSet::new([parse_ground_atom("sel(2)").unwrap()]);
        let sigs: BTreeSet<Signature> = [Signature::new("sel", 1)].into();
        assert_eq!(
            exact_set_constraints(&set, &sigs),
            ":- not sel(2).\n_in_sel(2).\n:- sel(X1), not _in_sel(X1).\n:- -sel(X1), not _in_neg_sel(X1).\n"
        );
    }

    #[test]
    fn localization_copy_is_capped() {
        let sets: Vec<AnswerSet> = (0..15).map(|i| AnswerSet::new([parse_ground_atom(&format!("a({i})")).unwrap()])).collect();
        let r = VerificationResult {
            verdict: Verdict::Incorrect,
            tests: vec![TestOutcome {
                test_id: "t".into(),
                missing: sets.clone(),
                extra: sets,
                submission_empty: false,
                capped: false,
                diagnostic: None,
            }],
        };
        let capped = r.for_localization(FL_SET_CAP);
        assert_eq!(capped.tests[0].missing.len(), 10);
        assert_eq!(capped.tests[0].extra.len(), 10);
    }
}

use std::collections::BTreeSet;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linematch::{choose_model, match_lines, LineMatching, ModelChoice, DEFAULT_THRESHOLD};
use super::msics::{msics_enumerate, relax, CorrectionSubset};
use super::{combine, MAX_ACS};
use crate::llm::{classify_faults, FlPrompt, LlmBackend, LlmConfig};
use crate::solver::{AnswerSet, Backend};
use crate::syntax::{print_statements, Program};
use crate::verify::{InstanceSpec, VerificationResult, FL_SET_CAP};
use crate::{AugmentedCorrectionSubset, LineScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizeOptions {
    /// (test case, missing answer set) pairs examined by MSICS.
    pub msics_pairs: usize,
    pub msics_limit: Option<usize>,
    #[serde(with = "crate::llm::secs")]
    pub msics_timeout: Duration,
    pub threshold: u32,
    pub max_acs: usize,
}

impl Default for LocalizeOptions {
    fn default() -> Self {
        LocalizeOptions {
            msics_pairs: 3,
            msics_limit: None,
            msics_timeout: Duration::from_secs(30),
            threshold: DEFAULT_THRESHOLD,
            max_acs: MAX_ACS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub model: ModelChoice,
    pub matching: LineMatching,
    pub msics: Vec<CorrectionSubset>,
    pub msics_partial: bool,
    /// Why some MSICS pairs could not be examined.
    pub msics_errors: Vec<String>,
    pub scores: LineScores,
    /// Faulty lines according to the classifier, when it answered.
    pub llm_fl: Option<BTreeSet<usize>>,
    pub llm_error: Option<String>,
    /// Ranked, at most `max_acs` entries, never empty.
    pub acs: Vec<AugmentedCorrectionSubset>,
}

impl Localization {
    /// Whether the submission seems to lack lines.
    pub fn missing_lines(&self) -> bool {
        self.scores.missing_lines || !self.matching.unmatched_reference().is_empty()
    }
}

/// Classifier endpoint and settings, when enabled.
pub type LlmSetup<'a> = Option<(&'a dyn LlmBackend, &'a LlmConfig)>;

/// Full fault-localization pipeline for an incorrect submission.
pub fn localize(
    submission: &Program,
    spec: &InstanceSpec,
    verification: &VerificationResult,
    backend: &dyn Backend,
    llm: LlmSetup<'_>,
    options: &LocalizeOptions,
) -> Localization {
    let model = choose_model(submission, spec);
    let matching = match_lines(submission, model.program(spec), options.threshold);

    let capped = verification.for_localization(FL_SET_CAP);
    let mut pairs: Vec<(usize, &str, &AnswerSet)> = Vec::new();
    for (ti, t) in capped.tests.iter().enumerate() {
        if t.passed() {
            continue;
        }
        for m in &t.missing {
            pairs.push((ti, t.test_id.as_str(), m));
        }
    }
    pairs.sort_by(|a, b| (a.2.len(), a.0, a.2).cmp(&(b.2.len(), b.0, b.2)));
    pairs.truncate(options.msics_pairs);
    let outcomes: Vec<Result<(Vec<CorrectionSubset>, bool), String>> = pairs
        .par_iter()
        .map(|(_, id, forced)| {
            let test = spec.test(id).ok_or_else(|| format!("unknown test case {id}"))?;
            let relaxed =
                relax(submission, test, forced, &spec.solution_predicates).map_err(|e| format!("{id}: {e}"))?;
            msics_enumerate(backend, &relaxed, options.msics_limit, options.msics_timeout)
                .map(|o| (o.subsets, o.partial))
                .map_err(|e| format!("{id}: {e}"))
        })
        .collect();
    let mut msics: BTreeSet<CorrectionSubset> = BTreeSet::new();
    let (mut msics_partial, mut msics_errors) = (false, Vec::new());
    for o in outcomes {
        match o {
            Ok((subsets, partial)) => {
                msics.extend(subsets);
                msics_partial |= partial;
            }
            Err(e) => msics_errors.push(e),
        }
    }
    let mut msics: Vec<CorrectionSubset> = msics.into_iter().collect();
    msics.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));

    let (mut scores, mut llm_fl, mut llm_error) = (LineScores::uniform(submission.len()), None, None);
    if let Some((client, config)) = llm.filter(|(_, c)| c.enabled) {
        let prompt = FlPrompt {
            problem: spec.problem.clone(),
            reference_program: print_statements(model.program(spec)),
            incorrect_program: print_statements(submission),
        };
        match classify_faults(client, &prompt, config) {
            Ok(c) => {
                llm_fl = Some(c.scores.faulty());
                scores = c.scores;
            }
            Err(e) => llm_error = Some(e.to_string()),
        }
    }

    let suspicious: BTreeSet<usize> = matching.suspicious.iter().copied().collect();
    let mut acs = combine(&msics, llm_fl.as_ref(), &suspicious, &scores);
    acs.truncate(options.max_acs.max(1));
    Localization { model, matching, msics, msics_partial, msics_errors, scores, llm_fl, llm_error, acs }
}

//! Repair loop: language-model attempts with feedback, then mutation
//! enumeration over the ranked correction subsets.

mod hint;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use hint::{make_hint, Hint};

use crate::fl::{localize, LlmSetup, Localization, LocalizeOptions};
use crate::llm::{propose_repair, RepairPrompt};
use crate::mutation::{EnumerateOptions, Enumerator, RepairCandidate, StopReason, Vocabulary, DEFAULT_BUDGET, DEFAULT_MAX_DISTANCE};
use crate::syntax::{normalize, print_statements, Program, Statement, Term};
use crate::verify::{InstanceSpec, Verifier};

/// Global wall-clock budget of one repair.
pub const DEFAULT_TOTAL_TIMEOUT: Duration = Duration::from_secs(600);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepairOptions {
    pub mutation: bool,
    pub max_distance: u32,
    /// Candidates per correction subset.
    pub budget: usize,
    pub max_acs: usize,
    #[serde(with = "crate::llm::secs")]
    pub total_timeout: Duration,
    /// Candidates verified concurrently.
    pub batch: usize,
    /// Localization of failed language-model proposals.
    #[serde(skip)]
    pub localize: LocalizeOptions,
}

impl Default for RepairOptions {
    fn default() -> Self {
        RepairOptions {
            mutation: true,
            max_distance: DEFAULT_MAX_DISTANCE,
            budget: DEFAULT_BUDGET,
            max_acs: crate::fl::MAX_ACS,
            total_timeout: DEFAULT_TOTAL_TIMEOUT,
            batch: 32,
            localize: LocalizeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RepairStatus {
    Repaired,
    Exhausted,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairPhase {
    Llm,
    Mutation,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RepairStats {
    /// Mutation candidates verified.
    pub candidates_tried: usize,
    pub llm_iterations: usize,
    /// Correction subsets handed to the enumerator.
    pub acs_tried: usize,
    pub llm_errors: Vec<String>,
    #[serde(with = "crate::llm::secs")]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepairOutcome {
    pub status: RepairStatus,
    #[serde(serialize_with = "program_text")]
    pub repaired: Option<Program>,
    pub hint: Option<Hint>,
    pub phase: Option<RepairPhase>,
    pub stats: RepairStats,
}

fn program_text<S: serde::Serializer>(p: &Option<Program>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_some(&p.to_string()),
        None => s.serialize_none(),
    }
}

/// Turns statements proposed for the lines `fl` into an edit: the i-th
/// proposed statement replaces the i-th listed line, surplus statements are
/// appended and surplus lines removed.
pub fn llm_candidate(fl: &BTreeSet<usize>, statements: Vec<Statement>) -> RepairCandidate {
    let mut replaced = BTreeMap::new();
    let mut removed = BTreeSet::new();
    let mut statements = statements.into_iter();
    for &line in fl {
        match statements.next() {
            Some(mut s) => {
                s.line = line;
                replaced.insert(line, s);
            }
            None => {
                removed.insert(line);
            }
        }
    }
    RepairCandidate { replaced, added: statements.collect(), removed, distance: 0 }
}

struct Run<'a> {
    verifier: &'a Verifier,
    original: &'a Program,
    started: Instant,
    deadline: Instant,
    stats: RepairStats,
}

impl Run<'_> {
    fn timed_out(&self) -> bool {
        Instant::now() >= self.deadline
    }

    /// Full re-verification before anything is reported as repaired.
    fn confirmed(&self, program: &Program) -> bool {
        self.verifier.verify(program).is_ok_and(|r| r.is_correct())
    }

    fn finish(mut self, status: RepairStatus, repaired: Option<Program>, phase: Option<RepairPhase>) -> RepairOutcome {
        self.stats.wall_time = self.started.elapsed();
        let hint = repaired.as_ref().map(|r| make_hint(self.original, r));
        RepairOutcome { status, repaired, hint, phase, stats: self.stats }
    }
}

/// What to repair: ranked line sets and the correct program to learn from.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairTargets {
    pub acs: Vec<BTreeSet<usize>>,
    pub model: Program,
    pub missing_lines: bool,
}

impl RepairTargets {
    pub fn from_localization(localization: &Localization, spec: &InstanceSpec) -> Self {
        RepairTargets {
            acs: localization.acs.iter().map(|a| a.lines.clone()).collect(),
            model: localization.model.program(spec).clone(),
            missing_lines: localization.missing_lines(),
        }
    }
}

/// Repairs an incorrect `submission` given its fault localization.
pub fn repair(
    submission: &Program,
    verifier: &Verifier,
    localization: &Localization,
    llm: LlmSetup<'_>,
    options: &RepairOptions,
) -> RepairOutcome {
    repair_targets(submission, verifier, &RepairTargets::from_localization(localization, verifier.spec()), llm, options)
}

/// Repairs `submission` on explicitly given targets.
pub fn repair_targets(
    submission: &Program,
    verifier: &Verifier,
    targets: &RepairTargets,
    llm: LlmSetup<'_>,
    options: &RepairOptions,
) -> RepairOutcome {
    let started = Instant::now();
    let mut run =
        Run { verifier, original: submission, started, deadline: started + options.total_timeout, stats: RepairStats::default() };
    let spec = verifier.spec().clone();
    let model = &targets.model;

    if let (Some((client, config)), Some(top)) = (llm.filter(|(_, c)| c.enabled), targets.acs.first()) {
        let mut current = submission.clone();
        let mut fl = top.clone();
        let mut missing_lines = targets.missing_lines;
        for _ in 0..config.iterations {
            if run.timed_out() {
                return run.finish(RepairStatus::Timeout, None, None);
            }
            run.stats.llm_iterations += 1;
            let prompt = RepairPrompt {
                problem: spec.problem.clone(),
                reference_program: print_statements(model),
                incorrect_program: print_statements(&current),
                fl: fl.iter().copied().collect(),
                missing_lines,
            };
            let statements = match propose_repair(client, &prompt, config) {
                Ok(s) => s,
                Err(e) => {
                    run.stats.llm_errors.push(e.to_string());
                    continue;
                }
            };
            let Ok(patched) = llm_candidate(&fl, statements).apply(&current) else {
                run.stats.llm_errors.push("proposal has inconsistent predicate arities".into());
                continue;
            };
            let Ok(result) = verifier.verify(&patched) else { continue };
            if result.is_correct() {
                return run.finish(RepairStatus::Repaired, Some(patched), Some(RepairPhase::Llm));
            }
            // Localize the faults of the proposal itself and refine it next.
            let loc = localize(&patched, &spec, &result, &**verifier.backend(), None, &options.localize);
            fl = loc.acs.first().map(|a| a.lines.clone()).unwrap_or_default();
            missing_lines = loc.missing_lines();
            current = patched;
        }
    }

    if !options.mutation {
        return run.finish(RepairStatus::Exhausted, None, None);
    }
    for acs in targets.acs.iter().take(options.max_acs) {
        if run.timed_out() {
            return run.finish(RepairStatus::Timeout, None, None);
        }
        run.stats.acs_tried += 1;
        let mut enumerator = enumerator_for(submission, acs, model, verifier, options, run.deadline);
        loop {
            let batch: Vec<RepairCandidate> = enumerator.by_ref().take(options.batch.max(1)).collect();
            if batch.is_empty() {
                break;
            }
            run.stats.candidates_tried += batch.len();
            let found = batch.par_iter().position_first(|c| {
                c.apply(submission).is_ok_and(|p| verifier.verify_fast(&p).is_ok_and(|r| r.is_correct()))
            });
            if let Some(i) = found {
                let program = batch[i].apply(submission).expect("checked above");
                if run.confirmed(&program) {
                    return run.finish(RepairStatus::Repaired, Some(program), Some(RepairPhase::Mutation));
                }
            }
        }
        if enumerator.stop_reason() == Some(StopReason::Deadline) {
            return run.finish(RepairStatus::Timeout, None, None);
        }
    }
    let status = if run.timed_out() { RepairStatus::Timeout } else { RepairStatus::Exhausted };
    run.finish(status, None, None)
}

/// Enumerator for one correction subset; an empty subset switches to
/// extension mode seeded with the model lines the submission lacks.
pub fn enumerator_for(
    submission: &Program,
    lines: &BTreeSet<usize>,
    model: &Program,
    verifier: &Verifier,
    options: &RepairOptions,
    deadline: Instant,
) -> Enumerator {
    let spec = verifier.spec();
    let mut vocab = Vocabulary::new(submission, lines, &spec.solution_predicates);
    vocab.extend_with(model);
    for t in &spec.test_cases {
        for (name, arity) in t.facts().signatures() {
            vocab.add_predicate(name, *arity);
        }
        for name in t.facts().consts().keys() {
            vocab.add_constant(Term::Const(name.clone()));
        }
    }
    let enumerate =
        EnumerateOptions { max_distance: options.max_distance, budget: options.budget, deadline: Some(deadline), prune: true };
    if lines.is_empty() {
        let have: BTreeSet<String> = submission.statements().iter().map(|s| normalize(s).to_string()).collect();
        let templates: Vec<Statement> =
            model.statements().iter().filter(|s| !have.contains(&normalize(s).to_string())).cloned().collect();
        Enumerator::extension(&templates, submission.statements(), vocab, enumerate)
    } else {
        let statements: Vec<Statement> = lines.iter().filter_map(|&l| submission.statement(l).cloned()).collect();
        Enumerator::new(&statements, vocab, enumerate)
    }
}

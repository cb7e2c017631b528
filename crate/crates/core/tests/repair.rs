mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use asphint::fl::{localize, Localization, LocalizeOptions};
use asphint::harness::bundled;
use asphint::llm::{LlmConfig, LlmRequest, MockBackend, Task};
use asphint::repair::{repair, RepairOptions, RepairPhase, RepairStatus};
use asphint::syntax::{parse, print, Program};
use asphint::verify::{InstanceSpec, Verifier, VerifyOptions};

fn setup(sub: &Program) -> (Verifier, Localization) {
    let spec = Arc::new(bundled::vertex_cover());
    let verifier = Verifier::new(common::backend(), spec.clone(), VerifyOptions::default());
    let v = verifier.verify(sub).unwrap();
    assert!(!v.is_correct());
    let loc = localize(sub, &spec, &v, &*common::backend(), None, &LocalizeOptions::default());
    (verifier, loc)
}

fn independently_correct(program: &Program, spec: &InstanceSpec) -> bool {
    asphint::verify::verify(program, spec, common::backend()).unwrap().is_correct()
}

#[test]
fn golden_mutation_repair_drops_lower_bound() {
    let sub = bundled::vertex_cover_buggy();
    let started = Instant::now();
    let (verifier, loc) = setup(&sub);
    let out = repair(&sub, &verifier, &loc, None, &RepairOptions::default());
    assert_eq!(out.status, RepairStatus::Repaired);
    assert_eq!(out.phase, Some(RepairPhase::Mutation));
    let repaired = out.repaired.unwrap();
    assert_eq!(repaired.statements()[2].to_string(), "{ sel(X) : v(X) } k.");
    assert!(independently_correct(&repaired, verifier.spec()));
    let hint = out.hint.unwrap();
    assert_eq!(hint.changed_lines, BTreeSet::from([2]));
    assert_eq!(hint.text.lines().nth(2), Some("? { sel(X) : v(X) } k."));
    assert_eq!(hint.reconstruct(), print(&repaired));
    assert!(started.elapsed().as_secs() < 60);
}

#[test]
fn extension_mode_restores_missing_constraint() {
    let sub = parse("v(X) :- e(X,_).\nv(X) :- e(_,X).\n{ sel(X) : v(X) } k.\n").unwrap();
    let (verifier, loc) = setup(&sub);
    assert!(loc.acs.iter().any(|a| a.lines.is_empty()));
    let out = repair(&sub, &verifier, &loc, None, &RepairOptions::default());
    assert_eq!(out.status, RepairStatus::Repaired);
    let repaired = out.repaired.unwrap();
    assert_eq!(repaired.len(), 4);
    assert!(independently_correct(&repaired, verifier.spec()));
    let hint = out.hint.unwrap();
    assert_eq!(hint.text.lines().last(), Some("?"));
    assert_eq!(hint.reconstruct(), print(&repaired));
}

#[test]
fn exhaustion_without_candidates() {
    let sub = bundled::vertex_cover_buggy();
    let (verifier, loc) = setup(&sub);
    let options = RepairOptions { mutation: false, ..RepairOptions::default() };
    let out = repair(&sub, &verifier, &loc, None, &options);
    assert_eq!(out.status, RepairStatus::Exhausted);
    assert!(out.hint.is_none() && out.repaired.is_none());
}

#[test]
fn canned_llm_fix_needs_no_mutation() {
    let sub = bundled::vertex_cover_buggy();
    let (verifier, loc) = setup(&sub);
    let mock = MockBackend::new().with_sequence(Task::Repair, ["{ sel(X) : v(X) } k.".to_string()]);
    let config = LlmConfig { enabled: true, ..LlmConfig::default() };
    let out = repair(&sub, &verifier, &loc, Some((&mock, &config)), &RepairOptions::default());
    assert_eq!(out.status, RepairStatus::Repaired);
    assert_eq!(out.phase, Some(RepairPhase::Llm));
    assert_eq!(out.stats.llm_iterations, 1);
    assert_eq!(out.stats.candidates_tried, 0);
    let sent: Vec<LlmRequest> = mock.calls();
    assert_eq!(sent[0].fl.as_deref(), Some(&[2][..]));
}

#[test]
fn garbage_llm_falls_back_to_mutation() {
    let sub = bundled::vertex_cover_buggy();
    let (verifier, loc) = setup(&sub);
    let mock = MockBackend::new().with_rule(|r: &LlmRequest| (r.task == Task::Repair).then(|| "sel(X :- ???".to_string()));
    let config = LlmConfig { enabled: true, ..LlmConfig::default() };
    let out = repair(&sub, &verifier, &loc, Some((&mock, &config)), &RepairOptions::default());
    assert_eq!(out.stats.llm_iterations, 3);
    assert_eq!(out.stats.llm_errors.len(), 3);
    assert_eq!(mock.call_count(Task::Repair), 3);
    assert_eq!(out.status, RepairStatus::Repaired);
    assert_eq!(out.phase, Some(RepairPhase::Mutation));
}

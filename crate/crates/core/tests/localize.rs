mod common;

use std::collections::BTreeSet;

use asphint::fl::{localize, LocalizeOptions, Provenance};
use asphint::harness::bundled;
use asphint::llm::{LlmConfig, LlmRequest, MockBackend, Task};
use asphint::syntax::parse;
use asphint::verify::verify;

#[test]
fn golden_example_ranks_the_choice_line_first() {
    let spec = bundled::vertex_cover();
    let sub = bundled::vertex_cover_buggy();
    let v = verify(&sub, &spec, common::backend()).unwrap();
    let loc = localize(&sub, &spec, &v, &*common::backend(), None, &LocalizeOptions::default());
    assert_eq!(loc.msics.len(), 1);
    assert_eq!(loc.msics[0].lines(), &BTreeSet::from([2]));
    assert_eq!(loc.matching.suspicious, vec![2]);
    assert_eq!(loc.acs[0].lines, BTreeSet::from([2]));
    assert_eq!(loc.acs[0].score, 0.5);
    assert!(loc.acs[0].provenance.contains(&Provenance::Msics));
    assert!(loc.msics_errors.is_empty());
}

#[test]
fn classifier_scores_drive_ranking() {
    let spec = bundled::vertex_cover();
    let sub = bundled::vertex_cover_buggy();
    let v = verify(&sub, &spec, common::backend()).unwrap();
    let mock = MockBackend::new().with_rule(|r: &LlmRequest| {
        (r.task == Task::FaultLocalization).then(|| "0.1 0.1 0.9 0.6 | missing=0".to_string())
    });
    let config = LlmConfig { enabled: true, ..LlmConfig::default() };
    let loc = localize(&sub, &spec, &v, &*common::backend(), Some((&mock, &config)), &LocalizeOptions::default());
    assert_eq!(loc.llm_fl, Some(BTreeSet::from([2, 3])));
    let sent = &mock.calls()[0];
    assert_eq!(sent.incorrect_program, bundled::VERTEX_COVER_BUGGY);
    // {2,3} sums to 1.5, {2} to 0.9.
    assert_eq!(loc.acs[0].lines, BTreeSet::from([2, 3]));
    assert_eq!(loc.acs[1].lines, BTreeSet::from([2]));
}

#[test]
fn classifier_failure_falls_back_to_uniform() {
    let spec = bundled::vertex_cover();
    let sub = bundled::vertex_cover_buggy();
    let v = verify(&sub, &spec, common::backend()).unwrap();
    let config = LlmConfig { enabled: true, ..LlmConfig::default() };
    let loc = localize(&sub, &spec, &v, &*common::backend(), Some((&MockBackend::new(), &config)), &LocalizeOptions::default());
    assert!(loc.llm_error.is_some());
    assert_eq!(loc.scores.scores, vec![0.5; 4]);
    assert_eq!(loc.acs[0].lines, BTreeSet::from([2]));
}

#[test]
fn missing_constraint_gives_extension_mode() {
    let spec = bundled::vertex_cover();
    let sub = parse("v(X) :- e(X,_).\nv(X) :- e(_,X).\n{ sel(X) : v(X) } k.\n").unwrap();
    let v = verify(&sub, &spec, common::backend()).unwrap();
    assert!(!v.is_correct());
    let loc = localize(&sub, &spec, &v, &*common::backend(), None, &LocalizeOptions::default());
    assert!(loc.missing_lines());
    assert_eq!(loc.acs.len(), 1);
    assert!(loc.acs[0].is_empty());
}

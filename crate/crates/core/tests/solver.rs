mod common;

use std::time::Duration;

use asphint::solver::{
    check_satisfiable, enumerate_answer_sets, parse_ground_atom, ModelLimit, Satisfiability, SolveRequest,
    SolveStatus,
};
use asphint::syntax::Signature;

fn atoms(set: &asphint::solver::AnswerSet) -> Vec<String> {
    set.atoms().iter().map(|a| a.to_string()).collect()
}

#[test]
fn enumerates_all_models_in_canonical_order() {
    let b = common::backend();
    let r = enumerate_answer_sets(&*b, &SolveRequest::new("{ a; b }.")).unwrap();
    assert_eq!(r.status, SolveStatus::Sat);
    assert!(r.exhausted);
    let got: Vec<Vec<String>> = r.answer_sets.iter().map(atoms).collect();
    assert_eq!(got, vec![vec![], vec!["a".to_string()], vec!["a".into(), "b".into()], vec!["b".to_string()]]);
}

#[test]
fn projection_collapses_models() {
    let b = common::backend();
    let req = SolveRequest::new("p(1..3). { q(X) : p(X) }. r :- q(1).").project([Signature::new("r", 0)]);
    let r = enumerate_answer_sets(&*b, &req).unwrap();
    assert_eq!(r.answer_sets.len(), 2);
    assert!(r.exhausted);
}

#[test]
fn model_limit_is_respected() {
    let b = common::backend();
    let req = SolveRequest::new("{ a(1..5) }.").max_models(ModelLimit::count(3));
    let r = enumerate_answer_sets(&*b, &req).unwrap();
    assert_eq!(r.answer_sets.len(), 3);
    assert!(!r.exhausted);
}

#[test]
fn satisfiability() {
    let b = common::backend();
    let t = Duration::from_secs(5);
    assert_eq!(check_satisfiable(&*b, "a. :- not a.", t).unwrap(), Satisfiability::Sat);
    assert_eq!(check_satisfiable(&*b, "a. :- a.", t).unwrap(), Satisfiability::Unsat);
    assert_eq!(check_satisfiable(&*b, "a :- not a.", t).unwrap(), Satisfiability::Unsat);
}

#[test]
fn grounding_errors_are_reported() {
    let b = common::backend();
    let r = enumerate_answer_sets(&*b, &SolveRequest::new("p(X) :- not q(X).")).unwrap();
    assert_eq!(r.status, SolveStatus::SolverError);
    assert!(r.stderr.unwrap().contains("unsafe"));
    assert!(check_satisfiable(&*b, "p(X) :- not q(X).", Duration::from_secs(5)).is_err());
}

#[test]
fn classical_negation_and_compound_terms() {
    let b = common::backend();
    let req = SolveRequest::new("-p(1). p(2). q(f(a),(1,2),\"s\").").project([Signature::new("p", 1), Signature::new("q", 3)]);
    let r = enumerate_answer_sets(&*b, &req).unwrap();
    assert_eq!(atoms(&r.answer_sets[0]), vec!["-p(1)", "p(2)", "q(f(a),(1,2),\"s\")"]);
    assert_eq!(parse_ground_atom("q(f(a),(1,2),\"s\")").unwrap().to_string(), "q(f(a),(1,2),\"s\")");
}

mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use asphint::fl::{msics_enumerate, relax, CorrectionSubset};
use asphint::harness::bundled;
use asphint::solver::{check_satisfiable, parse_ground_atom, AnswerSet, Satisfiability};
use asphint::syntax::{parse, Signature};
use asphint::verify::TestCase;

const BUDGET: Duration = Duration::from_secs(30);

fn set(atoms: &[&str]) -> AnswerSet {
    AnswerSet::new(atoms.iter().map(|a| parse_ground_atom(a).unwrap()))
}

fn lines(subsets: &[CorrectionSubset]) -> Vec<Vec<usize>> {
    subsets.iter().map(|s| s.lines().iter().copied().collect()).collect()
}

/// Minimal satisfiable disabled-sets by one solver call per subset.
fn brute_force(relaxed: &asphint::fl::RelaxedProgram) -> Vec<Vec<usize>> {
    let b = common::backend();
    let n = relaxed.guarded.len();
    let mut sat: Vec<BTreeSet<usize>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let disabled: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let r = check_satisfiable(&*b, &relaxed.with_disabled(&disabled), BUDGET).unwrap();
        if r == Satisfiability::Sat {
            sat.push(disabled);
        }
    }
    if sat.iter().any(|s| s.is_empty()) {
        return Vec::new();
    }
    let mut minimal: Vec<Vec<usize>> = sat
        .iter()
        .filter(|s| !sat.iter().any(|o| o.len() < s.len() && o.is_subset(s)))
        .map(|s| s.iter().copied().collect())
        .collect();
    minimal.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    minimal
}

#[test]
fn intro_example_implicates_the_choice_rule() {
    let spec = bundled::vertex_cover();
    let test = spec.test("single-edge").unwrap();
    let relaxed = relax(&bundled::vertex_cover_buggy(), test, &set(&["sel(2)"]), &spec.solution_predicates).unwrap();
    assert_eq!(relaxed.guarded.len(), 4);
    let kept: BTreeSet<usize> = [2].into();
    assert_eq!(check_satisfiable(&*common::backend(), &relaxed.with_disabled(&kept), BUDGET).unwrap(), Satisfiability::Sat);
    let out = msics_enumerate(&*common::backend(), &relaxed, None, BUDGET).unwrap();
    assert_eq!(lines(&out.subsets), vec![vec![2]]);
    assert!(!out.partial);
}

#[test]
fn single_fact_must_go() {
    let p = parse("a.\n").unwrap();
    let t = TestCase::new("t", "").unwrap();
    let sol: BTreeSet<Signature> = [Signature::new("a", 0)].into();
    let relaxed = relax(&p, &t, &set(&[]), &sol).unwrap();
    let out = msics_enumerate(&*common::backend(), &relaxed, None, BUDGET).unwrap();
    assert_eq!(lines(&out.subsets), vec![vec![0]]);
}

#[test]
fn independent_blockers_give_two_singletons() {
    let p = parse("q.\nr.\n:- r.\n").unwrap();
    let t = TestCase::new("t", "").unwrap();
    let sol: BTreeSet<Signature> = [Signature::new("q", 0)].into();
    let relaxed = relax(&p, &t, &set(&["q"]), &sol).unwrap();
    let out = msics_enumerate(&*common::backend(), &relaxed, None, BUDGET).unwrap();
    assert_eq!(lines(&out.subsets), vec![vec![1], vec![2]]);
    assert_eq!(lines(&out.subsets), brute_force(&relaxed));
}

#[test]
fn satisfiable_system_has_no_subsets() {
    let spec = bundled::vertex_cover();
    let test = spec.test("single-edge").unwrap();
    let relaxed = relax(&spec.reference, test, &set(&["sel(2)"]), &spec.solution_predicates).unwrap();
    assert!(msics_enumerate(&*common::backend(), &relaxed, None, BUDGET).unwrap().subsets.is_empty());
}

#[test]
fn non_monotone_family_matches_brute_force() {
    // Disabling line 2 alone helps, disabling lines 0 and 2 does not.
    let p = parse("s :- not t.\nt :- u.\n:- not s, q.\nu.\n").unwrap();
    let t = TestCase::new("t", "").unwrap();
    let sol: BTreeSet<Signature> = [Signature::new("q", 0)].into();
    let relaxed = relax(&p, &t, &set(&["q"]), &sol).unwrap();
    let out = msics_enumerate(&*common::backend(), &relaxed, None, BUDGET).unwrap();
    assert_eq!(lines(&out.subsets), brute_force(&relaxed));
    assert!(!out.subsets.is_empty());
}

#[test]
fn limit_truncates() {
    let p = parse("q.\nr.\n:- r.\n").unwrap();
    let t = TestCase::new("t", "").unwrap();
    let sol: BTreeSet<Signature> = [Signature::new("q", 0)].into();
    let relaxed = relax(&p, &t, &set(&["q"]), &sol).unwrap();
    let out = msics_enumerate(&*common::backend(), &relaxed, Some(1), BUDGET).unwrap();
    assert_eq!(lines(&out.subsets), vec![vec![1]]);
}

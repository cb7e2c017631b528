//! Synthetic bugs: seeded mutations of a correct program.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::syntax::{parse, Atom, CmpOp, Head, Literal, Program, Statement, Term};
use crate::verify::Verifier;

/// Re-draws allowed when a mutant is still correct.
pub const MAX_RETRIES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    RenamePredicate,
    SwapVariable,
    ToggleNegation,
    PerturbBounds,
    DeleteConstraint,
    FlipComparison,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::RenamePredicate,
        MutationKind::SwapVariable,
        MutationKind::ToggleNegation,
        MutationKind::PerturbBounds,
        MutationKind::DeleteConstraint,
        MutationKind::FlipComparison,
    ];
}

/// Touched lines of the mutant; `missing_line` stands for deleted lines.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub lines: BTreeSet<usize>,
    pub missing_line: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticBug {
    #[serde(with = "program_text")]
    pub base: Program,
    #[serde(with = "program_text")]
    pub mutated: Program,
    pub ground_truth: GroundTruth,
    pub mutations: Vec<MutationKind>,
    pub seed: u64,
}

pub(crate) mod program_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::syntax::{parse, Program};

    pub fn serialize<S: Serializer>(p: &Program, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Program, D::Error> {
        parse(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InjectError {
    #[error("mutation count must be within 1..=8, got {0}")]
    Count(usize),
    #[error("base program is not correct on its instance")]
    BaseIncorrect,
    #[error("no mutant among {MAX_RETRIES} draws is incorrect")]
    CannotBreak,
    #[error("verification failed: {0}")]
    Verify(String),
}

#[derive(Debug, Clone)]
pub struct InjectOptions {
    /// Mutation kinds drawn uniformly.
    pub kinds: Vec<MutationKind>,
    /// Predicates renames may target besides the base's own, e.g. the
    /// predicates of the test facts.
    pub extra_predicates: Vec<(String, usize)>,
    /// Constants choice bounds may take besides the base's own.
    pub extra_constants: Vec<Term>,
}

impl Default for InjectOptions {
    fn default() -> Self {
        InjectOptions { kinds: MutationKind::ALL.to_vec(), extra_predicates: Vec::new(), extra_constants: Vec::new() }
    }
}

/// A statement of the mutant and whether a mutation touched it.
struct Slot {
    statement: Statement,
    touched: bool,
}

struct Draft {
    slots: Vec<Slot>,
    deleted: bool,
}

/// Applies `count` seeded mutations to `base` and re-draws until the mutant
/// is incorrect according to `verifier`.
pub fn inject_bugs(
    base: &Program,
    count: usize,
    seed: u64,
    verifier: &Verifier,
    options: &InjectOptions,
) -> Result<SyntheticBug, InjectError> {
    if !(1..=8).contains(&count) {
        return Err(InjectError::Count(count));
    }
    let check = |p: &Program| verifier.verify(p).map(|r| r.is_correct()).map_err(|e| InjectError::Verify(e.to_string()));
    if !check(base)? {
        return Err(InjectError::BaseIncorrect);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let Some((mutated, ground_truth, mutations)) = draw(base, count, &mut rng, options) else { continue };
        if mutated.to_string() != base.to_string() && !check(&mutated)? {
            return Ok(SyntheticBug { base: base.clone(), mutated, ground_truth, mutations, seed });
        }
    }
    Err(InjectError::CannotBreak)
}

/// One mutant without verification; `None` when no mutation applies.
pub fn draw(
    base: &Program,
    count: usize,
    rng: &mut impl Rng,
    options: &InjectOptions,
) -> Option<(Program, GroundTruth, Vec<MutationKind>)> {
    let mut draft = Draft {
        slots: base.statements().iter().map(|s| Slot { statement: s.clone(), touched: false }).collect(),
        deleted: false,
    };
    let mut predicates: Vec<(String, usize)> = base.signatures().iter().map(|(n, a)| (n.clone(), *a)).collect();
    for p in &options.extra_predicates {
        if !predicates.iter().any(|(n, _)| *n == p.0) {
            predicates.push(p.clone());
        }
    }
    let mut constants = base.constants();
    constants.extend(base.consts().keys().map(|k| Term::Const(k.clone())));
    constants.extend(options.extra_constants.iter().cloned());
    constants.extend([Term::Int(0), Term::Int(1)]);
    let mut applied = Vec::new();
    let mut attempts = 0;
    while applied.len() < count && attempts < 50 * count {
        attempts += 1;
        let kind = *options.kinds.choose(rng)?;
        if apply(kind, &mut draft, rng, &predicates, &constants) {
            applied.push(kind);
        }
    }
    if applied.is_empty() {
        return None;
    }
    let mutated = Program::new(draft.slots.iter().map(|s| s.statement.clone()).collect(), base.consts().clone()).ok()?;
    let lines = draft.slots.iter().enumerate().filter(|(_, s)| s.touched).map(|(i, _)| i).collect();
    // Re-parse so spans and line numbers match a file read from disk.
    let mutated = parse(&mutated.to_string()).ok()?;
    Some((mutated, GroundTruth { lines, missing_line: draft.deleted }, applied))
}

fn apply(kind: MutationKind, draft: &mut Draft, rng: &mut impl Rng, predicates: &[(String, usize)], constants: &[Term]) -> bool {
    let candidates: Vec<usize> = (0..draft.slots.len())
        .filter(|&i| applicable(kind, &draft.slots[i].statement, predicates))
        .collect();
    let Some(&i) = candidates.choose(rng) else { return false };
    if kind == MutationKind::DeleteConstraint {
        draft.slots.remove(i);
        draft.deleted = true;
        return true;
    }
    let s = &mut draft.slots[i];
    let changed = match kind {
        MutationKind::RenamePredicate => rename_predicate(&mut s.statement, rng, predicates),
        MutationKind::SwapVariable => swap_variable(&mut s.statement, rng),
        MutationKind::ToggleNegation => toggle_negation(&mut s.statement, rng),
        MutationKind::PerturbBounds => perturb_bounds(&mut s.statement, rng, constants),
        MutationKind::FlipComparison => flip_comparison(&mut s.statement, rng),
        MutationKind::DeleteConstraint => unreachable!(),
    };
    s.touched |= changed;
    changed
}

fn applicable(kind: MutationKind, s: &Statement, predicates: &[(String, usize)]) -> bool {
    match kind {
        MutationKind::RenamePredicate => s.atoms().iter().any(|a| match a {
            Atom::Pred { name, args } => predicates.iter().any(|(n, ar)| n != name && *ar == args.len()),
            Atom::Cmp { .. } => false,
        }),
        MutationKind::SwapVariable => !swappable(s).is_empty(),
        MutationKind::ToggleNegation => s.body.iter().any(|l| matches!(l.atom, Atom::Pred { .. })),
        MutationKind::PerturbBounds => matches!(s.head, Head::Choice { .. }),
        MutationKind::DeleteConstraint => s.is_constraint(),
        MutationKind::FlipComparison => s.atoms().iter().any(|a| matches!(a, Atom::Cmp { .. })),
    }
}

/// Every predicate atom of the statement, mutable, in reading order.
fn atoms_mut(s: &mut Statement) -> Vec<&mut Atom> {
    let mut out = Vec::new();
    match &mut s.head {
        Head::None => {}
        Head::Atom(a) => out.push(a),
        Head::Choice { elements, .. } => {
            for e in elements {
                out.push(&mut e.atom);
                out.extend(e.condition.iter_mut().map(|l| &mut l.atom));
            }
        }
    }
    out.extend(s.body.iter_mut().map(|l| &mut l.atom));
    out
}

fn rename_predicate(s: &mut Statement, rng: &mut impl Rng, predicates: &[(String, usize)]) -> bool {
    let mut atoms: Vec<&mut Atom> = atoms_mut(s)
        .into_iter()
        .filter(|a| match a {
            Atom::Pred { name, args } => predicates.iter().any(|(n, ar)| n != name && *ar == args.len()),
            Atom::Cmp { .. } => false,
        })
        .collect();
    let Some(idx) = (0..atoms.len()).collect::<Vec<_>>().choose(rng).copied() else { return false };
    let Atom::Pred { name, args } = &mut *atoms[idx] else { return false };
    let options: Vec<&String> = predicates.iter().filter(|(n, ar)| n != name && *ar == args.len()).map(|(n, _)| n).collect();
    match options.choose(rng) {
        Some(new) => {
            *name = (*new).clone();
            true
        }
        None => false,
    }
}

/// Variables occurring at least twice, so that one occurrence can be
/// replaced while the variable stays in the statement.
fn swappable(s: &Statement) -> Vec<String> {
    let mut counts: std::collections::BTreeMap<String, usize> = Default::default();
    s.visit_vars(&mut |v| *counts.entry(v.to_owned()).or_default() += 1);
    if counts.len() < 2 {
        return Vec::new();
    }
    counts.into_iter().filter(|(_, c)| *c >= 2).map(|(v, _)| v).collect()
}

fn visit_terms_mut(s: &mut Statement, f: &mut impl FnMut(&mut Term)) {
    fn walk(t: &mut Term, f: &mut impl FnMut(&mut Term)) {
        f(t);
        match t {
            Term::BinOp(_, l, r) | Term::Interval(l, r) => {
                walk(l, f);
                walk(r, f);
            }
            Term::Abs(x) => walk(x, f),
            Term::Pool(ts) => ts.iter_mut().for_each(|t| walk(t, f)),
            _ => {}
        }
    }
    for a in atoms_mut(s) {
        match a {
            Atom::Pred { args, .. } => args.iter_mut().for_each(|t| walk(t, f)),
            Atom::Cmp { left, right, .. } => {
                walk(left, f);
                walk(right, f);
            }
        }
    }
}

fn swap_variable(s: &mut Statement, rng: &mut impl Rng) -> bool {
    let Some(from) = swappable(s).choose(rng).cloned() else { return false };
    let others: Vec<String> = s.variables().into_iter().filter(|v| *v != from).collect();
    let Some(to) = others.choose(rng).cloned() else { return false };
    let mut occurrences = 0;
    visit_terms_mut(s, &mut |t| occurrences += usize::from(matches!(t, Term::Var(v) if *v == from)));
    let target = rng.gen_range(0..occurrences.max(1));
    let mut seen = 0;
    let mut changed = false;
    visit_terms_mut(s, &mut |t| {
        if matches!(t, Term::Var(v) if *v == from) {
            if seen == target {
                *t = Term::Var(to.clone());
                changed = true;
            }
            seen += 1;
        }
    });
    changed
}

fn toggle_negation(s: &mut Statement, rng: &mut impl Rng) -> bool {
    let idx: Vec<usize> = (0..s.body.len()).filter(|&i| matches!(s.body[i].atom, Atom::Pred { .. })).collect();
    let Some(&i) = idx.choose(rng) else { return false };
    let l: &mut Literal = &mut s.body[i];
    l.negated = !l.negated;
    true
}

fn perturb_bounds(s: &mut Statement, rng: &mut impl Rng, constants: &[Term]) -> bool {
    let Head::Choice { lower, upper, .. } = &mut s.head else { return false };
    let bound = if rng.gen_bool(0.5) { lower } else { upper };
    let before = bound.clone();
    *bound = match bound {
        Some(_) if rng.gen_bool(0.5) => None,
        _ => constants.iter().filter(|c| Some(*c) != before.as_ref()).collect::<Vec<_>>().choose(rng).map(|c| (*c).clone()),
    };
    *bound != before
}

fn flip_comparison(s: &mut Statement, rng: &mut impl Rng) -> bool {
    let mut cmps: Vec<&mut Atom> = atoms_mut(s).into_iter().filter(|a| matches!(a, Atom::Cmp { .. })).collect();
    let Some(i) = (0..cmps.len()).collect::<Vec<_>>().choose(rng).copied() else { return false };
    let Atom::Cmp { op, .. } = &mut *cmps[i] else { return false };
    let others: Vec<CmpOp> = CmpOp::ALL.into_iter().filter(|o| o != op).collect();
    *op = *others.choose(rng).expect("five other operators");
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_tracked() {
        let base = parse("v(X) :- e(X,_).\nv(X) :- e(_,X).\n{ sel(X) : v(X) } k.\n:- not sel(X), not sel(Y), e(X,Y).\n").unwrap();
        for seed in 0..50 {
            let a = draw(&base, 2, &mut ChaCha8Rng::seed_from_u64(seed), &InjectOptions::default()).unwrap();
            let b = draw(&base, 2, &mut ChaCha8Rng::seed_from_u64(seed), &InjectOptions::default()).unwrap();
            assert_eq!(a, b);
            let (mutated, truth, kinds) = a;
            assert_eq!(truth.missing_line, kinds.contains(&MutationKind::DeleteConstraint));
            assert!(truth.lines.iter().all(|&l| l < mutated.len()));
            for (i, s) in mutated.statements().iter().enumerate() {
                if !truth.lines.contains(&i) && !truth.missing_line {
                    assert_eq!(s.to_string(), base.statements()[i].to_string());
                }
            }
        }
    }

    #[test]
    fn negation_toggle_marks_its_line() {
        let base = parse("v(X) :- e(X,_).\n:- not sel(X), e(X,Y).\n").unwrap();
        let opts = InjectOptions { kinds: vec![MutationKind::ToggleNegation], ..Default::default() };
        let (m, truth, _) = draw(&base, 1, &mut ChaCha8Rng::seed_from_u64(1), &opts).unwrap();
        assert_eq!(truth.lines.len(), 1);
        let line = *truth.lines.first().unwrap();
        let negs = |s: &Statement| s.body.iter().filter(|l| l.negated).count();
        assert_eq!(negs(&m.statements()[line]).abs_diff(negs(&base.statements()[line])), 1);
    }
}

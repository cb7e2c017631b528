//! Property suites over generated statements and programs.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use asphint::fl::combine::{combine, LineScores};
use asphint::fl::{anonymize, bag_distance, choose_model, match_lines, CorrectionSubset};
use asphint::harness::{draw, label, random_program, random_statement, Alphabet, FlLabel, GroundTruth, InjectOptions};
use asphint::mutation::{head_invalid, violation, EnumerateOptions, Enumerator, MutationTree, RepairCandidate, Vocabulary};
use asphint::repair::make_hint;
use asphint::syntax::{
    normalize, parse, parse_statement, print, Atom, ChoiceElement, Head, Literal, Program, Signature, Statement, Term,
};
use asphint::verify::InstanceSpec;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn statement(seed: u64) -> Statement {
    random_statement(&mut rng(seed), &Alphabet::default())
}

fn program(seed: u64, lines: usize) -> Program {
    random_program(&mut rng(seed), &Alphabet::default(), lines)
}

/// Swaps the operands of every commutative operator.
fn flip_term(t: &Term) -> Term {
    match t {
        Term::BinOp(op, l, r) if op.is_commutative() => Term::binop(*op, flip_term(r), flip_term(l)),
        Term::BinOp(op, l, r) => Term::binop(*op, flip_term(l), flip_term(r)),
        Term::Abs(x) => Term::Abs(Box::new(flip_term(x))),
        Term::Interval(l, h) => Term::Interval(Box::new(flip_term(l)), Box::new(flip_term(h))),
        Term::Pool(ts) => Term::Pool(ts.iter().map(flip_term).collect()),
        leaf => leaf.clone(),
    }
}

fn flip_atom(a: &Atom) -> Atom {
    match a {
        Atom::Pred { name, args } => Atom::Pred { name: name.clone(), args: args.iter().map(flip_term).collect() },
        Atom::Cmp { op, left, right } if op.is_commutative() => Atom::cmp(*op, flip_term(right), flip_term(left)),
        Atom::Cmp { op, left, right } => Atom::cmp(*op, flip_term(left), flip_term(right)),
    }
}

fn flip_literals(ls: &[Literal], rng: &mut ChaCha8Rng) -> Vec<Literal> {
    let mut out: Vec<Literal> = ls.iter().map(|l| Literal { atom: flip_atom(&l.atom), ..l.clone() }).collect();
    out.shuffle(rng);
    out
}

/// A structurally equivalent variant: commutative operands swapped, body
/// and conditions shuffled, a missing lower bound made an explicit `0`.
fn equivalent_variant(s: &Statement, seed: u64) -> Statement {
    let mut rng = rng(seed);
    let head = match &s.head {
        Head::None => Head::None,
        Head::Atom(a) => Head::Atom(flip_atom(a)),
        Head::Choice { lower, elements, upper } => Head::Choice {
            lower: Some(lower.as_ref().map(flip_term).unwrap_or(Term::Int(0))),
            elements: elements
                .iter()
                .map(|e| ChoiceElement { atom: flip_atom(&e.atom), condition: flip_literals(&e.condition, &mut rng) })
                .collect(),
            upper: upper.as_ref().map(flip_term),
        },
    };
    Statement::new(head, flip_literals(&s.body, &mut rng))
}

fn renamed_variables(s: &Statement) -> Statement {
    let text = s.to_string().replace('X', "W").replace('Y', "U");
    parse_statement(&text).expect("renaming keeps the statement valid")
}

fn candidate_key(c: &RepairCandidate, normalized: bool) -> String {
    let mut key: String = c.removed.iter().map(|l| format!("-{l};")).collect();
    for (l, s) in &c.replaced {
        let s = if normalized { normalize(s) } else { s.clone() };
        key.push_str(&format!("{l}:{s};"));
    }
    key
}

fn single_line_vocab(s: &Statement) -> (Program, Vocabulary) {
    let program = Program::new(vec![s.clone()], Default::default()).expect("one statement");
    let solution: BTreeSet<Signature> = program.signature_set().into_iter().collect();
    let vocab = Vocabulary::new(&program, &BTreeSet::from([0]), &solution);
    (program, vocab)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let p = program(seed, 5);
        let text = print(&p);
        let reparsed = parse(&text).unwrap();
        prop_assert_eq!(&reparsed, &p);
        prop_assert_eq!(print(&reparsed), text);
        for (k, s) in reparsed.statements().iter().enumerate() {
            prop_assert_eq!(s.line, k);
        }
    }

    #[test]
    fn normalization_is_idempotent_and_class_stable(seed in any::<u64>()) {
        let s = statement(seed);
        let n = normalize(&s);
        prop_assert_eq!(normalize(&n), n.clone());
        prop_assert_eq!(normalize(&equivalent_variant(&s, seed)), n);
    }

    #[test]
    fn encode_decode_round_trip(seed in any::<u64>()) {
        let s = statement(seed);
        let tree = MutationTree::encode(&s);
        prop_assert_eq!(tree.decode(), s);
        prop_assert_eq!(tree.nodes().len(), tree.size());
        prop_assert_eq!(tree.slots().len(), tree.size());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bag_distance_is_a_pseudo_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (anonymize(&statement(a)), anonymize(&statement(b)), anonymize(&statement(c)));
        prop_assert_eq!(bag_distance(&x, &x), 0);
        prop_assert_eq!(bag_distance(&x, &y), bag_distance(&y, &x));
        prop_assert!(bag_distance(&x, &z) <= bag_distance(&x, &y) + bag_distance(&y, &z));
        let s = statement(a);
        prop_assert_eq!(bag_distance(&anonymize(&s), &anonymize(&renamed_variables(&s))), 0);
        prop_assert_eq!(bag_distance(&anonymize(&s), &anonymize(&equivalent_variant(&s, b))), 0);
    }

    #[test]
    fn matching_beats_identity_pairing(a in any::<u64>(), b in any::<u64>(), n in 0usize..7, m in 0usize..7) {
        let (p, q) = (program(a, n), program(b, m));
        let bags = |p: &Program| p.statements().iter().map(anonymize).collect::<Vec<_>>();
        let (bp, bq) = (bags(&p), bags(&q));
        let identity: u32 = (0..n.max(m))
            .map(|i| match (bp.get(i), bq.get(i)) {
                (Some(x), Some(y)) => bag_distance(x, y),
                (Some(x), None) | (None, Some(x)) => x.size(),
                (None, None) => 0,
            })
            .sum();
        prop_assert!(match_lines(&p, &q, 3).total_cost <= identity);
    }

    #[test]
    fn farther_pool_entries_never_change_the_model(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let submission = program(a, 4);
        let reference = program(b, 4);
        let spec = InstanceSpec::new("p", reference, Vec::new(), Vec::new()).unwrap();
        let before = choose_model(&submission, &spec);
        let extra = program(c, 5);
        prop_assume!(match_lines(&submission, &extra, 3).total_cost > before.distance);
        let mut pool = spec.correct_pool.clone();
        pool.push(extra);
        let after = choose_model(&submission, &spec.with_correct_pool(pool));
        prop_assert_eq!(after, before);
    }

    #[test]
    fn ranking_ignores_input_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lines = 6;
        let subsets: Vec<CorrectionSubset> = (0..r.gen_range(0..5))
            .map(|_| CorrectionSubset((0..lines).filter(|_| r.gen_bool(0.3)).collect()))
            .collect();
        let suspicious: BTreeSet<usize> = (0..lines).filter(|_| r.gen_bool(0.2)).collect();
        let llm: BTreeSet<usize> = (0..lines).filter(|_| r.gen_bool(0.3)).collect();
        let scores = LineScores::<f64>::new((0..lines).map(|_| f64::from(r.gen_range(0..=4u8)) / 4.0), false);
        let ranked = combine(&subsets, Some(&llm), &suspicious, &scores);
        let mut shuffled = subsets.clone();
        shuffled.shuffle(&mut r);
        prop_assert_eq!(&combine(&shuffled, Some(&llm), &suspicious, &scores), &ranked);
        prop_assert!(!ranked.is_empty());
        for w in ranked.windows(2) {
            prop_assert!(w[0].score >= w[1].score);
        }
    }

    #[test]
    fn raising_a_line_score_promotes_its_subsets(seed in any::<u64>(), line in 0usize..6) {
        let mut r = rng(seed);
        let lines = 6;
        let subsets: Vec<CorrectionSubset> = (0..r.gen_range(1..6))
            .map(|_| CorrectionSubset((0..lines).filter(|_| r.gen_bool(0.35)).collect()))
            .collect();
        let raw: Vec<f64> = (0..lines).map(|_| f64::from(r.gen_range(0..=3u8)) / 4.0).collect();
        let mut raised = raw.clone();
        raised[line] += 0.25;
        let before = combine(&subsets, None, &BTreeSet::new(), &LineScores::new(raw, false));
        let after = combine(&subsets, None, &BTreeSet::new(), &LineScores::new(raised, false));
        let score = |v: &[asphint::AugmentedCorrectionSubset], s: &BTreeSet<usize>| {
            v.iter().position(|a| &a.lines == s).map(|i| (i, v[i].score))
        };
        for a in &before {
            let (_, old) = score(&before, &a.lines).unwrap();
            let (pos, new) = score(&after, &a.lines).unwrap();
            if !a.lines.contains(&line) {
                continue;
            }
            prop_assert!(new > old);
            for b in before.iter().filter(|b| !b.lines.contains(&line) && b.score < a.score) {
                let (other, _) = score(&after, &b.lines).unwrap();
                prop_assert!(pos < other);
            }
        }
    }

    #[test]
    fn hint_answers_reconstruct_the_repair(a in any::<u64>(), b in any::<u64>()) {
        let original = program(a, 4);
        let repaired = if b % 3 == 0 {
            program(b, (b % 6) as usize)
        } else {
            match draw(&original, 1 + (b % 3) as usize, &mut rng(b), &InjectOptions::default()) {
                Some((p, _, _)) => p,
                None => original.clone(),
            }
        };
        let hint = make_hint(&original, &repaired);
        prop_assert_eq!(hint.reconstruct(), print(&repaired));
        prop_assert_eq!(hint.fill(&hint.answers), Some(print(&repaired)));
        prop_assert_eq!(hint.text.matches('?').count() >= hint.holes(), true);
        let text: Vec<&str> = hint.text.lines().collect();
        let printed: Vec<String> = repaired.statements().iter().map(|s| s.to_string()).collect();
        for (k, line) in text.iter().enumerate() {
            if hint.changed_lines.contains(&k) {
                prop_assert!(line.contains('?'));
            } else {
                prop_assert!(printed.iter().any(|p| p == line), "{} not in repaired program", line);
            }
        }
        if original == repaired {
            prop_assert_eq!(hint.holes(), 0);
        }
    }

    #[test]
    fn labels_match_their_definitions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let identified: BTreeSet<usize> = (0..5).filter(|_| r.gen_bool(0.3)).collect();
        let truth = GroundTruth { lines: (0..5).filter(|_| r.gen_bool(0.3)).collect(), missing_line: r.gen_bool(0.3) };
        prop_assume!(!truth.lines.is_empty() || truth.missing_line);
        // The missing-line sentinel joins both sides as one more line.
        const SENTINEL: usize = usize::MAX;
        let mut t = truth.lines.clone();
        if truth.missing_line {
            t.insert(SENTINEL);
        }
        let i = if identified.is_empty() { BTreeSet::from([SENTINEL]) } else { identified.clone() };
        let expected = if i == t {
            FlLabel::Exact
        } else if i.is_superset(&t) {
            FlLabel::Superset
        } else if !i.is_disjoint(&t) {
            FlLabel::Some
        } else if identified.is_empty() {
            FlLabel::NotIdentified
        } else {
            FlLabel::WrongIdentification
        };
        prop_assert_eq!(label(&identified, &truth), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn candidates_are_sound_and_ordered(seed in any::<u64>()) {
        let s = statement(seed);
        let (program, vocab) = single_line_vocab(&s);
        let arities: BTreeMap<String, usize> = vocab.predicates.iter().cloned().collect();
        let fresh = vocab.fresh.clone();
        let options = EnumerateOptions { max_distance: 2, budget: 3000, ..EnumerateOptions::default() };
        let mut last = 0;
        for c in Enumerator::new(&[s.clone()], vocab, options).take(400) {
            prop_assert!(c.distance >= last);
            last = c.distance;
            let patched = c.apply(&program);
            prop_assert!(patched.is_ok(), "arity clash in {:?}", c);
            for r in c.replaced.values() {
                prop_assert_eq!(&parse_statement(&r.to_string()).unwrap(), r);
                prop_assert!(violation(r, &fresh).is_none() && !head_invalid(r));
                for sig in r.signatures() {
                    prop_assert_eq!(arities.get(&sig.name), Some(&sig.arity), "{} outside vocabulary", sig);
                }
            }
        }
    }

    #[test]
    fn pruning_only_drops_redundant_candidates(seed in any::<u64>()) {
        let s = statement(seed);
        prop_assume!(MutationTree::encode(&s).size() <= 6);
        let (_, vocab) = single_line_vocab(&s);
        let fresh = vocab.fresh.clone();
        let run = |prune: bool| {
            let options = EnumerateOptions { max_distance: 2, budget: 200_000, prune, ..EnumerateOptions::default() };
            let mut e = Enumerator::new(&[s.clone()], vocab.clone(), options);
            let all: Vec<RepairCandidate> = e.by_ref().collect();
            (all, e.stop_reason())
        };
        let (pruned, a) = run(true);
        let (unpruned, b) = run(false);
        prop_assume!(a == Some(asphint::mutation::StopReason::Exhausted));
        prop_assume!(b == Some(asphint::mutation::StopReason::Exhausted));
        let raw: BTreeSet<String> = unpruned.iter().map(|c| candidate_key(c, false)).collect();
        let mut kept: BTreeSet<String> = pruned.iter().map(|c| candidate_key(c, true)).collect();
        // Variants equivalent to the unmutated statement are no edit at all.
        kept.insert(format!("0:{};", normalize(&s)));
        for c in &pruned {
            prop_assert!(raw.contains(&candidate_key(c, false)), "pruned stream invented {}", candidate_key(c, false));
            for r in c.replaced.values() {
                prop_assert!(violation(r, &fresh).is_none() && !head_invalid(r));
            }
        }
        for c in &unpruned {
            let redundant = kept.contains(&candidate_key(c, true));
            let ruled_out = c.replaced.values().any(|r| violation(r, &fresh).is_some() || head_invalid(r));
            prop_assert!(redundant || ruled_out, "dropped {} without a reason", candidate_key(c, false));
        }
    }
}

//! Seeded random statements and programs for property suites and oracles.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{Atom, BinOp, ChoiceElement, CmpOp, Head, Literal, Program, Statement, Term};

/// Symbols the generator draws from.
#[derive(Debug, Clone)]
pub struct Alphabet {
    pub predicates: Vec<(&'static str, usize)>,
    pub variables: Vec<&'static str>,
    pub symbols: Vec<&'static str>,
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet {
            predicates: vec![("p", 1), ("q", 1), ("r", 2), ("s", 0), ("t", 3)],
            variables: vec!["X", "Y", "Z"],
            symbols: vec!["a", "b", "n"],
        }
    }
}

fn leaf(rng: &mut impl Rng, sig: &Alphabet, vars: bool) -> Term {
    match rng.gen_range(0..if vars { 5 } else { 3 }) {
        0 => Term::Int(rng.gen_range(-2..5)),
        1 => Term::Const(sig.symbols.choose(rng).expect("symbols").to_string()),
        2 => Term::Int(rng.gen_range(0..3)),
        _ => Term::Var(sig.variables.choose(rng).expect("variables").to_string()),
    }
}

fn term(rng: &mut impl Rng, sig: &Alphabet, depth: usize, vars: bool) -> Term {
    if depth == 0 || rng.gen_bool(0.7) {
        return leaf(rng, sig, vars);
    }
    if rng.gen_bool(0.15) {
        return Term::Abs(Box::new(term(rng, sig, depth - 1, vars)));
    }
    let op = *BinOp::ALL.choose(rng).expect("ops");
    Term::binop(op, term(rng, sig, depth - 1, vars), term(rng, sig, depth - 1, vars))
}

/// Argument term: occasionally `_`, an interval or a pool.
fn arg(rng: &mut impl Rng, sig: &Alphabet, anon: bool) -> Term {
    match rng.gen_range(0..20) {
        0 if anon => Term::Anon,
        1 => Term::Interval(Box::new(Term::Int(rng.gen_range(0..3))), Box::new(leaf(rng, sig, false))),
        2 => Term::Pool(vec![leaf(rng, sig, false), leaf(rng, sig, false)]),
        _ => term(rng, sig, 2, true),
    }
}

fn pred_atom(rng: &mut impl Rng, sig: &Alphabet, anon: bool) -> Atom {
    let (name, arity) = *sig.predicates.choose(rng).expect("predicates");
    Atom::pred(name, (0..arity).map(|_| arg(rng, sig, anon)).collect())
}

fn literal(rng: &mut impl Rng, sig: &Alphabet) -> Literal {
    if rng.gen_bool(0.2) {
        let op = *CmpOp::ALL.choose(rng).expect("ops");
        return Literal::pos(Atom::cmp(op, term(rng, sig, 2, true), term(rng, sig, 2, true)));
    }
    let atom = pred_atom(rng, sig, true);
    Literal { classical: rng.gen_bool(0.1), negated: rng.gen_bool(0.3), atom }
}

fn body(rng: &mut impl Rng, sig: &Alphabet, min: usize) -> Vec<Literal> {
    (0..rng.gen_range(min..=3)).map(|_| literal(rng, sig)).collect()
}

/// A random statement of the supported language. It is syntactically valid
/// but not necessarily safe.
pub fn random_statement(rng: &mut impl Rng, sig: &Alphabet) -> Statement {
    match rng.gen_range(0..4) {
        0 => Statement::new(Head::Atom(pred_atom(rng, sig, false)), Vec::new()),
        1 => Statement::new(Head::Atom(pred_atom(rng, sig, false)), body(rng, sig, 1)),
        2 => Statement::new(Head::None, body(rng, sig, 1)),
        _ => {
            let elements = (0..rng.gen_range(1..=2))
                .map(|_| ChoiceElement {
                    atom: pred_atom(rng, sig, false),
                    condition: (0..rng.gen_range(0..=2)).map(|_| literal(rng, sig)).collect(),
                })
                .collect();
            let bound = |rng: &mut _| rng_bool(rng).then(|| leaf(rng, sig, false));
            let (lower, upper) = (bound(rng), bound(rng));
            Statement::new(Head::Choice { lower, elements, upper }, body(rng, sig, 0))
        }
    }
}

fn rng_bool(rng: &mut impl Rng) -> bool {
    rng.gen_bool(0.5)
}

/// `lines` random statements; predicates keep one arity by construction.
pub fn random_program(rng: &mut impl Rng, sig: &Alphabet, lines: usize) -> Program {
    Program::new((0..lines).map(|_| random_statement(rng, sig)).collect(), Default::default())
        .expect("signature has one arity per name")
}

/// A small propositional program over `atoms`: facts, normal rules, choice
/// rules and constraints. Every such program grounds, and it has at most
/// 2^|atoms| answer sets.
pub fn random_ground_program(rng: &mut impl Rng, atoms: &[&str], lines: usize) -> Program {
    let atom = |rng: &mut _| Atom::pred(*atoms.choose(rng).expect("atoms"), Vec::new());
    let lit = |rng: &mut _| Literal { atom: atom(rng), negated: rng_bool(rng), classical: false };
    let statements = (0..lines)
        .map(|_| match rng.gen_range(0..10) {
            0 => Statement::new(Head::Atom(atom(rng)), Vec::new()),
            1..=3 => {
                let n = rng.gen_range(1..=2);
                Statement::new(Head::Atom(atom(rng)), (0..n).map(|_| lit(rng)).collect())
            }
            4..=6 => {
                let n = rng.gen_range(1..=atoms.len().min(3));
                let mut picked: Vec<&str> = atoms.choose_multiple(rng, n).copied().collect();
                picked.sort_unstable();
                let elements =
                    picked.into_iter().map(|a| ChoiceElement { atom: Atom::pred(a, Vec::new()), condition: Vec::new() }).collect();
                let upper = rng.gen_bool(0.3).then(|| Term::Int(1));
                let body = if rng.gen_bool(0.3) { vec![lit(rng)] } else { Vec::new() };
                Statement::new(Head::Choice { lower: None, elements, upper }, body)
            }
            _ => {
                let n = rng.gen_range(1..=2);
                Statement::new(Head::None, (0..n).map(|_| lit(rng)).collect())
            }
        })
        .collect();
    Program::new(statements, Default::default()).expect("all atoms have arity 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_programs_print_and_parse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_program(&mut rng, &Alphabet::default(), 4);
            assert_eq!(parse(&p.to_string()).unwrap(), p, "{p}");
            let g = random_ground_program(&mut rng, &["a", "b", "c"], 5);
            assert_eq!(parse(&g.to_string()).unwrap(), g);
        }
    }
}

use super::ast::*;

/// Canonical representative of a statement's equivalence class.
///
/// A choice lower bound of `0` is dropped, operands of `+`, `*`, `=` and `!=`
/// are put in ascending order, and body literals (and choice conditions) are
/// sorted. The order is the derived `Ord` on the syntax tree.
pub fn normalize(statement: &Statement) -> Statement {
    let head = match &statement.head {
        Head::None => Head::None,
        Head::Atom(a) => Head::Atom(normalize_atom(a)),
        Head::Choice { lower, elements, upper } => Head::Choice {
            lower: lower.as_ref().map(normalize_term).filter(|t| *t != Term::Int(0)),
            elements: elements
                .iter()
                .map(|e| ChoiceElement { atom: normalize_atom(&e.atom), condition: normalize_literals(&e.condition) })
                .collect(),
            upper: upper.as_ref().map(normalize_term),
        },
    };
    Statement { head, body: normalize_literals(&statement.body), line: statement.line, span: statement.span }
}

fn normalize_literals(literals: &[Literal]) -> Vec<Literal> {
    let mut out: Vec<Literal> = literals
        .iter()
        .map(|l| Literal { atom: normalize_atom(&l.atom), negated: l.negated, classical: l.classical })
        .collect();
    out.sort();
    out
}

pub fn normalize_atom(atom: &Atom) -> Atom {
    match atom {
        Atom::Pred { name, args } => Atom::Pred { name: name.clone(), args: args.iter().map(normalize_term).collect() },
        Atom::Cmp { op, left, right } => {
            let (mut l, mut r) = (normalize_term(left), normalize_term(right));
            if op.is_commutative() && r < l {
                std::mem::swap(&mut l, &mut r);
            }
            Atom::Cmp { op: *op, left: l, right: r }
        }
    }
}

pub fn normalize_term(term: &Term) -> Term {
    match term {
        Term::Int(_) | Term::Const(_) | Term::Var(_) | Term::Anon => term.clone(),
        Term::BinOp(op, l, r) => {
            let (mut l, mut r) = (normalize_term(l), normalize_term(r));
            if op.is_commutative() && r < l {
                std::mem::swap(&mut l, &mut r);
            }
            Term::binop(*op, l, r)
        }
        Term::Abs(t) => Term::Abs(Box::new(normalize_term(t))),
        Term::Interval(l, h) => Term::Interval(Box::new(normalize_term(l)), Box::new(normalize_term(h))),
        Term::Pool(ts) => Term::Pool(ts.iter().map(normalize_term).collect()),
    }
}

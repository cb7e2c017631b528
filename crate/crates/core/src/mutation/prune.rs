//! Rules that discard candidate statements before they are verified.

use std::collections::BTreeSet;

use crate::syntax::{normalize, BinOp, Head, Literal, Statement, Term};

/// Why a candidate statement was discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PruneRule {
    /// `t + 0`, `t * 1`, `t * 0` or the mirrored forms.
    NeutralElement,
    /// Comparison head, empty constraint body, or integer bounds with
    /// lower > upper.
    InvalidHead,
    DuplicateLiteral,
    /// A fresh variable used once and outside any choice condition.
    LoneFreshVariable,
}

/// First rule `statement` violates, if any. Commutative symmetry is handled
/// separately by deduplicating on the normalized form.
pub fn violation(statement: &Statement, fresh: &[String]) -> Option<PruneRule> {
    if head_invalid(statement) {
        return Some(PruneRule::InvalidHead);
    }
    let mut neutral = false;
    for a in statement.atoms() {
        for t in a.terms() {
            neutral |= has_neutral(t);
        }
    }
    if let Head::Choice { lower, upper, .. } = &statement.head {
        neutral |= lower.iter().chain(upper.iter()).any(has_neutral);
    }
    if neutral {
        return Some(PruneRule::NeutralElement);
    }
    let normalized = normalize(statement);
    if has_duplicates(&normalized.body) {
        return Some(PruneRule::DuplicateLiteral);
    }
    if let Head::Choice { elements, .. } = &normalized.head {
        if elements.iter().any(|e| has_duplicates(&e.condition)) {
            return Some(PruneRule::DuplicateLiteral);
        }
    }
    if !fresh.is_empty() && lone_fresh(statement, fresh) {
        return Some(PruneRule::LoneFreshVariable);
    }
    None
}

pub fn head_invalid(statement: &Statement) -> bool {
    match &statement.head {
        Head::None => statement.body.is_empty(),
        Head::Atom(a) => a.signature().is_none(),
        Head::Choice { lower: Some(Term::Int(l)), upper: Some(Term::Int(u)), .. } => l > u,
        Head::Choice { .. } => false,
    }
}

fn has_neutral(t: &Term) -> bool {
    match t {
        Term::BinOp(op, l, r) => {
            let absorbing = match op {
                BinOp::Add => [&**l, &**r].contains(&&Term::Int(0)),
                BinOp::Mul => [&**l, &**r].iter().any(|x| matches!(x, Term::Int(0 | 1))),
                BinOp::Sub | BinOp::Div => false,
            };
            absorbing || has_neutral(l) || has_neutral(r)
        }
        Term::Abs(x) => has_neutral(x),
        Term::Interval(l, r) => has_neutral(l) || has_neutral(r),
        Term::Pool(ts) => ts.iter().any(has_neutral),
        _ => false,
    }
}

fn has_duplicates(sorted: &[Literal]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

fn lone_fresh(statement: &Statement, fresh: &[String]) -> bool {
    let mut counts = vec![0usize; fresh.len()];
    statement.visit_vars(&mut |v| {
        if let Some(i) = fresh.iter().position(|f| f == v) {
            counts[i] += 1;
        }
    });
    let mut in_condition = BTreeSet::new();
    if let Head::Choice { elements, .. } = &statement.head {
        for l in elements.iter().flat_map(|e| &e.condition) {
            l.atom.visit_vars(&mut |v| {
                in_condition.insert(v.to_owned());
            });
        }
    }
    fresh.iter().zip(&counts).any(|(f, &c)| c == 1 && !in_condition.contains(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_statement;

    fn rule(src: &str) -> Option<PruneRule> {
        violation(&parse_statement(src).unwrap(), &["V1".to_owned()])
    }

    #[test]
    fn rules() {
        assert_eq!(rule("p(X+0) :- q(X)."), Some(PruneRule::NeutralElement));
        assert_eq!(rule("p(X) :- q(X), X*1 > 2."), Some(PruneRule::NeutralElement));
        assert_eq!(rule("p(X) :- q(X), X-0 > 2."), None);
        assert_eq!(rule("3 { p(X) : q(X) } 2."), Some(PruneRule::InvalidHead));
        assert_eq!(rule("p(X) :- q(X), q(X)."), Some(PruneRule::DuplicateLiteral));
        assert_eq!(rule(":- q(V1)."), Some(PruneRule::LoneFreshVariable));
        assert_eq!(rule(":- q(V1), r(V1)."), None);
        assert_eq!(rule(":- q(X), not r(X)."), None);
    }
}

//! Line matching: anonymized node bags paired by minimum-cost assignment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::min_cost_assignment;
use crate::syntax::{normalize, Atom, BinOp, CmpOp, Head, Literal, Program, Statement, Term};
use crate::verify::InstanceSpec;

/// Default upper bound on the bag distance of a suspicious line.
pub const DEFAULT_THRESHOLD: u32 = 3;

/// Multiset of anonymized AST node labels of one statement.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeBag(BTreeMap<String, u32>);

impl NodeBag {
    pub fn count(&self, label: &str) -> u32 {
        self.0.get(label).copied().unwrap_or(0)
    }

    pub fn size(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn add(&mut self, label: impl Into<String>) {
        *self.0.entry(label.into()).or_default() += 1;
    }
}

pub(crate) fn binop_label(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "add",
        BinOp::Sub => "sub",
        BinOp::Mul => "mul",
        BinOp::Div => "div",
    }
}

pub(crate) fn cmp_label(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "cmp-eq",
        CmpOp::Neq => "cmp-neq",
        CmpOp::Lt => "cmp-lt",
        CmpOp::Le => "cmp-le",
        CmpOp::Gt => "cmp-gt",
        CmpOp::Ge => "cmp-ge",
    }
}

fn term_nodes(t: &Term, bag: &mut NodeBag) {
    match t {
        Term::Int(0) => bag.add("int-0"),
        Term::Int(1) => bag.add("int-1"),
        Term::Int(_) => bag.add("int-const"),
        Term::Const(_) => bag.add("sym-const"),
        Term::Var(_) => bag.add("var"),
        Term::Anon => bag.add("anon"),
        Term::BinOp(op, l, r) => {
            bag.add(binop_label(*op));
            term_nodes(l, bag);
            term_nodes(r, bag);
        }
        Term::Abs(x) => {
            bag.add("abs");
            term_nodes(x, bag);
        }
        Term::Interval(l, h) => {
            bag.add("interval");
            term_nodes(l, bag);
            term_nodes(h, bag);
        }
        Term::Pool(ts) => {
            bag.add("pool");
            ts.iter().for_each(|x| term_nodes(x, bag));
        }
    }
}

fn atom_nodes(a: &Atom, bag: &mut NodeBag) {
    match a {
        Atom::Pred { args, .. } => {
            bag.add(format!("pred/{}", args.len()));
            args.iter().for_each(|t| term_nodes(t, bag));
        }
        Atom::Cmp { op, left, right } => {
            bag.add(cmp_label(*op));
            term_nodes(left, bag);
            term_nodes(right, bag);
        }
    }
}

fn literal_nodes(l: &Literal, bag: &mut NodeBag) {
    if l.negated {
        bag.add("not");
    }
    if l.classical {
        bag.add("classical-neg");
    }
    atom_nodes(&l.atom, bag);
}

/// Bag of the normalized statement. Names of predicates, variables and
/// symbolic constants are dropped; predicates keep their arity.
pub fn anonymize(statement: &Statement) -> NodeBag {
    let s = normalize(statement);
    let mut bag = NodeBag::default();
    bag.add("stmt");
    match &s.head {
        Head::None => bag.add("empty-head"),
        Head::Atom(a) => atom_nodes(a, &mut bag),
        Head::Choice { lower, elements, upper } => {
            bag.add("choice");
            if let Some(t) = lower {
                term_nodes(t, &mut bag);
            }
            for e in elements {
                atom_nodes(&e.atom, &mut bag);
                e.condition.iter().for_each(|l| literal_nodes(l, &mut bag));
            }
            if let Some(t) = upper {
                term_nodes(t, &mut bag);
            }
        }
    }
    s.body.iter().for_each(|l| literal_nodes(l, &mut bag));
    bag
}

/// Size of the multiset symmetric difference.
pub fn bag_distance(a: &NodeBag, b: &NodeBag) -> u32 {
    let mut d = 0;
    for (label, &ca) in &a.0 {
        d += ca.abs_diff(b.count(label));
    }
    for (label, &cb) in &b.0 {
        if !a.0.contains_key(label) {
            d += cb;
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    /// `None` is a dummy line standing for an insertion.
    pub submission: Option<usize>,
    /// `None` is a dummy line standing for a deletion.
    pub reference: Option<usize>,
    pub cost: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineMatching {
    /// Submission lines first (in line order), then reference lines left
    /// without a real partner.
    pub pairs: Vec<MatchedPair>,
    pub total_cost: u32,
    /// Submission lines paired with a real line at cost in `1..=threshold`.
    pub suspicious: Vec<usize>,
}

impl LineMatching {
    pub fn partner(&self, submission_line: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.submission == Some(submission_line)).and_then(|p| p.reference)
    }

    /// Reference lines with no submission counterpart.
    pub fn unmatched_reference(&self) -> Vec<usize> {
        self.pairs.iter().filter(|p| p.submission.is_none()).filter_map(|p| p.reference).collect()
    }
}

/// Minimum-cost perfect matching between the lines of two programs, both
/// padded with dummy lines to a common size. A line paired with a dummy costs
/// its full bag size.
pub fn match_lines(submission: &Program, model: &Program, threshold: u32) -> LineMatching {
    let sub: Vec<NodeBag> = submission.statements().iter().map(anonymize).collect();
    let refs: Vec<NodeBag> = model.statements().iter().map(anonymize).collect();
    let n = sub.len().max(refs.len());
    let cost = |i: usize, j: usize| -> u32 {
        match (sub.get(i), refs.get(j)) {
            (Some(a), Some(b)) => bag_distance(a, b),
            (Some(a), None) => a.size(),
            (None, Some(b)) => b.size(),
            (None, None) => 0,
        }
    };
    let matrix: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(cost(i, j))).collect()).collect();
    let assignment = min_cost_assignment(&matrix);

    let mut pairs = Vec::with_capacity(n);
    let mut suspicious = Vec::new();
    for (i, &j) in assignment.columns.iter().enumerate() {
        let pair = MatchedPair {
            submission: (i < sub.len()).then_some(i),
            reference: (j < refs.len()).then_some(j),
            cost: cost(i, j),
        };
        if pair.submission.is_none() && pair.reference.is_none() {
            continue;
        }
        if let (Some(s), Some(_)) = (pair.submission, pair.reference) {
            if (1..=threshold).contains(&pair.cost) {
                suspicious.push(s);
            }
        }
        pairs.push(pair);
    }
    pairs.sort_by_key(|p| (p.submission.is_none(), p.submission, p.reference));
    LineMatching { pairs, total_cost: assignment.cost as u32, suspicious }
}

/// The correct implementation closest to the submission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelChoice {
    /// `None` is the reference, `Some(i)` the i-th pool entry.
    pub pool_index: Option<usize>,
    pub distance: u32,
}

impl ModelChoice {
    pub fn program<'a>(&self, spec: &'a InstanceSpec) -> &'a Program {
        match self.pool_index {
            None => &spec.reference,
            Some(i) => &spec.correct_pool[i],
        }
    }
}

/// Argmin of the matching cost over the reference and the correct pool; ties
/// go to the reference, then to the earlier pool entry.
pub fn choose_model(submission: &Program, spec: &InstanceSpec) -> ModelChoice {
    let mut best = ModelChoice {
        pool_index: None,
        distance: match_lines(submission, &spec.reference, DEFAULT_THRESHOLD).total_cost,
    };
    for (i, p) in spec.correct_pool.iter().enumerate() {
        let d = match_lines(submission, p, DEFAULT_THRESHOLD).total_cost;
        if d < best.distance {
            best = ModelChoice { pool_index: Some(i), distance: d };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_statement};

    fn bag(src: &str) -> NodeBag {
        anonymize(&parse_statement(src).unwrap())
    }

    #[test]
    fn fig4_statement_bag() {
        let b = bag(":- sel(X), not sel(Y), e(X,Y).");
        assert_eq!(b.size(), 10);
        assert_eq!((b.count("stmt"), b.count("empty-head"), b.count("pred/1"), b.count("pred/2")), (1, 1, 2, 1));
        assert_eq!((b.count("not"), b.count("var")), (1, 4));
    }

    #[test]
    fn small_bags() {
        assert_eq!(bag("a.").size(), 2);
        let b = bag("v(X) :- e(X,_).");
        assert_eq!(b.size(), 6);
        assert_eq!(b.count("anon"), 1);
    }

    #[test]
    fn distances() {
        assert_eq!(bag_distance(&bag(":- sel(X), not sel(Y), e(X,Y)."), &bag(":- not sel(X), not sel(Y), e(X,Y).")), 1);
        assert_eq!(bag_distance(&bag("a."), &bag("b.")), 0);
        assert_eq!(bag_distance(&bag("0 { a } 1."), &bag("{ a } 1.")), 0);
    }

    #[test]
    fn intro_choice_line_is_suspicious() {
        let sub = parse("v(X) :- e(X,_).\nv(X) :- e(_,X).\nk { sel(X) : v(X) } k.\n:- not sel(X), not sel(Y), e(X,Y).\n").unwrap();
        let reference = parse("v(X) :- e(X,_).\nv(X) :- e(_,X).\n{ sel(X) : v(X) } k.\n:- not sel(X), not sel(Y), e(X,Y).\n").unwrap();
        let m = match_lines(&sub, &reference, DEFAULT_THRESHOLD);
        assert_eq!(m.suspicious, vec![2]);
        assert_eq!(m.total_cost, 1);
        let same = match_lines(&reference, &reference, DEFAULT_THRESHOLD);
        assert_eq!((same.total_cost, same.suspicious.len()), (0, 0));
    }

    #[test]
    fn dummy_lines_cost_their_size() {
        let sub = parse("a.\n").unwrap();
        let reference = parse("a.\n:- b.\n").unwrap();
        let m = match_lines(&sub, &reference, DEFAULT_THRESHOLD);
        assert_eq!(m.total_cost, 3);
        assert_eq!(m.unmatched_reference(), vec![1]);
        assert_eq!(m.pairs.len(), 2);
    }
}

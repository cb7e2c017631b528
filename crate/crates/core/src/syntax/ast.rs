use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ParseError;

/// Arithmetic operators allowed inside terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub const ALL: [BinOp; 4] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Mul)
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Built-in comparison operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Neq, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Neq)
    }
}

/// A (possibly non-ground) term.
///
/// The derived `Ord` compares the variant tag first and then the payload, which
/// is the fixed total order used by normalization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    Const(String),
    Var(String),
    Anon,
    BinOp(BinOp, Box<Term>, Box<Term>),
    Abs(Box<Term>),
    Interval(Box<Term>, Box<Term>),
    Pool(Vec<Term>),
}

impl Term {
    pub fn int(value: i64) -> Self {
        Term::Int(value)
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn binop(op: BinOp, left: Term, right: Term) -> Self {
        Term::BinOp(op, Box::new(left), Box::new(right))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Term::Int(_) | Term::Const(_) | Term::Var(_) | Term::Anon)
    }

    /// Depth of the term tree; leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Int(_) | Term::Const(_) | Term::Var(_) | Term::Anon => 0,
            Term::BinOp(_, l, r) | Term::Interval(l, r) => 1 + l.depth().max(r.depth()),
            Term::Abs(t) => 1 + t.depth(),
            Term::Pool(ts) => 1 + ts.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Whether the term contains an interval, a pool or `_` anywhere.
    pub fn has_argument_only_parts(&self) -> bool {
        match self {
            Term::Anon | Term::Interval(..) | Term::Pool(_) => true,
            Term::Int(_) | Term::Const(_) | Term::Var(_) => false,
            Term::BinOp(_, l, r) => l.has_argument_only_parts() || r.has_argument_only_parts(),
            Term::Abs(t) => t.has_argument_only_parts(),
        }
    }

    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Term::Var(v) => f(v),
            Term::Int(_) | Term::Const(_) | Term::Anon => {}
            Term::BinOp(_, l, r) | Term::Interval(l, r) => {
                l.visit_vars(f);
                r.visit_vars(f);
            }
            Term::Abs(t) => t.visit_vars(f),
            Term::Pool(ts) => ts.iter().for_each(|t| t.visit_vars(f)),
        }
    }

    pub fn visit_leaves<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Term::Int(_) | Term::Const(_) | Term::Var(_) | Term::Anon => f(self),
            Term::BinOp(_, l, r) | Term::Interval(l, r) => {
                l.visit_leaves(f);
                r.visit_leaves(f);
            }
            Term::Abs(t) => t.visit_leaves(f),
            Term::Pool(ts) => ts.iter().for_each(|t| t.visit_leaves(f)),
        }
    }
}

/// A predicate atom or a built-in comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Pred { name: String, args: Vec<Term> },
    Cmp { op: CmpOp, left: Term, right: Term },
}

impl Atom {
    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Self {
        Atom::Pred { name: name.into(), args }
    }

    pub fn cmp(op: CmpOp, left: Term, right: Term) -> Self {
        Atom::Cmp { op, left, right }
    }

    pub fn signature(&self) -> Option<Signature> {
        match self {
            Atom::Pred { name, args } => Some(Signature::new(name.clone(), args.len())),
            Atom::Cmp { .. } => None,
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Pred { args, .. } => args.iter().collect(),
            Atom::Cmp { left, right, .. } => vec![left, right],
        }
    }

    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        for t in self.terms() {
            t.visit_vars(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    /// `not a`
    pub negated: bool,
    /// `-a`; never set on comparisons.
    pub classical: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, negated: false, classical: false }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, negated: true, classical: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChoiceElement {
    pub atom: Atom,
    pub condition: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    /// Integrity constraint.
    None,
    Atom(Atom),
    Choice {
        lower: Option<Term>,
        elements: Vec<ChoiceElement>,
        upper: Option<Term>,
    },
}

/// Byte range of a statement in its source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// One rule, fact, choice rule or integrity constraint.
///
/// Equality is structural: the source span is ignored so that a statement
/// compares equal to its re-parsed canonical print.
#[derive(Debug, Clone)]
pub struct Statement {
    pub head: Head,
    pub body: Vec<Literal>,
    pub line: usize,
    pub span: Span,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.line == other.line && self.head == other.head && self.body == other.body
    }
}

impl Eq for Statement {}

/// Serializes as the canonical one-line text.
impl Serialize for Statement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Statement {
    pub fn new(head: Head, body: Vec<Literal>) -> Self {
        Statement { head, body, line: 0, span: Span::default() }
    }

    pub fn is_constraint(&self) -> bool {
        matches!(self.head, Head::None)
    }

    pub fn is_fact(&self) -> bool {
        matches!(self.head, Head::Atom(_)) && self.body.is_empty()
    }

    /// Head and body only, for comparisons that should ignore position.
    pub fn same_rule(&self, other: &Statement) -> bool {
        self.head == other.head && self.body == other.body
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        match &self.head {
            Head::None => {}
            Head::Atom(a) => out.push(a),
            Head::Choice { elements, .. } => {
                for e in elements {
                    out.push(&e.atom);
                    out.extend(e.condition.iter().map(|l| &l.atom));
                }
            }
        }
        out.extend(self.body.iter().map(|l| &l.atom));
        out
    }

    pub fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        if let Head::Choice { lower, upper, .. } = &self.head {
            lower.iter().chain(upper.iter()).for_each(|t| t.visit_vars(f));
        }
        for a in self.atoms() {
            a.visit_vars(f);
        }
    }

    /// Distinct variable names in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        });
        out
    }

    pub fn signatures(&self) -> Vec<Signature> {
        self.atoms().into_iter().filter_map(Atom::signature).collect()
    }

    /// Every leaf term in the statement, including choice bounds.
    pub fn leaves(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        if let Head::Choice { lower, upper, .. } = &self.head {
            lower.iter().chain(upper.iter()).for_each(|t| t.visit_leaves(&mut |l| out.push(l)));
        }
        for a in self.atoms() {
            for t in a.terms() {
                t.visit_leaves(&mut |l| out.push(l));
            }
        }
        out
    }
}

/// Predicate name and arity, written `name/arity`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub name: String,
    pub arity: usize,
}

impl Signature {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Signature { name: name.into(), arity }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid predicate signature `{0}` (expected name/arity)")]
pub struct SignatureParseError(pub String);

impl FromStr for Signature {
    type Err = SignatureParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arity) = s.trim().rsplit_once('/').ok_or_else(|| SignatureParseError(s.to_string()))?;
        let name = name.trim();
        let valid_name = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let arity = arity.trim().parse().map_err(|_| SignatureParseError(s.to_string()))?;
        if !valid_name {
            return Err(SignatureParseError(s.to_string()));
        }
        Ok(Signature::new(name, arity))
    }
}

impl Serialize for Signature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A parsed program: statements in source order plus `#const` directives.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    statements: Vec<Statement>,
    consts: BTreeMap<String, i64>,
    signatures: BTreeMap<String, usize>,
}

impl Program {
    /// Builds a program, renumbering line indices to `0..n` and checking that
    /// every predicate is used with a single arity.
    pub fn new(statements: Vec<Statement>, consts: BTreeMap<String, i64>) -> Result<Self, ParseError> {
        let mut statements = statements;
        for (i, s) in statements.iter_mut().enumerate() {
            s.line = i;
        }
        let signatures = collect_signatures(&statements)?;
        Ok(Program { statements, consts, signatures })
    }

    pub fn empty() -> Self {
        Program::default()
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn statement(&self, line: usize) -> Option<&Statement> {
        self.statements.get(line)
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn consts(&self) -> &BTreeMap<String, i64> {
        &self.consts
    }

    pub fn signatures(&self) -> &BTreeMap<String, usize> {
        &self.signatures
    }

    pub fn signature_set(&self) -> Vec<Signature> {
        self.signatures.iter().map(|(n, a)| Signature::new(n.clone(), *a)).collect()
    }

    pub fn into_statements(self) -> Vec<Statement> {
        self.statements
    }

    /// Symbolic constants and integers appearing anywhere in the program.
    pub fn constants(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        for s in &self.statements {
            for leaf in s.leaves() {
                if matches!(leaf, Term::Int(_) | Term::Const(_)) && !out.contains(leaf) {
                    out.push(leaf.clone());
                }
            }
        }
        out
    }
}

fn collect_signatures(statements: &[Statement]) -> Result<BTreeMap<String, usize>, ParseError> {
    let mut seen: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for s in statements {
        for sig in s.signatures() {
            let arities = seen.entry(sig.name).or_default();
            if !arities.contains(&sig.arity) {
                arities.push(sig.arity);
            }
        }
    }
    let mut out = BTreeMap::new();
    for (name, arities) in seen {
        if arities.len() > 1 {
            return Err(ParseError::ArityMismatch { predicate: name, arities });
        }
        out.insert(name, arities[0]);
    }
    Ok(out)
}

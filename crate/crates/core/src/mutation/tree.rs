//! Statement trees over the repair DSL and their one-edit neighbourhoods.

use std::fmt;

use crate::syntax::{Atom, BinOp, ChoiceElement, CmpOp, Head, Literal, Statement, Term};

use super::Vocabulary;

/// Label of one tree node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Head of an integrity constraint.
    Empty,
    /// Choice head; children are lower bound, elements, upper bound.
    Choice,
    /// Absent optional choice bound.
    NoBound,
    /// Choice element; children are the atom and its condition literals.
    Element,
    Pred(String, usize),
    Not,
    ClassicalNot,
    Cmp(CmpOp),
    Int(i64),
    Const(String),
    Var(String),
    Anon,
    BinOp(BinOp),
    Abs,
    Interval,
    Pool,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Empty => f.write_str("empty"),
            Label::Choice => f.write_str("choice"),
            Label::NoBound => f.write_str("no-bound"),
            Label::Element => f.write_str("element"),
            Label::Pred(n, a) => write!(f, "{n}/{a}"),
            Label::Not => f.write_str("not"),
            Label::ClassicalNot => f.write_str("-"),
            Label::Cmp(op) => f.write_str(op.symbol()),
            Label::Int(v) => write!(f, "{v}"),
            Label::Const(c) | Label::Var(c) => f.write_str(c),
            Label::Anon => f.write_str("_"),
            Label::BinOp(op) => f.write_str(op.symbol()),
            Label::Abs => f.write_str("abs"),
            Label::Interval => f.write_str(".."),
            Label::Pool => f.write_str("pool"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub label: Label,
    pub children: Vec<Node>,
}

impl Node {
    fn leaf(label: Label) -> Self {
        Node { label, children: Vec::new() }
    }

    fn new(label: Label, children: Vec<Node>) -> Self {
        Node { label, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Node::size).sum::<usize>()
    }

    fn preorder<'a>(&'a self, out: &mut Vec<&'a Node>) {
        out.push(self);
        self.children.iter().for_each(|c| c.preorder(out));
    }
}

/// Syntactic position of a node, which fixes the labels it may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Head,
    BodyLiteral,
    ConditionLiteral,
    Atom,
    Term,
    ArgTerm,
    Bound,
    Element,
}

/// One statement as a tree. Nodes are numbered in preorder, head subtree
/// first, then each body literal left to right; the statement root itself
/// carries no number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MutationTree {
    pub head: Node,
    pub body: Vec<Node>,
    /// Line of the statement this tree was built from.
    pub line: usize,
}

impl MutationTree {
    pub fn encode(statement: &Statement) -> Self {
        let head = match &statement.head {
            Head::None => Node::leaf(Label::Empty),
            Head::Atom(a) => encode_atom(a),
            Head::Choice { lower, elements, upper } => {
                let mut children = vec![encode_bound(lower.as_ref())];
                for e in elements {
                    let mut ec = vec![encode_atom(&e.atom)];
                    ec.extend(e.condition.iter().map(encode_literal));
                    children.push(Node::new(Label::Element, ec));
                }
                children.push(encode_bound(upper.as_ref()));
                Node::new(Label::Choice, children)
            }
        };
        MutationTree { head, body: statement.body.iter().map(encode_literal).collect(), line: statement.line }
    }

    pub fn decode(&self) -> Statement {
        let head = match self.head.label {
            Label::Empty => Head::None,
            Label::Choice => {
                let n = self.head.children.len();
                let elements = self.head.children[1..n - 1]
                    .iter()
                    .map(|e| ChoiceElement {
                        atom: decode_atom(&e.children[0]),
                        condition: e.children[1..].iter().map(decode_literal).collect(),
                    })
                    .collect();
                Head::Choice {
                    lower: decode_bound(&self.head.children[0]),
                    elements,
                    upper: decode_bound(&self.head.children[n - 1]),
                }
            }
            _ => Head::Atom(decode_atom(&self.head)),
        };
        let mut s = Statement::new(head, self.body.iter().map(decode_literal).collect());
        s.line = self.line;
        s
    }

    /// Nodes in preorder.
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        self.head.preorder(&mut out);
        self.body.iter().for_each(|b| b.preorder(&mut out));
        out
    }

    pub fn size(&self) -> usize {
        self.head.size() + self.body.iter().map(Node::size).sum::<usize>()
    }

    /// Slot of every node, in preorder.
    pub fn slots(&self) -> Vec<Slot> {
        fn walk(n: &Node, slot: Slot, out: &mut Vec<Slot>) {
            out.push(slot);
            for (i, c) in n.children.iter().enumerate() {
                walk(c, child_slot(n, i, slot), out);
            }
        }
        let mut out = Vec::new();
        walk(&self.head, Slot::Head, &mut out);
        self.body.iter().for_each(|b| walk(b, Slot::BodyLiteral, &mut out));
        out
    }

    /// Copy with node `index` (preorder) relabelled, children kept.
    pub fn with_label(&self, index: usize, label: Label) -> MutationTree {
        fn walk(n: &mut Node, counter: &mut usize, index: usize, label: &Label) -> bool {
            if *counter == index {
                n.label = label.clone();
                return true;
            }
            *counter += 1;
            n.children.iter_mut().any(|c| walk(c, counter, index, label))
        }
        let mut t = self.clone();
        let mut counter = 0;
        if !walk(&mut t.head, &mut counter, index, &label) {
            for b in &mut t.body {
                if walk(b, &mut counter, index, &label) {
                    break;
                }
            }
        }
        t
    }
}

fn child_slot(parent: &Node, index: usize, parent_slot: Slot) -> Slot {
    match &parent.label {
        Label::Pred(..) => Slot::ArgTerm,
        Label::Not | Label::ClassicalNot => Slot::Atom,
        Label::Choice if index == 0 || index == parent.children.len() - 1 => Slot::Bound,
        Label::Choice => Slot::Element,
        Label::Element if index == 0 => Slot::Atom,
        Label::Element => Slot::ConditionLiteral,
        // Bounds stay bounds all the way down: only ground leaves there.
        _ if parent_slot == Slot::Bound => Slot::Bound,
        _ => Slot::Term,
    }
}

fn encode_bound(t: Option<&Term>) -> Node {
    t.map(encode_term).unwrap_or_else(|| Node::leaf(Label::NoBound))
}

fn decode_bound(n: &Node) -> Option<Term> {
    (n.label != Label::NoBound).then(|| decode_term(n))
}

fn encode_term(t: &Term) -> Node {
    match t {
        Term::Int(v) => Node::leaf(Label::Int(*v)),
        Term::Const(c) => Node::leaf(Label::Const(c.clone())),
        Term::Var(v) => Node::leaf(Label::Var(v.clone())),
        Term::Anon => Node::leaf(Label::Anon),
        Term::BinOp(op, l, r) => Node::new(Label::BinOp(*op), vec![encode_term(l), encode_term(r)]),
        Term::Abs(x) => Node::new(Label::Abs, vec![encode_term(x)]),
        Term::Interval(l, h) => Node::new(Label::Interval, vec![encode_term(l), encode_term(h)]),
        Term::Pool(ts) => Node::new(Label::Pool, ts.iter().map(encode_term).collect()),
    }
}

fn decode_term(n: &Node) -> Term {
    let c = |i: usize| Box::new(decode_term(&n.children[i]));
    match &n.label {
        Label::Int(v) => Term::Int(*v),
        Label::Const(s) => Term::Const(s.clone()),
        Label::Var(s) => Term::Var(s.clone()),
        Label::Anon => Term::Anon,
        Label::BinOp(op) => Term::BinOp(*op, c(0), c(1)),
        Label::Abs => Term::Abs(c(0)),
        Label::Interval => Term::Interval(c(0), c(1)),
        Label::Pool => Term::Pool(n.children.iter().map(decode_term).collect()),
        other => unreachable!("{other:?} is not a term label"),
    }
}

fn encode_atom(a: &Atom) -> Node {
    match a {
        Atom::Pred { name, args } => Node::new(Label::Pred(name.clone(), args.len()), args.iter().map(encode_term).collect()),
        Atom::Cmp { op, left, right } => Node::new(Label::Cmp(*op), vec![encode_term(left), encode_term(right)]),
    }
}

fn decode_atom(n: &Node) -> Atom {
    match &n.label {
        Label::Pred(name, _) => Atom::Pred { name: name.clone(), args: n.children.iter().map(decode_term).collect() },
        Label::Cmp(op) => Atom::Cmp { op: *op, left: decode_term(&n.children[0]), right: decode_term(&n.children[1]) },
        other => unreachable!("{other:?} is not an atom label"),
    }
}

fn encode_literal(l: &Literal) -> Node {
    let mut n = encode_atom(&l.atom);
    if l.classical {
        n = Node::new(Label::ClassicalNot, vec![n]);
    }
    if l.negated {
        n = Node::new(Label::Not, vec![n]);
    }
    n
}

fn decode_literal(n: &Node) -> Literal {
    match n.label {
        Label::Not => Literal { negated: true, ..decode_literal(&n.children[0]) },
        Label::ClassicalNot => Literal { classical: true, ..decode_literal(&n.children[0]) },
        _ => Literal::pos(decode_atom(n)),
    }
}

/// Maximum depth a grown term may reach.
pub const TERM_DEPTH_CAP: usize = 2;

fn is_leaf_term(l: &Label) -> bool {
    matches!(l, Label::Int(_) | Label::Const(_) | Label::Var(_) | Label::Anon)
}

/// Leaf labels allowed in `slot`.
pub fn leaf_labels(slot: Slot, vocab: &Vocabulary) -> Vec<Label> {
    let mut out: Vec<Label> = Vec::new();
    if matches!(slot, Slot::Term | Slot::ArgTerm) {
        out.extend(vocab.all_variables().map(|v| Label::Var(v.to_owned())));
    }
    out.extend(vocab.constants.iter().map(|c| match c {
        Term::Int(v) => Label::Int(*v),
        Term::Const(s) => Label::Const(s.clone()),
        _ => unreachable!("vocabulary constants are ints or symbols"),
    }));
    if slot == Slot::ArgTerm {
        out.push(Label::Anon);
    }
    out
}

/// Every statement one edit away, with the edit's cost.
pub(crate) fn neighbours(tree: &MutationTree, vocab: &Vocabulary) -> Vec<(u32, MutationTree)> {
    let mut out = Vec::new();
    let mut head_variants = Vec::new();
    node_neighbours(&tree.head, Slot::Head, 1, vocab, &mut head_variants);
    for (c, h) in head_variants {
        out.push((c, MutationTree { head: h, body: tree.body.clone(), line: tree.line }));
    }
    for (i, b) in tree.body.iter().enumerate() {
        let mut variants = Vec::new();
        node_neighbours(b, Slot::BodyLiteral, 1, vocab, &mut variants);
        for (c, v) in variants {
            let mut body = tree.body.clone();
            body[i] = v;
            out.push((c, MutationTree { head: tree.head.clone(), body, line: tree.line }));
        }
        // Dropping a literal; a constraint keeps at least one.
        if tree.body.len() > 1 || tree.head.label != Label::Empty {
            let mut body = tree.body.clone();
            body.remove(i);
            out.push((1, MutationTree { head: tree.head.clone(), body, line: tree.line }));
        }
    }
    for (c, lit) in new_literals(vocab, true) {
        let mut body = tree.body.clone();
        body.push(lit);
        out.push((c, MutationTree { head: tree.head.clone(), body, line: tree.line }));
    }
    out
}

/// Literals that can be added, with their node counts.
pub(crate) fn new_literals(vocab: &Vocabulary, allow_not: bool) -> Vec<(u32, Node)> {
    let vars: Vec<Label> = vocab.all_variables().map(|v| Label::Var(v.to_owned())).collect();
    let mut out = Vec::new();
    for (name, arity) in &vocab.predicates {
        for args in tuples(&vars, *arity) {
            let atom = Node::new(Label::Pred(name.clone(), *arity), args.into_iter().map(Node::leaf).collect());
            let cost = atom.size() as u32;
            if allow_not {
                out.push((cost + 1, Node::new(Label::Not, vec![atom.clone()])));
            }
            out.push((cost, atom));
        }
    }
    let operands: Vec<Label> = vars.iter().cloned().chain(leaf_labels(Slot::Bound, vocab)).collect();
    for op in CmpOp::ALL {
        for l in &vars {
            for r in &operands {
                if l != r {
                    out.push((3, Node::new(Label::Cmp(op), vec![Node::leaf(l.clone()), Node::leaf(r.clone())])));
                }
            }
        }
    }
    out
}

fn tuples(items: &[Label], n: usize) -> Vec<Vec<Label>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// One-edit variants of the subtree `n` standing in `slot`; `depth` is the
/// term nesting depth of `n` (1 at the top of a term slot).
fn node_neighbours(n: &Node, slot: Slot, depth: usize, vocab: &Vocabulary, out: &mut Vec<(u32, Node)>) {
    let relabel = |label: Label| Node { label, children: n.children.clone() };
    match (&n.label, slot) {
        (Label::Empty, Slot::Head) => {
            for (name, _) in vocab.predicates.iter().filter(|(_, a)| *a == 0) {
                out.push((1, Node::leaf(Label::Pred(name.clone(), 0))));
            }
        }
        (Label::Pred(name, arity), _) => {
            for (other, _) in vocab.predicates.iter().filter(|(o, a)| a == arity && o != name) {
                out.push((1, relabel(Label::Pred(other.clone(), *arity))));
            }
            match slot {
                Slot::Head => out.push((1, Node::leaf(Label::Empty))),
                Slot::BodyLiteral | Slot::ConditionLiteral => {
                    out.push((1, Node::new(Label::Not, vec![n.clone()])));
                    out.push((1, Node::new(Label::ClassicalNot, vec![n.clone()])));
                }
                _ => {}
            }
        }
        (Label::Not | Label::ClassicalNot, _) => out.push((1, n.children[0].clone())),
        (Label::Cmp(op), _) => {
            for other in CmpOp::ALL.into_iter().filter(|o| o != op) {
                out.push((1, relabel(Label::Cmp(other))));
            }
        }
        (Label::BinOp(op), _) => {
            for other in BinOp::ALL.into_iter().filter(|o| o != op) {
                out.push((1, relabel(Label::BinOp(other))));
            }
            out.extend(n.children.iter().map(|c| (1, c.clone())));
        }
        (Label::Abs, _) => out.push((1, n.children[0].clone())),
        (Label::NoBound, Slot::Bound) => {
            out.extend(leaf_labels(Slot::Bound, vocab).into_iter().map(|l| (1, Node::leaf(l))));
        }
        (l, _) if is_leaf_term(l) => {
            // Dropping a bound first, so it wins over its normalization twin
            // `0 { ... }`.
            if slot == Slot::Bound && depth == 1 {
                out.push((1, Node::leaf(Label::NoBound)));
            }
            for other in leaf_labels(slot, vocab) {
                if &other != l {
                    out.push((1, Node::leaf(other)));
                }
            }
            if *l != Label::Anon && depth < TERM_DEPTH_CAP {
                out.push((1, Node::new(Label::Abs, vec![n.clone()])));
                let grow_slot = if slot == Slot::Bound { Slot::Bound } else { Slot::Term };
                for other in leaf_labels(grow_slot, vocab) {
                    for op in BinOp::ALL {
                        let fresh = Node::leaf(other.clone());
                        out.push((2, Node::new(Label::BinOp(op), vec![n.clone(), fresh.clone()])));
                        if !op.is_commutative() {
                            out.push((2, Node::new(Label::BinOp(op), vec![fresh, n.clone()])));
                        }
                    }
                }
            }
        }
        _ => {}
    }
    if n.label == Label::Choice {
        let k = n.children.len();
        if k > 3 {
            for i in 1..k - 1 {
                let mut c = n.children.clone();
                c.remove(i);
                out.push((1, Node::new(Label::Choice, c)));
            }
        }
    }
    if n.label == Label::Element {
        for i in 1..n.children.len() {
            let mut c = n.children.clone();
            c.remove(i);
            out.push((1, Node::new(Label::Element, c)));
        }
        for (cost, lit) in new_literals(vocab, true) {
            let mut c = n.children.clone();
            c.push(lit);
            out.push((cost, Node::new(Label::Element, c)));
        }
    }
    // Edits inside one child.
    for (i, child) in n.children.iter().enumerate() {
        let cslot = child_slot(n, i, slot);
        let cdepth = if matches!(cslot, Slot::Term | Slot::ArgTerm | Slot::Bound) && matches!(slot, Slot::Term | Slot::ArgTerm | Slot::Bound) {
            depth + 1
        } else {
            1
        };
        let mut variants = Vec::new();
        node_neighbours(child, cslot, cdepth, vocab, &mut variants);
        for (c, v) in variants {
            let mut children = n.children.clone();
            children[i] = v;
            out.push((c, Node { label: n.label.clone(), children }));
        }
    }
}

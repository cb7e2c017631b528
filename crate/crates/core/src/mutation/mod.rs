//! Mutation of suspicious statements.
//!
//! Each statement becomes a [`MutationTree`]; a candidate at distance `d`
//! relaxes `d` nodes of the trees (or adds `d` nodes in extension mode).
//! [`Enumerator`] yields candidates in non-decreasing distance.

mod enumerate;
mod prune;
mod tree;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::syntax::{ParseError, Program, Signature, Statement, Term};

pub use enumerate::{EnumerateOptions, Enumerator, StopReason, DEFAULT_BUDGET, DEFAULT_MAX_DISTANCE, MAX_LINES};
pub use prune::{head_invalid, violation, PruneRule};
pub use tree::{leaf_labels, Label, MutationTree, Node, Slot, TERM_DEPTH_CAP};

/// Number of fresh variables available to the enumerator.
pub const FRESH_VARIABLES: usize = 2;

/// Labels the enumerator may put into a relaxed node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub predicates: BTreeSet<(String, usize)>,
    /// Integers and symbolic constants, `0` and `1` always included.
    pub constants: Vec<Term>,
    /// Variables of the statements being mutated.
    pub variables: Vec<String>,
    /// Fresh variable names, unused anywhere in the submission.
    pub fresh: Vec<String>,
}

impl Vocabulary {
    /// Vocabulary for mutating lines `acs` of `submission`.
    pub fn new(submission: &Program, acs: &BTreeSet<usize>, solution: &BTreeSet<Signature>) -> Self {
        let mut vocab = Vocabulary {
            predicates: submission.signatures().iter().map(|(n, a)| (n.clone(), *a)).collect(),
            constants: vec![Term::Int(0), Term::Int(1)],
            variables: Vec::new(),
            fresh: Vec::new(),
        };
        for sig in solution {
            vocab.add_predicate(&sig.name, sig.arity);
        }
        for c in submission.constants() {
            vocab.add_constant(c);
        }
        for name in submission.consts().keys() {
            vocab.add_constant(Term::Const(name.clone()));
        }
        for s in submission.statements().iter().filter(|s| acs.contains(&s.line)) {
            for v in s.variables() {
                if !vocab.variables.contains(&v) {
                    vocab.variables.push(v);
                }
            }
        }
        let used: BTreeSet<String> = submission.statements().iter().flat_map(Statement::variables).collect();
        vocab.fresh = (1..).map(|i| format!("V{i}")).filter(|v| !used.contains(v)).take(FRESH_VARIABLES).collect();
        vocab
    }

    /// Adds a predicate unless its name is already known with another arity.
    pub fn add_predicate(&mut self, name: &str, arity: usize) {
        if !self.predicates.iter().any(|(n, _)| n == name) {
            self.predicates.insert((name.to_owned(), arity));
        }
    }

    pub fn add_constant(&mut self, c: Term) {
        debug_assert!(matches!(c, Term::Int(_) | Term::Const(_)));
        if !self.constants.contains(&c) {
            self.constants.push(c);
        }
    }

    /// Predicates and constants of `program`, e.g. a model program or the
    /// facts of a test case.
    pub fn extend_with(&mut self, program: &Program) {
        for (n, a) in program.signatures() {
            self.add_predicate(n, *a);
        }
        for c in program.constants() {
            self.add_constant(c);
        }
        for name in program.consts().keys() {
            self.add_constant(Term::Const(name.clone()));
        }
    }

    pub fn all_variables(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().chain(&self.fresh).map(String::as_str)
    }
}

/// A proposed edit of the submission.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairCandidate {
    /// Line index to replacement statement.
    pub replaced: BTreeMap<usize, Statement>,
    /// Statements appended after the last line.
    pub added: Vec<Statement>,
    pub removed: BTreeSet<usize>,
    pub distance: u32,
}

impl RepairCandidate {
    pub fn is_empty(&self) -> bool {
        self.replaced.is_empty() && self.added.is_empty() && self.removed.is_empty()
    }

    /// The submission with this edit applied. Fails only when the edit makes
    /// a predicate's arity inconsistent.
    pub fn apply(&self, program: &Program) -> Result<Program, ParseError> {
        let mut statements: Vec<Statement> = program
            .statements()
            .iter()
            .filter(|s| !self.removed.contains(&s.line))
            .map(|s| self.replaced.get(&s.line).cloned().unwrap_or_else(|| s.clone()))
            .collect();
        statements.extend(self.added.iter().cloned());
        Program::new(statements, program.consts().clone())
    }
}

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::syntax::{parse, Head, ParseError, Program, Signature};

/// Facts and `#const` directives describing one input instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    text: String,
    facts: Program,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("test case `{id}`: {source}")]
    TestParse { id: String, source: ParseError },
    #[error("test case `{id}` line {line}: only facts and #const directives are allowed")]
    NotFacts { id: String, line: usize },
    #[error("duplicate test case id `{0}`")]
    DuplicateTest(String),
    #[error("solution predicate {signature} has arity {actual} in the reference")]
    ArityMismatch { signature: Signature, actual: usize },
    #[error("{0}")]
    Reference(ParseError),
}

impl TestCase {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self, InstanceError> {
        let (id, text) = (id.into(), text.into());
        let facts = parse(&text).map_err(|source| InstanceError::TestParse { id: id.clone(), source })?;
        if let Some(s) = facts.statements().iter().find(|s| !(s.is_fact() && matches!(s.head, Head::Atom(_)))) {
            return Err(InstanceError::NotFacts { id, line: s.line });
        }
        Ok(TestCase { id, text, facts })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn facts(&self) -> &Program {
        &self.facts
    }
}

/// Everything needed to judge submissions for one exercise.
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub problem: String,
    pub reference: Program,
    pub solution_predicates: BTreeSet<Signature>,
    pub test_cases: Vec<TestCase>,
    pub correct_pool: Vec<Program>,
}

impl InstanceSpec {
    pub fn new(
        problem: impl Into<String>,
        reference: Program,
        solution_predicates: impl IntoIterator<Item = Signature>,
        test_cases: Vec<TestCase>,
    ) -> Result<Self, InstanceError> {
        let solution_predicates: BTreeSet<Signature> = solution_predicates.into_iter().collect();
        for sig in &solution_predicates {
            if let Some(&actual) = reference.signatures().get(&sig.name) {
                if actual != sig.arity {
                    return Err(InstanceError::ArityMismatch { signature: sig.clone(), actual });
                }
            }
        }
        let mut seen = BTreeSet::new();
        for t in &test_cases {
            if !seen.insert(t.id.as_str()) {
                return Err(InstanceError::DuplicateTest(t.id.clone()));
            }
        }
        Ok(InstanceSpec { problem: problem.into(), reference, solution_predicates, test_cases, correct_pool: Vec::new() })
    }

    pub fn with_correct_pool(mut self, pool: Vec<Program>) -> Self {
        self.correct_pool = pool;
        self
    }

    pub fn test(&self, id: &str) -> Option<&TestCase> {
        self.test_cases.iter().find(|t| t.id == id)
    }
}

/// Solver input for `program` on `test`. Constants defined by the test case
/// override the program's own defaults.
pub fn compose(program: &Program, test: &TestCase) -> String {
    compose_with(program.consts(), program.statements().iter().map(|s| s.to_string()), test)
}

pub(crate) fn compose_with(
    consts: &std::collections::BTreeMap<String, i64>,
    lines: impl IntoIterator<Item = String>,
    test: &TestCase,
) -> String {
    let mut merged = consts.clone();
    merged.extend(test.facts.consts().iter().map(|(k, v)| (k.clone(), *v)));
    let mut out = String::new();
    for (name, value) in &merged {
        let _ = writeln!(out, "#const {name} = {value}.");
    }
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    for s in test.facts.statements() {
        let _ = writeln!(out, "{s}");
    }
    out
}

/// Wire form used by instance files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCaseFile {
    pub id: String,
    pub facts: String,
}

impl From<&TestCase> for TestCaseFile {
    fn from(t: &TestCase) -> Self {
        TestCaseFile { id: t.id.clone(), facts: t.text.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_case_accepts_only_facts() {
        assert!(TestCase::new("t", "#const k=3. e(1,2). e(2,3).").is_ok());
        assert!(matches!(TestCase::new("t", "e(1,2). p(X) :- e(X,_)."), Err(InstanceError::NotFacts { line: 1, .. })));
        assert!(matches!(TestCase::new("t", "{ e(1,2) }."), Err(InstanceError::NotFacts { .. })));
    }

    #[test]
    fn test_consts_win() {
        let p = parse("#const k = 2.\np(k).").unwrap();
        let t = TestCase::new("t", "#const k=3. e(1,2).").unwrap();
        assert_eq!(compose(&p, &t), "#const k = 3.\np(k).\ne(1,2).\n");
    }
}

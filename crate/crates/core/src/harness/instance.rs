use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::syntax::{parse, ParseError, Program, Signature};
use crate::verify::{InstanceError, InstanceSpec, TestCase, TestCaseFile};

/// The YAML instance document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub problem: String,
    pub reference: String,
    pub solution_predicates: Vec<Signature>,
    pub test_cases: Vec<TestCaseFile>,
    #[serde(default)]
    pub correct_pool: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed instance document: {0}")]
    Yaml(#[from] serde_yaml::Error),
    #[error("reference: {0}")]
    Reference(ParseError),
    #[error("correct pool entry {index}: {source}")]
    Pool { index: usize, source: ParseError },
    #[error("solution predicate {0} does not occur in the reference")]
    UnknownSolutionPredicate(Signature),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        Ok(serde_yaml::from_str(text)?)
    }

    pub fn into_spec(self) -> Result<InstanceSpec, LoadError> {
        let reference = parse(&self.reference).map_err(LoadError::Reference)?;
        for sig in &self.solution_predicates {
            if !reference.signatures().contains_key(&sig.name) {
                return Err(LoadError::UnknownSolutionPredicate(sig.clone()));
            }
        }
        let tests = self
            .test_cases
            .into_iter()
            .map(|t| TestCase::new(t.id, t.facts))
            .collect::<Result<Vec<_>, _>>()?;
        let pool = self
            .correct_pool
            .iter()
            .enumerate()
            .map(|(index, text)| parse(text).map_err(|source| LoadError::Pool { index, source }))
            .collect::<Result<Vec<Program>, _>>()?;
        Ok(InstanceSpec::new(self.problem, reference, self.solution_predicates, tests)?.with_correct_pool(pool))
    }
}

pub fn load_instance(path: &Path) -> Result<InstanceSpec, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    InstanceFile::parse(&text)?.into_spec()
}

/// Instances shipped with the crate.
pub mod bundled {
    use super::*;

    pub const VERTEX_COVER: &str = include_str!("../../instances/vertex_cover.yaml");
    pub const GRAPH_COLORING: &str = include_str!("../../instances/graph_coloring.yaml");
    pub const SET_COVER: &str = include_str!("../../instances/set_cover.yaml");
    /// Vertex cover submission whose choice rule demands exactly `k` vertices.
    pub const VERTEX_COVER_BUGGY: &str = include_str!("../../instances/vertex_cover_buggy.lp");

    pub fn names() -> [&'static str; 3] {
        ["vertex-cover", "graph-coloring", "set-cover"]
    }

    pub fn load(name: &str) -> Option<InstanceSpec> {
        let text = match name {
            "vertex-cover" => VERTEX_COVER,
            "graph-coloring" => GRAPH_COLORING,
            "set-cover" => SET_COVER,
            _ => return None,
        };
        Some(InstanceFile::parse(text).and_then(InstanceFile::into_spec).expect("bundled instance is valid"))
    }

    pub fn vertex_cover() -> InstanceSpec {
        load("vertex-cover").expect("bundled")
    }

    pub fn vertex_cover_buggy() -> Program {
        parse(VERTEX_COVER_BUGGY).expect("bundled submission parses")
    }
}

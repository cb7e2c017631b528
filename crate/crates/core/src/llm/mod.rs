//! Client side of the fault-localization and repair language models.
//!
//! Both models are reached through an [`LlmBackend`]. Every failure is an
//! [`LlmError`] so callers can fall back to uniform scores or skip straight
//! to mutation repair.

mod backend;
mod prompt;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use backend::{HttpBackend, LlmBackend, MockBackend, ReplayBackend};
pub use prompt::{FlPrompt, LlmRequest, LlmResponse, RepairPrompt, Task};

use crate::syntax::{parse, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfig {
    pub enabled: bool,
    pub endpoint: Option<String>,
    pub model: String,
    #[serde(with = "secs")]
    pub timeout: Duration,
    /// Repair attempts in the feedback loop.
    pub iterations: u32,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            enabled: false,
            endpoint: None,
            model: "asp-repair".into(),
            timeout: Duration::from_secs(60),
            iterations: 3,
        }
    }
}

pub(crate) mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("language model disabled")]
    Disabled,
    #[error("language model unavailable: {0}")]
    Unavailable(String),
    #[error("language model timed out")]
    Timeout,
    #[error("malformed completion ({reason}): {raw:?}")]
    MalformedResponse { raw: String, reason: String },
}

/// Parsed fault-localization completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub scores: crate::LineScores,
    /// The completion scored fewer lines than the program has; the rest
    /// were filled with 0.
    pub padded: bool,
}

/// Parses `"s0 s1 … | missing=m"` for a program of `lines` lines.
pub fn parse_classification(raw: &str, lines: usize) -> Result<Classification, LlmError> {
    let malformed = |reason: &str| LlmError::MalformedResponse { raw: raw.to_owned(), reason: reason.to_owned() };
    let (scores_part, flag_part) = match raw.split_once('|') {
        Some((s, f)) => (s, Some(f.trim())),
        None => (raw, None),
    };
    let mut scores = scores_part
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| malformed("score is not a number")))
        .collect::<Result<Vec<f64>, _>>()?;
    let missing = match flag_part {
        None => false,
        Some(f) => match f.strip_prefix("missing=").map(str::trim) {
            Some("1" | "true") => true,
            Some("0" | "false") => false,
            _ => return Err(malformed("bad missing-lines flag")),
        },
    };
    let padded = scores.len() < lines;
    scores.resize(lines, 0.0);
    Ok(Classification { scores: crate::LineScores::new(scores, missing), padded })
}

/// Per-line fault scores for the prompt's incorrect program.
pub fn classify_faults(
    backend: &dyn LlmBackend,
    prompt: &FlPrompt,
    config: &LlmConfig,
) -> Result<Classification, LlmError> {
    if !config.enabled {
        return Err(LlmError::Disabled);
    }
    let completion = backend.complete(&LlmRequest::fault_localization(&config.model, prompt))?;
    parse_classification(&completion, prompt.incorrect_program.lines().count())
}

/// Statements of a repair completion. Markdown code fences are ignored.
pub fn parse_repair(raw: &str) -> Result<Vec<Statement>, LlmError> {
    let text: String = raw
        .lines()
        .filter(|l| !l.trim_start().starts_with("```"))
        .map(|l| format!("{l}\n"))
        .collect();
    parse(&text)
        .map(|p| p.into_statements())
        .map_err(|e| LlmError::MalformedResponse { raw: raw.to_owned(), reason: e.to_string() })
}

/// Replacement (and possibly additional) lines for the prompt's fault set.
pub fn propose_repair(
    backend: &dyn LlmBackend,
    prompt: &RepairPrompt,
    config: &LlmConfig,
) -> Result<Vec<Statement>, LlmError> {
    if !config.enabled {
        return Err(LlmError::Disabled);
    }
    parse_repair(&backend.complete(&LlmRequest::repair(&config.model, prompt))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_parsing() {
        let c = parse_classification("0.02 0.01 0.97 0.05 | missing=0", 4).unwrap();
        assert_eq!(c.scores.scores, vec![0.02, 0.01, 0.97, 0.05]);
        assert!(!c.scores.missing_lines && !c.padded);
        let c = parse_classification("0.9 | missing=1", 3).unwrap();
        assert_eq!(c.scores.scores, vec![0.9, 0.0, 0.0]);
        assert!(c.scores.missing_lines && c.padded);
        assert!(parse_classification("high low", 2).is_err());
    }

    #[test]
    fn repair_parsing() {
        assert_eq!(parse_repair("{ sel(X) : v(X) } k.").unwrap().len(), 1);
        assert_eq!(parse_repair("```\na.\nb.\n```").unwrap().len(), 2);
        assert!(matches!(parse_repair("not asp @@"), Err(LlmError::MalformedResponse { .. })));
    }

    #[test]
    fn disabled_config_short_circuits() {
        let p = FlPrompt { problem: "p".into(), reference_program: "a.".into(), incorrect_program: "b.".into() };
        assert_eq!(classify_faults(&MockBackend::new(), &p, &LlmConfig::default()), Err(LlmError::Disabled));
    }
}

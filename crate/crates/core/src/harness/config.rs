//! TOML run configuration with environment overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::inject::{InjectOptions, MutationKind};
use crate::fl::LocalizeOptions;
use crate::llm::LlmConfig;
use crate::repair::RepairOptions;
use crate::verify::VerifyOptions;

/// Overrides [`Config::solver`].
pub const ENV_SOLVER: &str = "ASPHINT_SOLVER";
/// Overrides [`LlmConfig::endpoint`] and enables the language model.
pub const ENV_LLM_ENDPOINT: &str = "ASPHINT_LLM_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InjectConfig {
    /// Mutation kinds drawn uniformly.
    pub kinds: Vec<MutationKind>,
}

impl Default for InjectConfig {
    fn default() -> Self {
        InjectConfig { kinds: MutationKind::ALL.to_vec() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Solver command line, e.g. `clingo` or `python3 -m clingo`.
    pub solver: Option<String>,
    pub verify: VerifyOptions,
    pub localize: LocalizeOptions,
    pub repair: RepairOptions,
    pub llm: LlmConfig,
    pub inject: InjectConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// The file at `path` (defaults when absent) with environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => Self::parse(
                &std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.display().to_string(), source })?,
            )?,
            None => Config::default(),
        };
        config.apply_env(|k| std::env::var(k).ok());
        Ok(config)
    }

    /// Applies overrides from `var`; empty values are ignored.
    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) {
        let var = |k| var(k).filter(|v: &String| !v.trim().is_empty());
        if let Some(s) = var(ENV_SOLVER) {
            self.solver = Some(s);
        }
        if let Some(e) = var(ENV_LLM_ENDPOINT) {
            self.llm.endpoint = Some(e);
            self.llm.enabled = true;
        }
    }

    /// Repair options whose feedback localization uses `self.localize`.
    pub fn repair_options(&self) -> RepairOptions {
        RepairOptions { localize: self.localize, ..self.repair }
    }

    pub fn inject_options(&self) -> InjectOptions {
        InjectOptions { kinds: self.inject.kinds.clone(), ..InjectOptions::default() }
    }
}

//! Instance files, synthetic bug injection, benchmarking and reports.

mod bench;
mod config;
mod generate;
mod inject;
mod instance;
mod report;

pub use bench::{label, run_bench, BenchEntry, BenchOptions, BenchReport, BenchSummary, CorpusEntry, FlLabel};
pub use config::{Config, ConfigError, InjectConfig, ENV_LLM_ENDPOINT, ENV_SOLVER};
pub use generate::{random_ground_program, random_program, random_statement, Alphabet};
pub use inject::{draw, inject_bugs, GroundTruth, InjectError, InjectOptions, MutationKind, SyntheticBug, MAX_RETRIES};
pub use instance::{bundled, load_instance, InstanceFile, LoadError};
pub use report::{run_pipeline, AcsEntry, FailingTest, LocalizationReport, RepairReport, Report, Stage, SCHEMA_VERSION};

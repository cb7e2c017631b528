//! Fault localization.

pub mod combine;
pub mod linematch;
mod localize;
pub mod msics;

pub use linematch::{anonymize, bag_distance, choose_model, match_lines, LineMatching, ModelChoice, NodeBag};
pub use msics::{msics_enumerate, relax, CorrectionSubset, MsicsError, MsicsOutcome, RelaxedProgram};
pub use combine::{combine, Provenance, MAX_ACS};
pub use localize::{localize, LlmSetup, Localization, LocalizeOptions};

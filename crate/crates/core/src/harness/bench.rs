//! Fault-localization benchmark over a corpus of synthetic bugs.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::inject::{GroundTruth, SyntheticBug};
use crate::fl::{localize, LlmSetup, LocalizeOptions};
use crate::repair::{repair_targets, RepairOptions, RepairStatus, RepairTargets};
use crate::verify::Verifier;

/// Outcome of one localization against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlLabel {
    /// All faulty lines and no others.
    Exact,
    /// All faulty lines and some correct ones.
    Superset,
    /// Some faulty lines but not all.
    Some,
    /// No line identified at all.
    NotIdentified,
    /// Only correct lines identified.
    WrongIdentification,
}

impl FlLabel {
    pub const ALL: [FlLabel; 5] =
        [FlLabel::Exact, FlLabel::Superset, FlLabel::Some, FlLabel::NotIdentified, FlLabel::WrongIdentification];

    /// Exact, Superset or Some.
    pub fn found_some(self) -> bool {
        matches!(self, FlLabel::Exact | FlLabel::Superset | FlLabel::Some)
    }
}

/// Labels `identified` lines against `truth`. An empty identified set is the
/// claim that lines are missing, which identifies a deleted line.
pub fn label(identified: &BTreeSet<usize>, truth: &GroundTruth) -> FlLabel {
    let faults = truth.lines.len() + usize::from(truth.missing_line);
    let hits = identified.intersection(&truth.lines).count() + usize::from(truth.missing_line && identified.is_empty());
    let extra = identified.difference(&truth.lines).count();
    match (hits, extra) {
        (0, _) if identified.is_empty() => FlLabel::NotIdentified,
        (0, _) => FlLabel::WrongIdentification,
        (h, 0) if h == faults => FlLabel::Exact,
        (h, _) if h == faults => FlLabel::Superset,
        _ => FlLabel::Some,
    }
}

#[derive(Debug, Clone, Default)]
pub struct BenchOptions {
    pub localize: LocalizeOptions,
    /// Also run the repair loop on every bug.
    pub repair: Option<RepairOptions>,
    /// Repair from the ground-truth lines instead of the localization.
    pub oracle_acs: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    pub index: usize,
    pub label: FlLabel,
    pub identified: BTreeSet<usize>,
    pub ground_truth: GroundTruth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repair: Option<RepairStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Every label, including those with zero instances.
    pub counts: BTreeMap<FlLabel, usize>,
    pub found_some: usize,
    pub repaired: usize,
    pub entries: Vec<BenchEntry>,
}

impl BenchReport {
    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn found_some_rate(&self) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            self.found_some as f64 / self.entries.len() as f64
        }
    }
}

/// One bug of a corpus file, tagged with the instance it breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub instance: String,
    #[serde(flatten)]
    pub bug: SyntheticBug,
}

/// Per-instance reports and their totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub schema_version: u32,
    pub total: usize,
    pub counts: BTreeMap<FlLabel, usize>,
    pub found_some: usize,
    pub repaired: usize,
    pub instances: BTreeMap<String, BenchReport>,
}

impl BenchSummary {
    pub fn merge(instances: BTreeMap<String, BenchReport>) -> Self {
        let mut counts: BTreeMap<FlLabel, usize> = FlLabel::ALL.iter().map(|l| (*l, 0)).collect();
        for r in instances.values() {
            for (l, n) in &r.counts {
                *counts.entry(*l).or_default() += n;
            }
        }
        BenchSummary {
            schema_version: super::report::SCHEMA_VERSION,
            total: instances.values().map(BenchReport::total).sum(),
            found_some: instances.values().map(|r| r.found_some).sum(),
            repaired: instances.values().map(|r| r.repaired).sum(),
            counts,
            instances,
        }
    }

    pub fn found_some_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.found_some as f64 / self.total as f64
        }
    }
}

/// Localizes (and optionally repairs) every bug concurrently.
pub fn run_bench(bugs: &[SyntheticBug], verifier: &Verifier, llm: LlmSetup<'_>, options: &BenchOptions) -> BenchReport {
    let spec = verifier.spec().clone();
    let entries: Vec<BenchEntry> = bugs
        .par_iter()
        .enumerate()
        .map(|(index, bug)| {
            let started = Instant::now();
            let fail = |error: String| BenchEntry {
                index,
                label: FlLabel::NotIdentified,
                identified: BTreeSet::new(),
                ground_truth: bug.ground_truth.clone(),
                repair: None,
                error: Some(error),
                seconds: started.elapsed().as_secs_f64(),
            };
            let verification = match verifier.verify(&bug.mutated) {
                Ok(v) => v,
                Err(e) => return fail(e.to_string()),
            };
            let loc = localize(&bug.mutated, &spec, &verification, &**verifier.backend(), llm, &options.localize);
            let identified = loc.acs.first().map(|a| a.lines.clone()).unwrap_or_default();
            let repair = options.repair.as_ref().map(|ro| {
                let mut targets = RepairTargets::from_localization(&loc, &spec);
                if options.oracle_acs {
                    targets.acs = vec![bug.ground_truth.lines.clone()];
                    targets.missing_lines = bug.ground_truth.missing_line;
                }
                repair_targets(&bug.mutated, verifier, &targets, llm, ro).status
            });
            BenchEntry {
                index,
                label: label(&identified, &bug.ground_truth),
                identified,
                ground_truth: bug.ground_truth.clone(),
                repair,
                error: None,
                seconds: started.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let mut counts: BTreeMap<FlLabel, usize> = FlLabel::ALL.iter().map(|l| (*l, 0)).collect();
    for e in &entries {
        *counts.entry(e.label).or_default() += 1;
    }
    BenchReport {
        found_some: entries.iter().filter(|e| e.label.found_some()).count(),
        repaired: entries.iter().filter(|e| e.repair == Some(RepairStatus::Repaired)).count(),
        counts,
        entries,
    }
}

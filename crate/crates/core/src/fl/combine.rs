//! Ranking of augmented correction subsets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::fl::CorrectionSubset;
use crate::num::Score;

/// Forwarded to repair at most.
pub const MAX_ACS: usize = 8;

/// Per-line fault scores in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Score + Serialize + serde::de::DeserializeOwned")]
pub struct LineScores<F> {
    pub scores: Vec<F>,
    pub missing_lines: bool,
}

impl<F: Score> LineScores<F> {
    /// Every line at one half, the fallback without a classifier.
    pub fn uniform(lines: usize) -> Self {
        let half = F::one() / (F::one() + F::one());
        LineScores { scores: vec![half; lines], missing_lines: false }
    }

    /// Values are clamped into `[0, 1]`; NaN becomes 0.
    pub fn new(scores: impl IntoIterator<Item = F>, missing_lines: bool) -> Self {
        let scores = scores
            .into_iter()
            .map(|s| if s.is_nan() { F::zero() } else { s.max(F::zero()).min(F::one()) })
            .collect();
        LineScores { scores, missing_lines }
    }

    pub fn score(&self, line: usize) -> F {
        self.scores.get(line).copied().unwrap_or_else(F::zero)
    }

    /// Lines scoring at least one half.
    pub fn faulty(&self) -> BTreeSet<usize> {
        let half = F::one() / (F::one() + F::one());
        self.scores.iter().enumerate().filter(|(_, s)| **s >= half).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Msics,
    Llm,
    Linematch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Score + Serialize + serde::de::DeserializeOwned")]
pub struct AugmentedCorrectionSubset<F> {
    pub lines: BTreeSet<usize>,
    pub score: F,
    pub provenance: BTreeSet<Provenance>,
}

impl<F: Score> AugmentedCorrectionSubset<F> {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Unions every MSICS (and the LLM fault set, treated like one) with the
/// line-matching suspects and ranks the results by summed line score, then
/// by size, then lexicographically. Falls back to the suspects alone, and
/// finally to a single empty subset.
pub fn combine<F: Score>(
    msics: &[CorrectionSubset],
    llm_fl: Option<&BTreeSet<usize>>,
    lm_suspicious: &BTreeSet<usize>,
    scores: &LineScores<F>,
) -> Vec<AugmentedCorrectionSubset<F>> {
    let mut pool: BTreeMap<BTreeSet<usize>, BTreeSet<Provenance>> = BTreeMap::new();
    let mut add = |lines: BTreeSet<usize>, tag: Provenance| {
        let tags = pool.entry(lines).or_default();
        tags.insert(tag);
        if !lm_suspicious.is_empty() {
            tags.insert(Provenance::Linematch);
        }
    };
    for m in msics {
        add(m.lines() | lm_suspicious, Provenance::Msics);
    }
    if let Some(llm) = llm_fl.filter(|l| !l.is_empty()) {
        add(llm | lm_suspicious, Provenance::Llm);
    }
    if pool.is_empty() {
        let provenance = if lm_suspicious.is_empty() { BTreeSet::new() } else { [Provenance::Linematch].into() };
        pool.insert(lm_suspicious.clone(), provenance);
    }
    let mut ranked: Vec<AugmentedCorrectionSubset<F>> = pool
        .into_iter()
        .map(|(lines, provenance)| {
            let score = lines.iter().fold(F::zero(), |acc, &l| acc + scores.score(l));
            AugmentedCorrectionSubset { lines, score, provenance }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.lines.len().cmp(&b.lines.len()))
            .then_with(|| a.lines.cmp(&b.lines))
    });
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(lines: &[usize]) -> CorrectionSubset {
        CorrectionSubset(lines.iter().copied().collect())
    }

    #[test]
    fn running_example() {
        let r = combine(&[cs(&[2])], None, &[2].into(), &LineScores::<f64>::uniform(4));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].lines, [2].into());
        assert_eq!(r[0].score, 0.5);
        assert_eq!(r[0].provenance, [Provenance::Msics, Provenance::Linematch].into());
    }

    #[test]
    fn nothing_means_extension_mode() {
        let r = combine::<f64>(&[], Some(&BTreeSet::new()), &BTreeSet::new(), &LineScores::uniform(3));
        assert_eq!(r.len(), 1);
        assert!(r[0].is_empty());
    }

    #[test]
    fn ranked_by_score() {
        let scores = LineScores::new([0.0, 0.9, 0.1, 0.8], false);
        let r = combine(&[cs(&[1]), cs(&[3])], None, &[2].into(), &scores);
        let got: Vec<(Vec<usize>, f64)> = r.iter().map(|a| (a.lines.iter().copied().collect(), a.score)).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].0, vec![1, 2]);
        assert!((got[0].1 - 1.0).abs() < 1e-12);
        assert_eq!(got[1].0, vec![2, 3]);
        assert!((got[1].1 - 0.9).abs() < 1e-12);
    }

    #[test]
    fn llm_set_merges_with_equal_msics() {
        let r = combine(&[cs(&[1])], Some(&[1].into()), &BTreeSet::new(), &LineScores::<f32>::uniform(2));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].provenance, [Provenance::Msics, Provenance::Llm].into());
    }

    #[test]
    fn scores_are_clamped() {
        let s = LineScores::new([-1.0f64, 2.0, f64::NAN], false);
        assert_eq!(s.scores, vec![0.0, 1.0, 0.0]);
    }
}

//! Minimal strongly inconsistent correction subsets.
//!
//! Every submission line is guarded by a selector atom `_sel(i)`; the test
//! case and a missing answer set are hard. A correction subset is a set of
//! lines whose selectors, when disabled, make the system satisfiable, and
//! none of whose proper subsets do.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::solver::{
    check_satisfiable, enumerate_answer_sets, AnswerSet, Backend, GroundTerm, Satisfiability, SolveRequest,
    SolveStatus, SolverError,
};
use crate::syntax::{Atom, Literal, Program, Signature, Statement, Term};
use crate::verify::{in_set_name, TestCase};

pub const SELECTOR: &str = "_sel";
/// Visible alias of the selectors; clingo hides `_`-prefixed atoms.
const SHOWN_SELECTOR: &str = "asphint_enabled";

/// Up to this many lines the whole satisfiable selector family is enumerated
/// in a single solver call; beyond it a level-wise search is used.
const ENUMERATION_LINE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardedLine {
    pub line: usize,
    pub selector: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxedProgram {
    pub guarded: Vec<GuardedLine>,
    /// Constants, test facts and the forced answer set.
    pub hard: String,
}

impl RelaxedProgram {
    /// Solver input with exactly the lines outside `disabled` enabled.
    pub fn with_disabled(&self, disabled: &BTreeSet<usize>) -> String {
        let mut text = self.base();
        for g in &self.guarded {
            if !disabled.contains(&g.line) {
                let _ = writeln!(text, "{}.", g.selector);
            }
        }
        text
    }

    fn base(&self) -> String {
        let mut text = self.hard.clone();
        for g in &self.guarded {
            text.push_str(&g.text);
            text.push('\n');
        }
        text
    }
}

/// Line indices of one correction subset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorrectionSubset(pub BTreeSet<usize>);

impl CorrectionSubset {
    pub fn lines(&self) -> &BTreeSet<usize> {
        &self.0
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MsicsError {
    #[error("reserved predicate `{0}` occurs in the program")]
    NameCollision(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("relaxed program does not ground: {0}")]
    Grounding(String),
}

fn selector_atom(line: usize) -> Atom {
    Atom::pred(SELECTOR, vec![Term::int(line as i64)])
}

/// Guards each line with its selector and makes the test case and `forced`
/// (projected on `solution`) hard: the forced atoms become facts and any
/// other solution atom is forbidden.
pub fn relax(
    submission: &Program,
    test: &TestCase,
    forced: &AnswerSet,
    solution: &BTreeSet<Signature>,
) -> Result<RelaxedProgram, MsicsError> {
    let reserved = |name: &str| name == SELECTOR || name == SHOWN_SELECTOR || name.starts_with("_in_");
    for source in [submission, test.facts()] {
        if let Some(name) = source.signatures().keys().find(|n| reserved(n)) {
            return Err(MsicsError::NameCollision(name.clone()));
        }
    }
    let guarded = submission
        .statements()
        .iter()
        .map(|s| {
            let mut body = s.body.clone();
            body.push(Literal::pos(selector_atom(s.line)));
            GuardedLine {
                line: s.line,
                selector: selector_atom(s.line).to_string(),
                text: Statement::new(s.head.clone(), body).to_string(),
            }
        })
        .collect();
    let mut hard = crate::verify::compose_with(submission.consts(), std::iter::empty(), test);
    for a in forced.atoms() {
        let _ = writeln!(hard, "{a}.");
        let mut aux = a.clone();
        aux.name = in_set_name(&a.name, a.classical);
        aux.classical = false;
        let _ = writeln!(hard, "{aux}.");
    }
    for sig in solution {
        let vars: Vec<String> = (1..=sig.arity).map(|i| format!("X{i}")).collect();
        let args = if vars.is_empty() { String::new() } else { format!("({})", vars.join(",")) };
        let _ = writeln!(hard, ":- {}{args}, not {}{args}.", sig.name, in_set_name(&sig.name, false));
        let _ = writeln!(hard, ":- -{}{args}, not {}{args}.", sig.name, in_set_name(&sig.name, true));
    }
    Ok(RelaxedProgram { guarded, hard })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsicsOutcome {
    /// Smallest first, then lexicographic.
    pub subsets: Vec<CorrectionSubset>,
    /// The time budget ran out before the search finished.
    pub partial: bool,
}

/// Minimal correction subsets of `relaxed`, at most `limit` of them
/// (`None` = all). An already satisfiable system yields no subsets.
pub fn msics_enumerate(
    backend: &dyn Backend,
    relaxed: &RelaxedProgram,
    limit: Option<usize>,
    timeout: Duration,
) -> Result<MsicsOutcome, MsicsError> {
    let deadline = Instant::now() + timeout;
    let n = relaxed.guarded.len();
    match sat(backend, &relaxed.with_disabled(&BTreeSet::new()), deadline)? {
        Some(true) => return Ok(MsicsOutcome { subsets: Vec::new(), partial: false }),
        Some(false) => {}
        None => return Ok(MsicsOutcome { subsets: Vec::new(), partial: true }),
    }
    let (mut subsets, partial) = if n <= ENUMERATION_LINE_LIMIT {
        by_enumeration(backend, relaxed, deadline)?
    } else {
        level_wise(backend, relaxed, limit, deadline)?
    };
    subsets.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    if let Some(l) = limit {
        subsets.truncate(l);
    }
    Ok(MsicsOutcome { subsets, partial })
}

fn remaining(deadline: Instant) -> Option<Duration> {
    deadline.checked_duration_since(Instant::now()).filter(|d| !d.is_zero())
}

/// `None` when undecided within the deadline.
fn sat(backend: &dyn Backend, program: &str, deadline: Instant) -> Result<Option<bool>, MsicsError> {
    let Some(left) = remaining(deadline) else { return Ok(None) };
    match check_satisfiable(backend, program, left) {
        Ok(Satisfiability::Sat) => Ok(Some(true)),
        Ok(Satisfiability::Unsat) => Ok(Some(false)),
        Ok(Satisfiability::Timeout) => Ok(None),
        Err(SolverError::Backend(msg)) => Err(MsicsError::Grounding(msg)),
        Err(e) => Err(e.into()),
    }
}

/// One call enumerating every satisfiable selector assignment; the minimal
/// complements are the answer. Needed because the family is not monotone.
fn by_enumeration(
    backend: &dyn Backend,
    relaxed: &RelaxedProgram,
    deadline: Instant,
) -> Result<(Vec<CorrectionSubset>, bool), MsicsError> {
    let Some(left) = remaining(deadline) else { return Ok((Vec::new(), true)) };
    let mut text = relaxed.base();
    let choices: Vec<String> = relaxed.guarded.iter().map(|g| g.selector.clone()).collect();
    let _ = writeln!(text, "{{ {} }}.", choices.join("; "));
    let _ = writeln!(text, "#show {SHOWN_SELECTOR}(X) : {SELECTOR}(X).");
    let request = SolveRequest::new(text).project([Signature::new(SHOWN_SELECTOR, 1)]).timeout(left);
    let result = enumerate_answer_sets(backend, &request)?;
    if result.status == SolveStatus::SolverError {
        return Err(MsicsError::Grounding(result.stderr.unwrap_or_default()));
    }
    let all: BTreeSet<usize> = relaxed.guarded.iter().map(|g| g.line).collect();
    let family: Vec<BTreeSet<usize>> = result
        .answer_sets
        .iter()
        .map(|m| {
            let enabled: BTreeSet<usize> = m
                .atoms()
                .iter()
                .filter_map(|a| match a.args.first() {
                    Some(GroundTerm::Int(i)) => usize::try_from(*i).ok(),
                    _ => None,
                })
                .collect();
            all.difference(&enabled).copied().collect()
        })
        .collect();
    let minimal = family
        .iter()
        .filter(|d| !family.iter().any(|o| o.len() < d.len() && o.is_subset(d)))
        .map(|d| CorrectionSubset(d.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok((minimal, result.status == SolveStatus::Timeout))
}

/// Candidate sets by increasing size, skipping supersets of found subsets.
fn level_wise(
    backend: &dyn Backend,
    relaxed: &RelaxedProgram,
    limit: Option<usize>,
    deadline: Instant,
) -> Result<(Vec<CorrectionSubset>, bool), MsicsError> {
    let lines: Vec<usize> = relaxed.guarded.iter().map(|g| g.line).collect();
    let mut found: Vec<BTreeSet<usize>> = Vec::new();
    for k in 1..=lines.len() {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let candidate: BTreeSet<usize> = combo.iter().map(|&i| lines[i]).collect();
            if !found.iter().any(|f| f.is_subset(&candidate)) {
                match sat(backend, &relaxed.with_disabled(&candidate), deadline)? {
                    Some(true) => {
                        found.push(candidate);
                        if limit.is_some_and(|l| found.len() >= l) {
                            return Ok((found.into_iter().map(CorrectionSubset).collect(), false));
                        }
                    }
                    Some(false) => {}
                    None => return Ok((found.into_iter().map(CorrectionSubset).collect(), true)),
                }
            }
            if !next_combination(&mut combo, lines.len()) {
                break;
            }
        }
    }
    Ok((found.into_iter().map(CorrectionSubset).collect(), false))
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

//! Iterative-deepening enumeration of repair candidates.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::time::Instant;

use crate::syntax::{normalize, Statement};

use super::tree::{new_literals, neighbours, Label, MutationTree, Node};
use super::{prune, RepairCandidate, Vocabulary};

pub const DEFAULT_MAX_DISTANCE: u32 = 4;
pub const DEFAULT_BUDGET: usize = 50_000;
/// Most statements changed by one candidate.
pub const MAX_LINES: usize = 2;

#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    pub max_distance: u32,
    /// Most candidates yielded.
    pub budget: usize,
    pub deadline: Option<Instant>,
    /// Off only for testing the pruning rules themselves.
    pub prune: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { max_distance: DEFAULT_MAX_DISTANCE, budget: DEFAULT_BUDGET, deadline: None, prune: true }
    }
}

/// Why a stream ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Every candidate up to the maximum distance was yielded.
    Exhausted,
    Budget,
    Deadline,
}

struct Entry {
    statement: Statement,
    tree: MutationTree,
    /// False for statements kept only as stepping stones (pruned ones).
    yieldable: bool,
}

/// Distinct variants of one statement, grouped by edit distance.
struct Layers {
    layers: Vec<Vec<Entry>>,
    /// Printed statements already placed in a layer.
    seen: HashSet<String>,
    /// Dedup keys already yielded or reserved by the original.
    yielded: HashSet<String>,
    prune: bool,
}

impl Layers {
    fn new(tree: MutationTree, prune: bool) -> Self {
        let statement = tree.decode();
        let seen = HashSet::from([statement.to_string()]);
        let yielded = HashSet::from([key(&statement, prune)]);
        Layers { layers: vec![vec![Entry { statement, tree, yieldable: true }]], seen, yielded, prune }
    }

    /// Builds layers up to `d`. A layer is cut after `cap` entries.
    fn ensure(&mut self, d: usize, vocab: &Vocabulary, cap: usize, deadline: Option<Instant>) -> Result<(), StopReason> {
        while self.layers.len() <= d {
            let target = self.layers.len();
            let mut next = Vec::new();
            'fill: for cost in 1..=target {
                for parent in &self.layers[target - cost] {
                    if deadline.is_some_and(|t| Instant::now() >= t) {
                        self.layers.push(next);
                        return Err(StopReason::Deadline);
                    }
                    for (c, tree) in neighbours(&parent.tree, vocab) {
                        if c as usize != cost {
                            continue;
                        }
                        let statement = tree.decode();
                        if !self.seen.insert(statement.to_string()) {
                            continue;
                        }
                        // A normalization twin is not yielded again but is still
                        // expanded: `0 { a }` reaches `|0| { a }`, `{ a }` does not.
                        let fresh_key = self.yielded.insert(key(&statement, self.prune));
                        let yieldable = fresh_key
                            && (!self.prune || prune::violation(&statement, &vocab.fresh).is_none())
                            && !prune::head_invalid(&statement);
                        next.push(Entry { statement, tree, yieldable });
                        if next.len() >= cap {
                            break 'fill;
                        }
                    }
                }
            }
            self.layers.push(next);
        }
        Ok(())
    }

    fn yieldable(&self, d: usize) -> impl Iterator<Item = &Statement> {
        self.layers.get(d).into_iter().flatten().filter(|e| e.yieldable).map(|e| &e.statement)
    }
}

/// Dedup key: the normalized print when pruning (commutative symmetry and
/// literal order), the plain print otherwise.
fn key(s: &Statement, prune: bool) -> String {
    if prune {
        normalize(s).to_string()
    } else {
        s.to_string()
    }
}

/// Lazy stream of candidates in non-decreasing distance.
pub struct Enumerator {
    vocab: Vocabulary,
    options: EnumerateOptions,
    lines: Vec<usize>,
    layers: Vec<Layers>,
    /// Extension mode: statements to seed new lines from.
    templates: Vec<Layers>,
    extension_seen: HashSet<String>,
    queue: VecDeque<RepairCandidate>,
    distance: u32,
    produced: usize,
    stop: Option<StopReason>,
}

impl Enumerator {
    /// Mutates `statements` (the ACS lines of a submission).
    pub fn new(statements: &[Statement], vocab: Vocabulary, options: EnumerateOptions) -> Self {
        let layers = statements.iter().map(|s| Layers::new(MutationTree::encode(s), options.prune)).collect();
        Enumerator {
            lines: statements.iter().map(|s| s.line).collect(),
            layers,
            templates: Vec::new(),
            extension_seen: HashSet::new(),
            vocab,
            options,
            queue: VecDeque::new(),
            distance: 0,
            produced: 0,
            stop: None,
        }
    }

    /// Extension mode: candidates add one or two statements. Each template
    /// costs one node plus its relaxations; fresh statements cost their node
    /// count. `existing` lines are never re-added.
    pub fn extension(templates: &[Statement], existing: &[Statement], vocab: Vocabulary, options: EnumerateOptions) -> Self {
        let mut e = Enumerator::new(&[], vocab, options);
        e.extension_seen = existing.iter().map(|s| normalize(s).to_string()).collect();
        let mut template_keys = HashSet::new();
        for t in templates {
            if !e.extension_seen.contains(&normalize(t).to_string()) && template_keys.insert(normalize(t).to_string()) {
                e.templates.push(Layers::new(MutationTree::encode(t), e.options.prune));
            }
        }
        e
    }

    /// Set once the stream has ended.
    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop
    }

    pub fn produced(&self) -> usize {
        self.produced
    }

    fn room(&self) -> usize {
        self.options.budget.saturating_sub(self.produced + self.queue.len())
    }

    fn fill(&mut self, d: u32) -> Result<(), StopReason> {
        if self.lines.is_empty() {
            return self.fill_extension(d);
        }
        let du = d as usize;
        let (cap, deadline) = (self.options.budget.max(1), self.options.deadline);
        if d == 1 {
            for &line in &self.lines {
                self.queue.push_back(RepairCandidate {
                    replaced: BTreeMap::new(),
                    added: Vec::new(),
                    removed: BTreeSet::from([line]),
                    distance: 1,
                });
            }
        }
        for i in 0..self.layers.len() {
            self.layers[i].ensure(du, &self.vocab, cap, deadline)?;
            let line = self.lines[i];
            let room = self.room();
            let batch: Vec<_> = self.layers[i]
                .yieldable(du)
                .take(room)
                .map(|s| RepairCandidate {
                    replaced: BTreeMap::from([(line, with_line(s, line))]),
                    added: Vec::new(),
                    removed: BTreeSet::new(),
                    distance: d,
                })
                .collect();
            self.queue.extend(batch);
        }
        if MAX_LINES >= 2 {
            for i in 0..self.layers.len() {
                for j in i + 1..self.layers.len() {
                    for d1 in 1..du {
                        let d2 = du - d1;
                        self.layers[i].ensure(d1, &self.vocab, cap, deadline)?;
                        self.layers[j].ensure(d2, &self.vocab, cap, deadline)?;
                        let (li, lj) = (self.lines[i], self.lines[j]);
                        for a in self.layers[i].yieldable(d1) {
                            for b in self.layers[j].yieldable(d2) {
                                if self.options.budget <= self.produced + self.queue.len() {
                                    return Ok(());
                                }
                                self.queue.push_back(RepairCandidate {
                                    replaced: BTreeMap::from([(li, with_line(a, li)), (lj, with_line(b, lj))]),
                                    added: Vec::new(),
                                    removed: BTreeSet::new(),
                                    distance: d,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn fill_extension(&mut self, d: u32) -> Result<(), StopReason> {
        let du = d as usize;
        let (cap, deadline) = (self.options.budget.max(1), self.options.deadline);
        let mut found: Vec<Vec<Statement>> = Vec::new();
        for t in 0..self.templates.len() {
            self.templates[t].ensure(du - 1, &self.vocab, cap, deadline)?;
            found.extend(self.templates[t].yieldable(du - 1).map(|s| vec![s.clone()]));
        }
        // Two templates cost one node each plus their relaxations.
        if du >= 2 {
            for i in 0..self.templates.len() {
                for j in i + 1..self.templates.len() {
                    for a in 0..=du - 2 {
                        let b = du - 2 - a;
                        self.templates[i].ensure(a, &self.vocab, cap, deadline)?;
                        self.templates[j].ensure(b, &self.vocab, cap, deadline)?;
                        for x in self.templates[i].yieldable(a) {
                            for y in self.templates[j].yieldable(b) {
                                found.push(vec![x.clone(), y.clone()]);
                                if found.len() >= self.room() {
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
        found.extend(fresh_statements(du, &self.vocab).into_iter().filter(|s| !self.options.prune || prune::violation(s, &self.vocab.fresh).is_none()).map(|s| vec![s]));
        for added in found {
            if self.room() == 0 {
                break;
            }
            let keys: Vec<String> = added.iter().map(|s| normalize(s).to_string()).collect();
            if keys.iter().any(|k| self.extension_seen.contains(k)) || (keys.len() == 2 && keys[0] == keys[1]) {
                continue;
            }
            if keys.len() == 1 {
                self.extension_seen.insert(keys[0].clone());
            }
            self.queue.push_back(RepairCandidate { replaced: BTreeMap::new(), added, removed: BTreeSet::new(), distance: d });
        }
        Ok(())
    }
}

fn with_line(s: &Statement, line: usize) -> Statement {
    let mut s = s.clone();
    s.line = line;
    s
}

/// New statements with exactly `size` nodes: an empty or atom head over
/// fresh variables and at most two body literals.
fn fresh_statements(size: usize, vocab: &Vocabulary) -> Vec<Statement> {
    let only_fresh = Vocabulary { variables: Vec::new(), ..vocab.clone() };
    let vars: Vec<&String> = only_fresh.fresh.iter().collect();
    let mut heads: Vec<Node> = vec![Node { label: Label::Empty, children: Vec::new() }];
    for (name, arity) in &vocab.predicates {
        let mut args: Vec<Vec<Node>> = vec![Vec::new()];
        for _ in 0..*arity {
            args = args
                .into_iter()
                .flat_map(|p| {
                    vars.iter().map(move |v| {
                        let mut p = p.clone();
                        p.push(Node { label: Label::Var((*v).clone()), children: Vec::new() });
                        p
                    })
                })
                .collect();
        }
        heads.extend(args.into_iter().map(|a| Node { label: Label::Pred(name.clone(), *arity), children: a }));
    }
    let literals = new_literals(&only_fresh, true);
    let mut out = Vec::new();
    for head in heads {
        let hs = head.size();
        if hs > size {
            continue;
        }
        let rest = size - hs;
        let tree = |body: Vec<Node>| MutationTree { head: head.clone(), body, line: 0 }.decode();
        if rest == 0 {
            out.push(tree(Vec::new()));
            continue;
        }
        for (i, (c1, l1)) in literals.iter().enumerate() {
            let c1 = *c1 as usize;
            if c1 == rest {
                out.push(tree(vec![l1.clone()]));
            } else if c1 < rest {
                for (c2, l2) in &literals[i + 1..] {
                    if c1 + *c2 as usize == rest {
                        out.push(tree(vec![l1.clone(), l2.clone()]));
                    }
                }
            }
        }
    }
    out.retain(|s| !prune::head_invalid(s));
    out
}

impl Iterator for Enumerator {
    type Item = RepairCandidate;

    fn next(&mut self) -> Option<RepairCandidate> {
        loop {
            if self.stop.is_some() {
                return None;
            }
            if self.produced >= self.options.budget {
                self.stop = Some(StopReason::Budget);
                return None;
            }
            if let Some(c) = self.queue.pop_front() {
                self.produced += 1;
                return Some(c);
            }
            if self.options.deadline.is_some_and(|t| Instant::now() >= t) {
                self.stop = Some(StopReason::Deadline);
                return None;
            }
            if self.distance >= self.options.max_distance {
                self.stop = Some(StopReason::Exhausted);
                return None;
            }
            self.distance += 1;
            if let Err(reason) = self.fill(self.distance) {
                // Drain what was queued before the deadline hit.
                if self.queue.is_empty() {
                    self.stop = Some(reason);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_statement};

    fn stream(src: &str, line: usize, max: u32) -> Vec<RepairCandidate> {
        let p = parse(src).unwrap();
        let vocab = Vocabulary::new(&p, &BTreeSet::from([line]), &BTreeSet::new());
        let opts = EnumerateOptions { max_distance: max, ..Default::default() };
        Enumerator::new(&p.statements()[line..=line], vocab, opts).collect()
    }

    fn texts(cs: &[RepairCandidate], d: u32) -> Vec<String> {
        cs.iter().filter(|c| c.distance == d).flat_map(|c| c.replaced.values().map(|s| s.to_string())).collect()
    }

    #[test]
    fn drops_lower_bound_at_distance_one() {
        let src = "v(X) :- e(X,_).\nk { sel(X) : v(X) } k.\n:- not sel(X), not sel(Y), e(X,Y).";
        let cs = stream(src, 1, 1);
        assert!(texts(&cs, 1).contains(&"{ sel(X) : v(X) } k.".to_owned()));
    }

    #[test]
    fn never_adds_zero() {
        let cs = stream("p(X) :- q(X), X > 1.", 0, 2);
        assert!(cs.iter().all(|c| c.replaced.values().all(|s| !s.to_string().contains("+ 0") && !s.to_string().contains("+0"))));
        assert!(texts(&cs, 2).iter().any(|s| s.contains("X+1") || s.contains("X + 1")), "growth reachable");
    }

    #[test]
    fn distances_non_decreasing_and_unique() {
        let cs = stream(":- sel(X), not sel(Y), e(X,Y).", 0, 2);
        assert!(cs.windows(2).all(|w| w[0].distance <= w[1].distance));
        let keys: HashSet<String> = cs.iter().map(|c| format!("{:?}{:?}", c.replaced, c.removed)).collect();
        assert_eq!(keys.len(), cs.len());
        let _ = parse_statement;
    }

    #[test]
    fn extension_uses_templates() {
        let p = parse("a :- b.").unwrap();
        let t = parse_statement(":- a, not b.").unwrap();
        let vocab = Vocabulary::new(&p, &BTreeSet::new(), &BTreeSet::new());
        let cs: Vec<_> = Enumerator::extension(&[t], p.statements(), vocab, EnumerateOptions { max_distance: 2, ..Default::default() }).collect();
        assert_eq!(cs[0].added[0].to_string(), ":- a, not b.");
        assert_eq!(cs[0].distance, 1);
        assert!(cs.iter().all(|c| c.added.iter().all(|s| s.to_string() != "a :- b.")));
    }
}

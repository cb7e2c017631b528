//! Hints: the repaired program with `?` where the student has to change
//! something.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::syntax::lexer::{tokenize, TokenKind};
use crate::syntax::{join_tokens, LineToken, Program};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    /// Program text with holes; `#const` lines first, then one statement per
    /// line.
    pub text: String,
    /// Statement lines of `text` that contain holes.
    pub changed_lines: BTreeSet<usize>,
    /// Text each hole stands for, in reading order. A removed line is a
    /// single hole whose answer is empty.
    pub answers: Vec<String>,
    #[serde(skip)]
    lines: Vec<Vec<Piece>>,
    #[serde(skip)]
    prefix: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Token(TokenKind),
    Hole(Vec<TokenKind>),
}

impl Hint {
    pub fn holes(&self) -> usize {
        self.answers.len()
    }

    /// Text obtained by filling holes with `answers` in order; `None` when
    /// the count is wrong or an answer does not tokenize.
    pub fn fill(&self, answers: &[String]) -> Option<String> {
        if answers.len() != self.holes() {
            return None;
        }
        let mut answers = answers.iter();
        let mut out = self.prefix.clone();
        for line in &self.lines {
            let mut tokens = Vec::new();
            for piece in line {
                match piece {
                    Piece::Token(k) => tokens.push(LineToken::Real(k.clone())),
                    Piece::Hole(_) => {
                        let answer = tokenize(answers.next()?).ok()?;
                        tokens.extend(answer.into_iter().map(|t| LineToken::Real(t.kind)));
                    }
                }
            }
            if !tokens.is_empty() {
                out.push_str(&join_tokens(&tokens));
                out.push('\n');
            }
        }
        Some(out)
    }

    /// The repaired program text, byte for byte.
    pub fn reconstruct(&self) -> String {
        self.fill(&self.answers).expect("own answers always fit")
    }
}

fn kinds(text: &str) -> Vec<TokenKind> {
    tokenize(text).map(|ts| ts.into_iter().map(|t| t.kind).collect()).unwrap_or_default()
}

/// Longest-common-subsequence alignment: pairs of matched indices.
fn lcs<T: PartialEq>(a: &[T], b: &[T]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    let mut table = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            table[i][j] = if a[i] == b[j] { table[i + 1][j + 1] + 1 } else { table[i + 1][j].max(table[i][j + 1]) };
        }
    }
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < n && j < m {
        if a[i] == b[j] {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if table[i + 1][j] >= table[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Token diff of one line: unchanged tokens kept, each run of changes
/// collapsed into one hole.
fn diff_line(original: &[TokenKind], repaired: &[TokenKind]) -> Vec<Piece> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut anchors = lcs(original, repaired);
    anchors.push((original.len(), repaired.len()));
    for (ai, aj) in anchors {
        if ai > i || aj > j {
            out.push(Piece::Hole(repaired[j..aj].to_vec()));
        }
        if aj < repaired.len() {
            out.push(Piece::Token(repaired[aj].clone()));
        }
        (i, j) = (ai + 1, aj + 1);
    }
    out
}

fn render(pieces: &[Piece]) -> String {
    let tokens: Vec<LineToken> = pieces
        .iter()
        .map(|p| match p {
            Piece::Token(k) => LineToken::Real(k.clone()),
            Piece::Hole(_) => LineToken::Hole,
        })
        .collect();
    join_tokens(&tokens)
}

/// Hint leading from `original` to `repaired`. Lines are aligned by equality;
/// within a gap, lines are paired in order and diffed token by token, and
/// leftover lines become whole-line holes.
pub fn make_hint(original: &Program, repaired: &Program) -> Hint {
    let before: Vec<String> = original.statements().iter().map(|s| s.to_string()).collect();
    let after: Vec<String> = repaired.statements().iter().map(|s| s.to_string()).collect();
    let mut lines: Vec<Vec<Piece>> = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut anchors = lcs(&before, &after);
    anchors.push((before.len(), after.len()));
    for (ai, aj) in anchors {
        let (gap_before, gap_after) = (&before[i..ai], &after[j..aj]);
        for k in 0..gap_before.len().max(gap_after.len()) {
            lines.push(match (gap_before.get(k), gap_after.get(k)) {
                (Some(b), Some(a)) => diff_line(&kinds(b), &kinds(a)),
                (Some(_), None) => vec![Piece::Hole(Vec::new())],
                (None, Some(a)) => vec![Piece::Hole(kinds(a))],
                (None, None) => unreachable!(),
            });
        }
        if aj < after.len() {
            lines.push(kinds(&after[aj]).into_iter().map(Piece::Token).collect());
        }
        (i, j) = (ai + 1, aj + 1);
    }
    let prefix: String = repaired.consts().iter().map(|(k, v)| format!("#const {k} = {v}.\n")).collect();
    let mut text = prefix.clone();
    let (mut changed_lines, mut answers) = (BTreeSet::new(), Vec::new());
    for (n, line) in lines.iter().enumerate() {
        text.push_str(&render(line));
        text.push('\n');
        for p in line {
            if let Piece::Hole(tokens) = p {
                changed_lines.insert(n);
                let parts: Vec<LineToken> = tokens.iter().cloned().map(LineToken::Real).collect();
                answers.push(join_tokens(&parts));
            }
        }
    }
    Hint { text, changed_lines, answers, lines, prefix }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, print};

    const BUGGY: &str = "v(X) :- e(X,_).\nv(X) :- e(_,X).\nk { sel(X) : v(X) } k.\n:- not sel(X), not sel(Y), e(X,Y).\n";

    fn hint(a: &str, b: &str) -> (Hint, Program) {
        let (a, b) = (parse(a).unwrap(), parse(b).unwrap());
        (make_hint(&a, &b), b)
    }

    #[test]
    fn dropped_lower_bound_is_one_hole() {
        let (h, repaired) = hint(BUGGY, &BUGGY.replace("k { sel", "{ sel"));
        assert_eq!(h.text.lines().nth(2), Some("? { sel(X) : v(X) } k."));
        assert_eq!(h.changed_lines, BTreeSet::from([2]));
        assert_eq!(h.answers, vec![String::new()]);
        assert_eq!(h.reconstruct(), print(&repaired));
    }

    #[test]
    fn both_bounds_changed() {
        let (h, repaired) = hint(BUGGY, &BUGGY.replace("k { sel(X) : v(X) } k.", "{ sel(X) : v(X) } 2."));
        assert_eq!(h.text.lines().nth(2), Some("? { sel(X) : v(X) } ?."));
        assert_eq!(h.reconstruct(), print(&repaired));
    }

    #[test]
    fn identical_and_added_and_removed() {
        let (h, _) = hint(BUGGY, BUGGY);
        assert_eq!(h.holes(), 0);
        let (h, repaired) = hint("a.\n", "#const n = 2.\na.\n:- a, b.\n");
        assert_eq!(h.text, "#const n = 2.\na.\n?\n");
        assert_eq!(h.reconstruct(), print(&repaired));
        let (h, repaired) = hint("a.\nb.\n", "b.\n");
        assert_eq!(h.text, "?\nb.\n");
        assert_eq!(h.reconstruct(), print(&repaired));
    }
}

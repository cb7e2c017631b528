//! Canonical printing.
//!
//! Terms are printed without spaces, body literals are separated by `", "`,
//! the rule arrow is `" :- "` and choice braces are padded with one space.
//! [`join_tokens`] reproduces exactly this layout from a token sequence, which
//! the hint renderer relies on.

use std::fmt::{self, Display, Write};

use super::ast::*;
use super::lexer::TokenKind;

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(v) => write!(f, "{v}"),
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => f.write_str(v),
            Term::Anon => f.write_char('_'),
            Term::BinOp(op, l, r) => {
                write_operand(f, l, op.precedence(), false)?;
                f.write_str(op.symbol())?;
                write_operand(f, r, op.precedence(), true)
            }
            Term::Abs(t) => write!(f, "|{t}|"),
            Term::Interval(l, h) => write!(f, "{l}..{h}"),
            Term::Pool(ts) => {
                f.write_char('(')?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_char(';')?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_char(')')
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term, parent: u8, right: bool) -> fmt::Result {
    let wrap = match t {
        Term::BinOp(op, ..) => op.precedence() < parent || (right && op.precedence() == parent),
        Term::Int(v) => right && *v < 0,
        _ => false,
    };
    if wrap {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pred { name, args } => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_char('(')?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_char(',')?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_char(')')?;
                }
                Ok(())
            }
            Atom::Cmp { op, left, right } => write!(f, "{left} {} {right}", op.symbol()),
        }
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        if self.classical {
            f.write_char('-')?;
        }
        write!(f, "{}", self.atom)
    }
}

fn write_list<T: Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl Display for ChoiceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)?;
        if !self.condition.is_empty() {
            f.write_str(" : ")?;
            write_list(f, &self.condition, ", ")?;
        }
        Ok(())
    }
}

impl Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::None => Ok(()),
            Head::Atom(a) => write!(f, "{a}"),
            Head::Choice { lower, elements, upper } => {
                if let Some(l) = lower {
                    write!(f, "{l} ")?;
                }
                f.write_str("{ ")?;
                write_list(f, elements, "; ")?;
                f.write_str(" }")?;
                if let Some(u) = upper {
                    write!(f, " {u}")?;
                }
                Ok(())
            }
        }
    }
}

impl Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.head, self.body.is_empty()) {
            (Head::None, _) => {
                f.write_str(":- ")?;
                write_list(f, &self.body, ", ")?;
            }
            (head, true) => write!(f, "{head}")?,
            (head, false) => {
                write!(f, "{head} :- ")?;
                write_list(f, &self.body, ", ")?;
            }
        }
        f.write_char('.')
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, value) in self.consts() {
            writeln!(f, "#const {name} = {value}.")?;
        }
        for s in self.statements() {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Canonical text of a program: const directives first, then one statement
/// per line.
pub fn print(program: &Program) -> String {
    program.to_string()
}

/// Statements only, one per line, so that text line `i` is statement `i`.
pub fn print_statements(program: &Program) -> String {
    program.statements().iter().map(|s| format!("{s}\n")).collect()
}

/// A token of a rendered line; `Hole` stands for a `?` placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineToken {
    Real(TokenKind),
    Hole,
}

impl LineToken {
    fn text(&self) -> String {
        match self {
            LineToken::Real(k) => k.text(),
            LineToken::Hole => "?".into(),
        }
    }

    fn is_wordlike(&self) -> bool {
        matches!(
            self,
            LineToken::Real(TokenKind::Ident(_) | TokenKind::Var(_) | TokenKind::Int(_) | TokenKind::Not | TokenKind::Anon)
                | LineToken::Hole
        )
    }
}

/// Joins tokens using the canonical printer's spacing rules.
pub fn join_tokens(tokens: &[LineToken]) -> String {
    let mut out = String::new();
    let mut depth = 0usize;
    let mut prev: Option<&LineToken> = None;
    for tok in tokens {
        if let Some(p) = prev {
            if needs_space(p, tok, depth) {
                out.push(' ');
            }
        }
        match tok {
            LineToken::Real(TokenKind::LParen) => depth += 1,
            LineToken::Real(TokenKind::RParen) => depth = depth.saturating_sub(1),
            _ => {}
        }
        out.push_str(&tok.text());
        prev = Some(tok);
    }
    out
}

fn needs_space(prev: &LineToken, next: &LineToken, depth: usize) -> bool {
    use TokenKind as K;
    if depth > 0 {
        return false;
    }
    let (p, n) = match (prev, next) {
        (LineToken::Real(p), LineToken::Real(n)) => (Some(p), Some(n)),
        (LineToken::Hole, LineToken::Real(n)) => (None, Some(n)),
        (LineToken::Real(p), LineToken::Hole) => (Some(p), None),
        (LineToken::Hole, LineToken::Hole) => return true,
    };
    if matches!(n, Some(K::Comma | K::Dot | K::RParen | K::Semi)) {
        return false;
    }
    if matches!(p, Some(K::Comma | K::Semi | K::Not | K::Const | K::LBrace | K::If | K::Colon)) {
        return true;
    }
    if matches!(n, Some(K::If | K::Colon | K::LBrace | K::RBrace)) {
        return true;
    }
    if p.is_some_and(TokenKind::is_comparison) || n.is_some_and(TokenKind::is_comparison) {
        return true;
    }
    if matches!(p, Some(K::RBrace)) {
        return true;
    }
    (p.is_none() || n.is_none()) && prev.is_wordlike() && next.is_wordlike()
}

#[cfg(test)]
mod tests {
    use super::super::lexer::tokenize;
    use super::super::parse;
    use super::*;

    fn reprint(src: &str) -> String {
        print(&parse(src).unwrap())
    }

    #[test]
    fn canonical_spacing() {
        assert_eq!(reprint("a:-b,not c."), "a :- b, not c.\n");
        assert_eq!(reprint("0{sel(X):v(X)}1."), "0 { sel(X) : v(X) } 1.\n");
        assert_eq!(reprint(":-X<>Y,p(X),p(Y)."), ":- X != Y, p(X), p(Y).\n");
        assert_eq!(reprint("#const k=3. e(1,2)."), "#const k = 3.\ne(1,2).\n");
    }

    #[test]
    fn empty_program_prints_nothing() {
        assert_eq!(print(&Program::empty()), "");
    }

    #[test]
    fn vertex_cover_submission_has_four_lines() {
        let src = "v(X) :- e(X,_).\nv(X) :- e(_,X).\nk { sel(X) : v(X) } k.\n:- not sel(X), not sel(Y), e(X,Y).\n";
        let p = parse(src).unwrap();
        assert_eq!(print(&p), src);
        assert_eq!(p.statements().iter().map(|s| s.line).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn parenthesization() {
        assert_eq!(reprint("p(X-(Y-Z))."), "p(X-(Y-Z)).\n");
        assert_eq!(reprint("p((X+Y)*Z)."), "p((X+Y)*Z).\n");
        assert_eq!(reprint("p(X+Y*Z)."), "p(X+Y*Z).\n");
        assert_eq!(reprint("p(X- -3)."), "p(X-(-3)).\n");
        assert_eq!(reprint("p(|X-1|,(1..n;3))."), "p(|X-1|,(1..n;3)).\n");
    }

    #[test]
    fn join_matches_printer() {
        for src in [
            "k { sel(X) : v(X); w(X) } k.",
            ":- not sel(X), not -sel(Y), e(X,Y), X+1 < |Y|.",
            "p((1;2),1..3) :- q(X,_), X != -1.",
            "#const k = -3.",
        ] {
            let printed = reprint(src);
            let line = printed.trim_end();
            let toks: Vec<LineToken> = tokenize(line).unwrap().into_iter().map(|t| LineToken::Real(t.kind)).collect();
            assert_eq!(join_tokens(&toks), line);
        }
    }

    #[test]
    fn holes_render_readably() {
        let mut toks: Vec<LineToken> =
            tokenize("{ sel(X) : v(X) } k.").unwrap().into_iter().map(|t| LineToken::Real(t.kind)).collect();
        toks.insert(0, LineToken::Hole);
        assert_eq!(join_tokens(&toks), "? { sel(X) : v(X) } k.");
    }
}

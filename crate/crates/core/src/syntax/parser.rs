use std::collections::BTreeMap;

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;

/// Parses a whole program.
pub fn parse(src: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens: &tokens, pos: 0, src_len: src.len() };
    let mut statements = Vec::new();
    let mut consts = BTreeMap::new();
    while !p.at_end() {
        if p.peek_is(&TokenKind::Const) {
            let (name, value) = p.const_directive()?;
            consts.insert(name, value);
        } else {
            statements.push(p.statement()?);
        }
    }
    Program::new(statements, consts)
}

/// Parses exactly one statement (a trailing `.` is required).
pub fn parse_statement(src: &str) -> Result<Statement, ParseError> {
    let program = parse(src)?;
    if program.len() != 1 || !program.consts().is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            expected: "exactly one statement".into(),
            found: format!("{} statements", program.len()),
        });
    }
    Ok(program.into_statements().remove(0))
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    src_len: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&'a TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'a TokenKind> {
        self.tokens.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn peek_is(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.start).unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_is(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().map(TokenKind::describe).unwrap_or_else(|| "end of input".into()),
        }
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> PResult<()> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn unsupported(&self, construct: &str) -> ParseError {
        ParseError::Unsupported { offset: self.offset(), construct: construct.into() }
    }

    fn const_directive(&mut self) -> PResult<(String, i64)> {
        self.expect(&TokenKind::Const, "`#const`")?;
        let name = match self.bump().map(|t| &t.kind) {
            Some(TokenKind::Ident(n)) => n.clone(),
            _ => {
                self.pos -= 1;
                return Err(self.error("constant name"));
            }
        };
        self.expect(&TokenKind::Eq, "`=`")?;
        let negative = self.eat(&TokenKind::Minus);
        let value = match self.peek() {
            Some(TokenKind::Int(v)) => *v,
            _ => return Err(self.error("integer value")),
        };
        self.pos += 1;
        self.expect(&TokenKind::Dot, "`.`")?;
        Ok((name, if negative { -value } else { value }))
    }

    fn statement(&mut self) -> PResult<Statement> {
        let start = self.offset();
        let head = if self.peek_is(&TokenKind::If) { Head::None } else { self.head()? };
        let mut body = Vec::new();
        if self.eat(&TokenKind::If) {
            body = self.literals("a body literal")?;
        } else if matches!(head, Head::None) {
            return Err(self.error("`:-`"));
        }
        let end = self.tokens.get(self.pos).map(|t| t.end).unwrap_or(self.src_len);
        self.expect(&TokenKind::Dot, "`.` terminating the statement")?;
        Ok(Statement { head, body, line: 0, span: Span { start, end } })
    }

    fn literals(&mut self, what: &str) -> PResult<Vec<Literal>> {
        let mut out = vec![self.literal(what)?];
        while self.eat(&TokenKind::Comma) {
            out.push(self.literal(what)?);
        }
        Ok(out)
    }

    fn head(&mut self) -> PResult<Head> {
        match (self.peek(), self.peek_at(1)) {
            (Some(TokenKind::LBrace), _) => self.choice(None),
            (Some(TokenKind::Minus), Some(TokenKind::Ident(_))) => {
                Err(self.unsupported("classical negation in rule heads"))
            }
            (Some(TokenKind::Not), _) => Err(self.unsupported("default negation in rule heads")),
            (Some(TokenKind::Ident(_)), Some(TokenKind::LParen)) => {
                let atom = self.pred_atom()?;
                if self.peek_is(&TokenKind::LBrace) {
                    return Err(self.unsupported("function terms"));
                }
                Ok(Head::Atom(atom))
            }
            (Some(TokenKind::Ident(_)), Some(TokenKind::Dot | TokenKind::If)) => Ok(Head::Atom(self.pred_atom()?)),
            (Some(_), _) => {
                let lower = self.term()?;
                if !self.peek_is(&TokenKind::LBrace) {
                    return Err(self.error("`{` opening a choice rule"));
                }
                self.choice(Some(lower))
            }
            (None, _) => Err(self.error("a statement")),
        }
    }

    fn choice(&mut self, lower: Option<Term>) -> PResult<Head> {
        self.expect(&TokenKind::LBrace, "`{`")?;
        let mut elements = vec![self.choice_element()?];
        while self.eat(&TokenKind::Semi) {
            elements.push(self.choice_element()?);
        }
        self.expect(&TokenKind::RBrace, "`}`")?;
        let upper = if matches!(self.peek(), Some(TokenKind::Dot | TokenKind::If)) { None } else { Some(self.term()?) };
        Ok(Head::Choice { lower, elements, upper })
    }

    fn choice_element(&mut self) -> PResult<ChoiceElement> {
        if self.peek_is(&TokenKind::Minus) {
            return Err(self.unsupported("classical negation in choice elements"));
        }
        if !matches!(self.peek(), Some(TokenKind::Ident(_))) {
            return Err(self.error("a predicate atom"));
        }
        let atom = self.pred_atom()?;
        let condition = if self.eat(&TokenKind::Colon) { self.literals("a condition literal")? } else { Vec::new() };
        Ok(ChoiceElement { atom, condition })
    }

    fn literal(&mut self, what: &str) -> PResult<Literal> {
        let negated = self.eat(&TokenKind::Not);
        if self.peek_is(&TokenKind::Not) {
            return Err(self.unsupported("double negation"));
        }
        if self.peek().is_none() || matches!(self.peek(), Some(TokenKind::Dot | TokenKind::Comma)) {
            return Err(self.error(what));
        }
        if let (Some(TokenKind::Minus), Some(TokenKind::Ident(_))) = (self.peek(), self.peek_at(1)) {
            self.pos += 1;
            let atom = self.pred_atom()?;
            return Ok(Literal { atom, negated, classical: true });
        }
        if let Some(TokenKind::Ident(_)) = self.peek() {
            let next = self.peek_at(1);
            let is_term = next.is_some_and(|k| k.is_comparison() || k.is_arithmetic());
            if !is_term {
                let atom = self.pred_atom()?;
                if self.peek().is_some_and(|k| k.is_comparison() || k.is_arithmetic()) {
                    return Err(self.unsupported("function terms"));
                }
                return Ok(Literal { atom, negated, classical: false });
            }
        }
        let left = self.term()?;
        let op = match self.peek() {
            Some(TokenKind::Eq) => CmpOp::Eq,
            Some(TokenKind::Neq) => CmpOp::Neq,
            Some(TokenKind::Lt) => CmpOp::Lt,
            Some(TokenKind::Le) => CmpOp::Le,
            Some(TokenKind::Gt) => CmpOp::Gt,
            Some(TokenKind::Ge) => CmpOp::Ge,
            _ => return Err(self.error("a comparison operator")),
        };
        self.pos += 1;
        let right = self.term()?;
        Ok(Literal { atom: Atom::Cmp { op, left, right }, negated, classical: false })
    }

    fn pred_atom(&mut self) -> PResult<Atom> {
        let name = match self.bump().map(|t| &t.kind) {
            Some(TokenKind::Ident(n)) => n.clone(),
            _ => {
                self.pos -= 1;
                return Err(self.error("a predicate name"));
            }
        };
        let mut args = Vec::new();
        if self.eat(&TokenKind::LParen) {
            args.push(self.argument()?);
            if self.peek_is(&TokenKind::Semi) {
                let mut alternatives = vec![args.pop().expect("one argument")];
                while self.eat(&TokenKind::Semi) {
                    alternatives.push(self.argument()?);
                }
                if self.peek_is(&TokenKind::Comma) {
                    return Err(self.unsupported("tuple pools"));
                }
                args.push(Term::Pool(alternatives));
            }
            while self.eat(&TokenKind::Comma) {
                args.push(self.argument()?);
            }
            if self.peek_is(&TokenKind::Semi) {
                return Err(self.unsupported("tuple pools"));
            }
            self.expect(&TokenKind::RParen, "`)`")?;
        }
        Ok(Atom::Pred { name, args })
    }

    /// Predicate argument: a term, an interval, `_`, or a pool of those.
    fn argument(&mut self) -> PResult<Term> {
        if self.eat(&TokenKind::Anon) {
            return Ok(Term::Anon);
        }
        if self.peek_is(&TokenKind::LParen) {
            if let Some(pool) = self.try_pool()? {
                return Ok(pool);
            }
        }
        let low = self.sum()?;
        if self.eat(&TokenKind::DotDot) {
            let high = self.sum()?;
            return Ok(Term::Interval(Box::new(low), Box::new(high)));
        }
        Ok(low)
    }

    /// `(a;b;...)` in argument position; backtracks when it is a plain
    /// parenthesized term.
    fn try_pool(&mut self) -> PResult<Option<Term>> {
        let save = self.pos;
        self.expect(&TokenKind::LParen, "`(`")?;
        let first = self.argument()?;
        if !self.peek_is(&TokenKind::Semi) {
            self.pos = save;
            return Ok(None);
        }
        let mut alternatives = vec![first];
        while self.eat(&TokenKind::Semi) {
            alternatives.push(self.argument()?);
        }
        self.expect(&TokenKind::RParen, "`)` closing the pool")?;
        if alternatives.iter().any(|t| matches!(t, Term::Pool(_))) {
            return Err(self.unsupported("nested pools"));
        }
        Ok(Some(Term::Pool(alternatives)))
    }

    /// Arithmetic term; intervals, pools and `_` are rejected here.
    fn term(&mut self) -> PResult<Term> {
        let start = self.offset();
        let t = self.sum()?;
        if t.has_argument_only_parts() || self.peek_is(&TokenKind::DotDot) {
            return Err(ParseError::Unsupported {
                offset: start,
                construct: "intervals, pools and `_` outside predicate arguments".into(),
            });
        }
        Ok(t)
    }

    fn sum(&mut self) -> PResult<Term> {
        let mut left = self.product()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.product()?;
            left = Term::binop(op, left, right);
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.unary()?;
            left = Term::binop(op, left, right);
        }
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.eat(&TokenKind::Minus) {
            return Ok(match self.unary()? {
                Term::Int(v) => Term::Int(-v),
                other => Term::binop(BinOp::Sub, Term::Int(0), other),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Term> {
        let kind = match self.peek() {
            Some(k) => k.clone(),
            None => return Err(self.error("a term")),
        };
        match kind {
            TokenKind::Int(v) => {
                self.pos += 1;
                Ok(Term::Int(v))
            }
            TokenKind::Var(v) => {
                self.pos += 1;
                Ok(Term::Var(v))
            }
            TokenKind::Anon => {
                self.pos += 1;
                Ok(Term::Anon)
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                if self.peek_is(&TokenKind::LParen) {
                    return Err(self.unsupported("function terms"));
                }
                Ok(Term::Const(name))
            }
            TokenKind::Bar => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(&TokenKind::Bar, "`|` closing the absolute value")?;
                Ok(Term::Abs(Box::new(inner)))
            }
            TokenKind::LParen => {
                if let Some(pool) = self.try_pool()? {
                    return Ok(pool);
                }
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_with_negation() {
        let p = parse("a :- b, c, not d.").unwrap();
        let s = &p.statements()[0];
        assert_eq!(s.head, Head::Atom(Atom::pred("a", vec![])));
        assert_eq!(
            s.body,
            vec![
                Literal::pos(Atom::pred("b", vec![])),
                Literal::pos(Atom::pred("c", vec![])),
                Literal::neg(Atom::pred("d", vec![])),
            ]
        );
    }

    #[test]
    fn anonymous_argument() {
        let s = parse_statement("v(X) :- e(X,_).").unwrap();
        assert_eq!(s.head, Head::Atom(Atom::pred("v", vec![Term::var("X")])));
        assert_eq!(s.body, vec![Literal::pos(Atom::pred("e", vec![Term::var("X"), Term::Anon]))]);
    }

    #[test]
    fn empty_body_is_an_error() {
        assert!(matches!(parse("a :- ."), Err(ParseError::Syntax { offset: 5, .. })));
        assert!(matches!(parse(":- ."), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn arity_mismatch() {
        let err = parse("p(1). q :- p(1,2).").unwrap_err();
        assert_eq!(err, ParseError::ArityMismatch { predicate: "p".into(), arities: vec![1, 2] });
    }

    #[test]
    fn choice_rule_with_bounds() {
        let s = parse_statement("k { sel(X) : v(X) } k.").unwrap();
        match s.head {
            Head::Choice { lower, elements, upper } => {
                assert_eq!(lower, Some(Term::constant("k")));
                assert_eq!(upper, Some(Term::constant("k")));
                assert_eq!(elements.len(), 1);
                assert_eq!(elements[0].condition, vec![Literal::pos(Atom::pred("v", vec![Term::var("X")]))]);
            }
            other => panic!("unexpected head {other:?}"),
        }
    }

    #[test]
    fn const_directive_and_lines() {
        let p = parse("#const k = 3.\ne(1,2). e(2,3).").unwrap();
        assert_eq!(p.consts().get("k"), Some(&3));
        assert_eq!(p.len(), 2);
        assert_eq!(p.statements()[1].line, 1);
    }

    #[test]
    fn arithmetic_precedence_and_abs() {
        let s = parse_statement(":- p(X), X+2*3 > |X-1|.").unwrap();
        let Atom::Cmp { left, right, .. } = &s.body[1].atom else { panic!() };
        assert_eq!(
            left,
            &Term::binop(BinOp::Add, Term::var("X"), Term::binop(BinOp::Mul, Term::int(2), Term::int(3)))
        );
        assert_eq!(right, &Term::Abs(Box::new(Term::binop(BinOp::Sub, Term::var("X"), Term::int(1)))));
    }

    #[test]
    fn intervals_and_pools_only_in_arguments() {
        let s = parse_statement("p(1..n, (a;b)).").unwrap();
        let Head::Atom(Atom::Pred { args, .. }) = &s.head else { panic!() };
        assert!(matches!(args[0], Term::Interval(..)));
        assert!(matches!(args[1], Term::Pool(_)));
        assert!(parse_statement("p(1;2).").is_ok());
        assert!(matches!(parse(":- X = 1..2, p(X)."), Err(ParseError::Unsupported { .. })));
        assert!(matches!(parse(":- X = _."), Err(ParseError::Unsupported { .. })));
    }

    #[test]
    fn comparisons_against_constants() {
        let s = parse_statement(":- col(X,C), C != red.").unwrap();
        assert_eq!(s.body[1].atom, Atom::cmp(CmpOp::Neq, Term::var("C"), Term::constant("red")));
    }

    #[test]
    fn classical_negation_in_body() {
        let s = parse_statement("a :- -b.").unwrap();
        assert!(s.body[0].classical);
        assert!(matches!(parse("-a."), Err(ParseError::Unsupported { .. })));
    }

    #[test]
    fn missing_dot() {
        assert!(matches!(parse("a :- b"), Err(ParseError::Syntax { offset: 6, .. })));
    }
}

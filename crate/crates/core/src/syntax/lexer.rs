use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Var(String),
    Anon,
    Int(i64),
    Not,
    Const,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    If,
    Dot,
    DotDot,
    Plus,
    Minus,
    Star,
    Slash,
    Bar,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Var(s) => format!("variable `{s}`"),
            TokenKind::Int(i) => format!("integer `{i}`"),
            other => format!("`{}`", other.text()),
        }
    }

    /// Source text of the token in canonical form.
    pub fn text(&self) -> String {
        match self {
            TokenKind::Ident(s) | TokenKind::Var(s) => s.clone(),
            TokenKind::Int(i) => i.to_string(),
            TokenKind::Anon => "_".into(),
            TokenKind::Not => "not".into(),
            TokenKind::Const => "#const".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
            TokenKind::LBrace => "{".into(),
            TokenKind::RBrace => "}".into(),
            TokenKind::Comma => ",".into(),
            TokenKind::Semi => ";".into(),
            TokenKind::Colon => ":".into(),
            TokenKind::If => ":-".into(),
            TokenKind::Dot => ".".into(),
            TokenKind::DotDot => "..".into(),
            TokenKind::Plus => "+".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Star => "*".into(),
            TokenKind::Slash => "/".into(),
            TokenKind::Bar => "|".into(),
            TokenKind::Eq => "=".into(),
            TokenKind::Neq => "!=".into(),
            TokenKind::Lt => "<".into(),
            TokenKind::Le => "<=".into(),
            TokenKind::Gt => ">".into(),
            TokenKind::Ge => ">=".into(),
        }
    }

    pub fn is_comparison(&self) -> bool {
        matches!(
            self,
            TokenKind::Eq | TokenKind::Neq | TokenKind::Lt | TokenKind::Le | TokenKind::Gt | TokenKind::Ge
        )
    }

    pub fn is_arithmetic(&self) -> bool {
        matches!(self, TokenKind::Plus | TokenKind::Minus | TokenKind::Star | TokenKind::Slash)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

/// Splits source text into tokens, dropping whitespace and `%` comments.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'%' {
            if bytes.get(i + 1) == Some(&b'*') {
                let close = src[i + 2..].find("*%").ok_or_else(|| ParseError::Syntax {
                    offset: i,
                    expected: "`*%` closing the block comment".into(),
                    found: "end of input".into(),
                })?;
                i = i + 2 + close + 2;
            } else {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            continue;
        }
        let start = i;
        let two = |b: u8| bytes.get(i + 1) == Some(&b);
        let (kind, len) = match c {
            b'(' => (TokenKind::LParen, 1),
            b')' => (TokenKind::RParen, 1),
            b'{' => (TokenKind::LBrace, 1),
            b'}' => (TokenKind::RBrace, 1),
            b',' => (TokenKind::Comma, 1),
            b';' => (TokenKind::Semi, 1),
            b':' if two(b'-') => (TokenKind::If, 2),
            b':' => (TokenKind::Colon, 1),
            b'.' if two(b'.') => (TokenKind::DotDot, 2),
            b'.' => (TokenKind::Dot, 1),
            b'+' => (TokenKind::Plus, 1),
            b'-' => (TokenKind::Minus, 1),
            b'*' if two(b'*') => return Err(unsupported(start, "exponentiation `**`")),
            b'*' => (TokenKind::Star, 1),
            b'/' => (TokenKind::Slash, 1),
            b'|' => (TokenKind::Bar, 1),
            b'=' if two(b'=') => (TokenKind::Eq, 2),
            b'=' => (TokenKind::Eq, 1),
            b'!' if two(b'=') => (TokenKind::Neq, 2),
            b'<' if two(b'>') => (TokenKind::Neq, 2),
            b'<' if two(b'=') => (TokenKind::Le, 2),
            b'<' => (TokenKind::Lt, 1),
            b'>' if two(b'=') => (TokenKind::Ge, 2),
            b'>' => (TokenKind::Gt, 1),
            b'\\' => return Err(unsupported(start, "modulo `\\`")),
            b'"' => return Err(unsupported(start, "string constants")),
            b'#' => {
                let end = scan_word(bytes, i + 1);
                let word = &src[i + 1..end];
                if word == "const" {
                    (TokenKind::Const, end - i)
                } else {
                    return Err(unsupported(start, &format!("directive `#{word}`")));
                }
            }
            b'0'..=b'9' => {
                let mut end = i;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let value = src[i..end].parse::<i64>().map_err(|_| ParseError::Syntax {
                    offset: i,
                    expected: "an integer that fits in 64 bits".into(),
                    found: src[i..end].to_string(),
                })?;
                (TokenKind::Int(value), end - i)
            }
            b'_' => {
                let end = scan_word(bytes, i + 1);
                if end > i + 1 {
                    return Err(unsupported(start, "identifiers starting with `_` (reserved)"));
                }
                (TokenKind::Anon, 1)
            }
            b'a'..=b'z' => {
                let end = scan_word(bytes, i);
                let word = &src[i..end];
                let kind = if word == "not" { TokenKind::Not } else { TokenKind::Ident(word.to_string()) };
                (kind, end - i)
            }
            b'A'..=b'Z' => {
                let end = scan_word(bytes, i);
                (TokenKind::Var(src[i..end].to_string()), end - i)
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: "a token".into(),
                    found: format!("`{ch}`"),
                });
            }
        };
        i += len;
        out.push(Token { kind, start, end: i });
    }
    Ok(out)
}

fn scan_word(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
        i += 1;
    }
    i
}

fn unsupported(offset: usize, construct: &str) -> ParseError {
    ParseError::Unsupported { offset, construct: construct.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn comments_and_intervals() {
        assert_eq!(
            kinds("p(1..3). % trailing\n%* block *% q."),
            vec![
                TokenKind::Ident("p".into()),
                TokenKind::LParen,
                TokenKind::Int(1),
                TokenKind::DotDot,
                TokenKind::Int(3),
                TokenKind::RParen,
                TokenKind::Dot,
                TokenKind::Ident("q".into()),
                TokenKind::Dot,
            ]
        );
    }

    #[test]
    fn operators() {
        assert_eq!(
            kinds(":- X<>Y, X==Y."),
            vec![
                TokenKind::If,
                TokenKind::Var("X".into()),
                TokenKind::Neq,
                TokenKind::Var("Y".into()),
                TokenKind::Comma,
                TokenKind::Var("X".into()),
                TokenKind::Eq,
                TokenKind::Var("Y".into()),
                TokenKind::Dot,
            ]
        );
    }

    #[test]
    fn rejects_show_and_reserved_names() {
        assert!(matches!(tokenize("#show a/1."), Err(ParseError::Unsupported { offset: 0, .. })));
        assert!(matches!(tokenize("_sel(1)."), Err(ParseError::Unsupported { .. })));
    }
}

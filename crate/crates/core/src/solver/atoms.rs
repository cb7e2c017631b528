use std::collections::BTreeSet;
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::syntax::Signature;

/// A value in a ground atom as printed by the solver.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroundTerm {
    Int(i64),
    Sym(String),
    Str(String),
    /// Compound term; an empty name is a tuple.
    Func(String, Vec<GroundTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub name: String,
    pub args: Vec<GroundTerm>,
    pub classical: bool,
}

impl GroundAtom {
    pub fn new(name: impl Into<String>, args: Vec<GroundTerm>) -> Self {
        GroundAtom { classical: false, name: name.into(), args }
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.name.clone(), self.args.len())
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[GroundTerm]) -> fmt::Result {
    f.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{a}")?;
    }
    f.write_char(')')
}

impl fmt::Display for GroundTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTerm::Int(v) => write!(f, "{v}"),
            GroundTerm::Sym(s) => f.write_str(s),
            GroundTerm::Str(s) => write!(f, "{s:?}"),
            GroundTerm::Func(name, args) => {
                f.write_str(name)?;
                if args.len() == 1 && name.is_empty() {
                    write!(f, "({},)", args[0])
                } else {
                    write_args(f, args)
                }
            }
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.classical {
            f.write_char('-')?;
        }
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            write_args(f, &self.args)?;
        }
        Ok(())
    }
}

impl Serialize for GroundAtom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroundAtom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_ground_atom(&s).ok_or_else(|| serde::de::Error::custom(format!("not a ground atom: {s}")))
    }
}

/// A stable model restricted to some signatures.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnswerSet(pub BTreeSet<GroundAtom>);

impl AnswerSet {
    pub fn new(atoms: impl IntoIterator<Item = GroundAtom>) -> Self {
        AnswerSet(atoms.into_iter().collect())
    }

    /// Keeps atoms whose name/arity is listed; classical negations of a
    /// listed predicate are kept too.
    pub fn project(&self, signatures: &BTreeSet<Signature>) -> AnswerSet {
        AnswerSet(self.0.iter().filter(|a| signatures.contains(&a.signature())).cloned().collect())
    }

    pub fn atoms(&self) -> &BTreeSet<GroundAtom> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Facts reproducing this answer set, one per line.
    pub fn to_facts(&self) -> String {
        let mut out = String::new();
        for a in &self.0 {
            let _ = writeln!(out, "{a}.");
        }
        out
    }
}

impl fmt::Display for AnswerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_char('}')
    }
}

/// Parses one atom in the solver's output syntax, e.g. `-p(1,f(a),"s",(2,3))`.
pub fn parse_ground_atom(text: &str) -> Option<GroundAtom> {
    let mut p = AtomParser { s: text.trim().as_bytes(), i: 0 };
    let classical = p.eat(b'-');
    let name = p.ident()?;
    if !name.trim_start_matches('_').starts_with(|c: char| c.is_ascii_lowercase()) {
        return None;
    }
    let args = if p.peek() == Some(b'(') { p.args()? } else { Vec::new() };
    (p.i == p.s.len()).then_some(GroundAtom { classical, name, args })
}

/// Splits a model line into atoms, respecting parentheses and strings.
pub(crate) fn split_model_line(line: &str) -> Option<Vec<GroundAtom>> {
    let mut atoms = Vec::new();
    let (mut depth, mut in_str, mut escaped, mut start) = (0i32, false, false, None);
    for (i, c) in line.char_indices() {
        if in_str {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '(' => depth += 1,
            ')' => depth -= 1,
            ' ' | '\t' if depth == 0 => {
                if let Some(s) = start.take() {
                    atoms.push(parse_ground_atom(&line[s..i])?);
                }
                continue;
            }
            _ => {}
        }
        if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        atoms.push(parse_ground_atom(&line[s..])?);
    }
    Some(atoms)
}

struct AtomParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl AtomParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'') {
            self.i += 1;
        }
        (self.i > start).then(|| String::from_utf8_lossy(&self.s[start..self.i]).into_owned())
    }

    fn args(&mut self) -> Option<Vec<GroundTerm>> {
        if !self.eat(b'(') {
            return None;
        }
        let mut out = Vec::new();
        if self.eat(b')') {
            return Some(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat(b')') {
                return Some(out);
            }
            if !self.eat(b',') {
                return None;
            }
            // one-element tuple `(t,)`
            if self.eat(b')') {
                return Some(out);
            }
        }
    }

    fn term(&mut self) -> Option<GroundTerm> {
        match self.peek()? {
            b'"' => {
                self.i += 1;
                let mut buf = String::new();
                loop {
                    match self.peek()? {
                        b'"' => {
                            self.i += 1;
                            return Some(GroundTerm::Str(buf));
                        }
                        b'\\' => {
                            let c = *self.s.get(self.i + 1)?;
                            buf.push(match c {
                                b'n' => '\n',
                                b't' => '\t',
                                other => other as char,
                            });
                            self.i += 2;
                        }
                        c => {
                            buf.push(c as char);
                            self.i += 1;
                        }
                    }
                }
            }
            b'(' => Some(GroundTerm::Func(String::new(), self.args()?)),
            b'-' | b'0'..=b'9' => {
                let start = self.i;
                self.i += 1;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.i += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).ok()?;
                if text == "-" {
                    // negated function symbol, e.g. `-a`
                    let name = self.ident()?;
                    if self.peek() == Some(b'(') {
                        return Some(GroundTerm::Func(format!("-{name}"), self.args()?));
                    }
                    return Some(GroundTerm::Sym(format!("-{name}")));
                }
                text.parse().ok().map(GroundTerm::Int)
            }
            b'#' => {
                self.i += 1;
                let name = self.ident()?;
                Some(GroundTerm::Sym(format!("#{name}")))
            }
            _ => {
                let name = self.ident()?;
                if self.peek() == Some(b'(') {
                    Some(GroundTerm::Func(name, self.args()?))
                } else {
                    Some(GroundTerm::Sym(name))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_round_trip() {
        for text in ["p", "-p(1)", "p(1,-2,a)", "q(f(a,2),(1,2))", "s(\"hi there\")", "t((1,))", "u(-a)"] {
            let a = parse_ground_atom(text).unwrap_or_else(|| panic!("{text}"));
            assert_eq!(a.to_string(), text);
        }
    }

    #[test]
    fn rejects_garbage() {
        for text in ["", "P(1)", "p(1", "p(1))", "p q"] {
            assert!(parse_ground_atom(text).is_none(), "{text}");
        }
    }

    #[test]
    fn splits_lines() {
        let atoms = split_model_line("sel(1) s(\"a b\") q((1,2),x)").unwrap();
        assert_eq!(atoms.len(), 3);
        assert_eq!(split_model_line("").unwrap(), vec![]);
    }
}

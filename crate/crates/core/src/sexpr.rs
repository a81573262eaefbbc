//! Minimal s-expression reader shared by the domain, state, concept and
//! policy file formats.
//!
//! Comments start with `;` and run to end of line. Atoms are any run of
//! characters other than whitespace, parentheses and `;`.

use std::fmt;

use thiserror::Error;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    Atom(String, Pos),
    List(Vec<Sexpr>, Pos),
}

impl Sexpr {
    pub fn pos(&self) -> Pos {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Atom(..) => None,
        }
    }

    /// The atom, or a syntax error mentioning `what`.
    pub fn expect_atom(&self, what: &str) -> Result<&str, SyntaxError> {
        self.as_atom()
            .ok_or_else(|| SyntaxError::new(self.pos(), format!("expected {what}, found a list")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexpr], SyntaxError> {
        match self {
            Sexpr::List(items, _) => Ok(items),
            Sexpr::Atom(a, p) => Err(SyntaxError::new(
                *p,
                format!("expected {what}, found `{a}`"),
            )),
        }
    }

    /// If this is a list whose head atom equals `head`, its tail.
    pub fn tagged(&self, head: &str) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) if items.first().and_then(Sexpr::as_atom) == Some(head) => {
                Some(&items[1..])
            }
            _ => None,
        }
    }

    /// Head atom of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a, _) => f.write_str(a),
            Sexpr::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    src: &'a [u8],
    text: &'a str,
    i: usize,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) {
        if self.src[self.i] == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        self.i += 1;
    }

    fn skip_ws(&mut self) {
        while self.i < self.src.len() {
            match self.src[self.i] {
                b';' => {
                    while self.i < self.src.len() && self.src[self.i] != b'\n' {
                        self.bump();
                    }
                }
                c if c.is_ascii_whitespace() => self.bump(),
                _ => break,
            }
        }
    }

    fn read(&mut self) -> Result<Sexpr, SyntaxError> {
        self.skip_ws();
        let start = self.pos();
        match self.src.get(self.i) {
            None => Err(SyntaxError::new(start, "unexpected end of input")),
            Some(b')') => Err(SyntaxError::new(start, "unbalanced `)`")),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src.get(self.i) {
                        None => {
                            return Err(SyntaxError::new(start, "unclosed `(`"));
                        }
                        Some(b')') => {
                            self.bump();
                            return Ok(Sexpr::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let from = self.i;
                while self.i < self.src.len() {
                    let c = self.src[self.i];
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.bump();
                }
                // Only ASCII delimiters are split on, so `from..i` lies on char boundaries.
                Ok(Sexpr::Atom(self.text[from..self.i].to_string(), start))
            }
        }
    }
}

/// Reads every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexpr>, SyntaxError> {
    let mut r = Reader {
        src: text.as_bytes(),
        text,
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_ws();
        if r.i >= r.src.len() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

/// Reads exactly one expression.
pub fn parse_one(text: &str) -> Result<Sexpr, SyntaxError> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(SyntaxError::new(Pos { line: 1, col: 1 }, "empty input")),
        _ => Err(SyntaxError::new(
            all[1].pos(),
            "trailing input after the first expression",
        )),
    }
}

//! S-expression reader for the SMT-LIB2 frontend.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Sexp {
    /// Symbols (with `|…|` quotes removed), numerals, keywords, strings.
    Atom { text: String, line: usize, column: usize },
    List { items: Vec<Sexp>, line: usize, column: usize },
}

impl Sexp {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, column, .. } | Sexp::List { line, column, .. } => (*line, *column),
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            Sexp::Atom { .. } => None,
        }
    }

    /// The leading symbol of a list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.pos();
        Err(Error::syntax(l, c, msg))
    }
}

pub(crate) fn read_all(text: &str) -> Result<Vec<Sexp>> {
    let chars: Vec<char> = text.chars().collect();
    let mut r = Reader {
        chars,
        i: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_blank();
        if r.i >= r.chars.len() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

struct Reader {
    chars: Vec<char>,
    i: usize,
    line: usize,
    column: usize,
}

impl Reader {
    fn bump(&mut self) -> char {
        let c = self.chars[self.i];
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn skip_blank(&mut self) {
        while self.i < self.chars.len() {
            match self.chars[self.i] {
                c if c.is_whitespace() => {
                    self.bump();
                }
                ';' => {
                    while self.i < self.chars.len() && self.chars[self.i] != '\n' {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_blank();
        let (line, column) = (self.line, self.column);
        if self.i >= self.chars.len() {
            return Err(Error::syntax(line, column, "unexpected end of input"));
        }
        match self.chars[self.i] {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    if self.i >= self.chars.len() {
                        return Err(Error::syntax(line, column, "unbalanced `(`"));
                    }
                    if self.chars[self.i] == ')' {
                        self.bump();
                        return Ok(Sexp::List { items, line, column });
                    }
                    items.push(self.read()?);
                }
            }
            ')' => Err(Error::syntax(line, column, "unexpected `)`")),
            '|' => {
                self.bump();
                let mut text = String::new();
                loop {
                    if self.i >= self.chars.len() {
                        return Err(Error::syntax(line, column, "unterminated `|` symbol"));
                    }
                    match self.bump() {
                        '|' => break,
                        c => text.push(c),
                    }
                }
                Ok(Sexp::Atom { text, line, column })
            }
            '"' => {
                let mut text = String::from(self.bump());
                loop {
                    if self.i >= self.chars.len() {
                        return Err(Error::syntax(line, column, "unterminated string"));
                    }
                    let c = self.bump();
                    text.push(c);
                    if c == '"' {
                        // `""` is an escaped quote
                        if self.i < self.chars.len() && self.chars[self.i] == '"' {
                            text.push(self.bump());
                            continue;
                        }
                        break;
                    }
                }
                Ok(Sexp::Atom { text, line, column })
            }
            _ => {
                let mut text = String::new();
                while self.i < self.chars.len() {
                    let c = self.chars[self.i];
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '|' | '"') {
                        break;
                    }
                    text.push(self.bump());
                }
                Ok(Sexp::Atom { text, line, column })
            }
        }
    }
}

//! A small positioned s-expression reader. `;` comments run to end of line.

use super::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
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

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(s, _) => Some(s),
            Sexpr::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items, _) => Some(items),
            Sexpr::Atom(..) => None,
        }
    }

    /// Case-insensitive keyword test.
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.atom().is_some_and(|a| a.eq_ignore_ascii_case(kw))
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.pos(), message)
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexpr>, ParseError> {
        self.skip_trivia();
        let pos = self.pos();
        match self.chars.peek() {
            None => Ok(None),
            Some(')') => Err(ParseError::at(pos, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(ParseError::at(pos, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexpr::List(items, pos)));
                        }
                        Some(_) => items.push(self.read()?.expect("input remains")),
                    }
                }
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Some(Sexpr::Atom(text, pos)))
            }
        }
    }
}

/// Reads every top-level expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexpr>, ParseError> {
    read_all_from(text, 1, 1)
}

/// Like [`read_all`] but numbering positions from `line`/`column`.
pub fn read_all_from(text: &str, line: usize, column: usize) -> Result<Vec<Sexpr>, ParseError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        line,
        column,
    };
    let mut out = Vec::new();
    while let Some(e) = reader.read()? {
        out.push(e);
    }
    Ok(out)
}

//! Recursive-descent parser for the concrete CCS syntax.

use super::{canon, is_guarded, CcsError, CcsPrefix, CcsTerm};

/// Parses a term, checks that recursion variables are bound and guarded,
/// and returns it with binders canonically renamed.
pub fn parse(text: &str) -> Result<CcsTerm, CcsError> {
    let mut parser = Parser::new(text);
    parser.skip_ws();
    let term = parser.parse_par()?;
    parser.skip_ws();
    if parser.peek().is_some() {
        return Err(parser.syntax_here("expected end of input"));
    }
    Ok(canon(&term))
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    scope: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            chars: text.char_indices().collect(),
            pos: 0,
            scope: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let byte = self
            .chars
            .get(pos)
            .map(|(b, _)| *b)
            .unwrap_or(self.text.len());
        let before = &self.text[..byte];
        let line = before.chars().filter(|c| *c == '\n').count() + 1;
        let col = before.chars().rev().take_while(|c| *c != '\n').count() + 1;
        (line, col)
    }

    fn syntax_at(&self, pos: usize, message: impl Into<String>) -> CcsError {
        let (line, col) = self.line_col(pos);
        CcsError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn syntax_here(&self, expected: &str) -> CcsError {
        let found = match self.peek() {
            Some(c) => format!("found '{c}'"),
            None => "found end of input".to_string(),
        };
        self.syntax_at(self.pos, format!("{expected}, {found}"))
    }

    fn expect(&mut self, c: char, context: &str) -> Result<(), CcsError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax_here(&format!("expected '{c}' {context}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), CcsError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                Ok((name, start))
            }
            _ => Err(self.syntax_here(&format!("expected {what}"))),
        }
    }

    // P "|" P, loosest
    fn parse_par(&mut self) -> Result<CcsTerm, CcsError> {
        let mut left = self.parse_plus()?;
        loop {
            self.skip_ws();
            if self.eat('|') {
                let right = self.parse_plus()?;
                left = CcsTerm::par(left, right);
            } else {
                return Ok(left);
            }
        }
    }

    // P "+" P
    fn parse_plus(&mut self) -> Result<CcsTerm, CcsError> {
        let mut left = self.parse_restrict()?;
        loop {
            self.skip_ws();
            if self.eat('+') {
                let right = self.parse_restrict()?;
                left = CcsTerm::choice(left, right);
            } else {
                return Ok(left);
            }
        }
    }

    // P "\" IDENT, postfix
    fn parse_restrict(&mut self) -> Result<CcsTerm, CcsError> {
        let mut term = self.parse_prefix()?;
        loop {
            self.skip_ws();
            if self.eat('\\') {
                let (name, _) = self.ident("a channel name after '\\'")?;
                term = CcsTerm::restrict(name, term);
            } else {
                return Ok(term);
            }
        }
    }

    // prefixes, atoms, and rec (whose body reaches as far right as it can)
    fn parse_prefix(&mut self) -> Result<CcsTerm, CcsError> {
        self.skip_ws();
        match self.peek() {
            Some('?') | Some('!') => {
                let sigil = self.bump().unwrap();
                let (name, _) = self.ident(&format!("a channel name after '{sigil}'"))?;
                self.skip_ws();
                self.expect('.', "after the prefix")?;
                let cont = self.parse_prefix()?;
                let prefix = if sigil == '?' {
                    CcsPrefix::Input(name)
                } else {
                    CcsPrefix::Output(name)
                };
                Ok(CcsTerm::prefix(prefix, cont))
            }
            Some('0') => {
                self.pos += 1;
                Ok(CcsTerm::Nil)
            }
            Some('(') => {
                self.pos += 1;
                let term = self.parse_par()?;
                self.skip_ws();
                self.expect(')', "to close the group")?;
                Ok(term)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (word, start) = self.ident("a term")?;
                match word.as_str() {
                    "tau" => {
                        self.skip_ws();
                        self.expect('.', "after 'tau'")?;
                        let cont = self.parse_prefix()?;
                        Ok(CcsTerm::prefix(CcsPrefix::Tau, cont))
                    }
                    "rec" => {
                        let (var, var_pos) = self.ident("a recursion variable after 'rec'")?;
                        if var == "rec" || var == "tau" {
                            return Err(
                                self.syntax_at(var_pos, format!("'{var}' is a keyword"))
                            );
                        }
                        self.skip_ws();
                        self.expect('.', "after the recursion variable")?;
                        self.scope.push(var.clone());
                        let body = self.parse_par()?;
                        self.scope.pop();
                        if !is_guarded(&body, &var) {
                            let (line, col) = self.line_col(start);
                            return Err(CcsError::UnguardedRecursion {
                                name: var,
                                line,
                                col,
                            });
                        }
                        Ok(CcsTerm::Rec(var, Box::new(body)))
                    }
                    _ => {
                        if self.scope.iter().any(|v| v == &word) {
                            Ok(CcsTerm::Var(word))
                        } else {
                            let (line, col) = self.line_col(start);
                            Err(CcsError::UnboundVariable {
                                name: word,
                                line,
                                col,
                            })
                        }
                    }
                }
            }
            _ => Err(self.syntax_here(
                "expected a term (one of '0', '?', '!', 'tau', 'rec', '(' or a recursion variable)",
            )),
        }
    }
}

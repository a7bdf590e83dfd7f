//! Minimal s-expression reader shared by the IR text form and corpus files.
//!
//! Tokens are `(`, `)`, and whitespace-separated atoms. A `#` starts a
//! comment running to end of line.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::Atom(_) => None,
            Sexp::List(items) => Some(items),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1 }
    }

    fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' => self.pos += 1,
                b'#' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn next(&mut self) -> Token<'a> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        if self.pos >= bytes.len() {
            return Token::Eof;
        }
        match bytes[self.pos] {
            b'(' => {
                self.pos += 1;
                Token::Open
            }
            b')' => {
                self.pos += 1;
                Token::Close
            }
            _ => {
                let start = self.pos;
                while self.pos < bytes.len()
                    && !matches!(bytes[self.pos], b'(' | b')' | b' ' | b'\t' | b'\r' | b'\n' | b'#')
                {
                    self.pos += 1;
                }
                Token::Atom(&self.src[start..self.pos])
            }
        }
    }
}

/// Parse all top-level expressions in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut lex = Lexer::new(src);
    let mut out = Vec::new();
    loop {
        match lex.next() {
            Token::Eof => return Ok(out),
            Token::Open => out.push(parse_list(&mut lex)?),
            Token::Atom(a) => out.push(Sexp::Atom(a.into())),
            Token::Close => {
                return Err(ParseError {
                    line: lex.line,
                    message: "unbalanced ')'".into(),
                })
            }
        }
    }
}

fn parse_list(lex: &mut Lexer<'_>) -> Result<Sexp, ParseError> {
    let mut items = Vec::new();
    loop {
        match lex.next() {
            Token::Open => items.push(parse_list(lex)?),
            Token::Close => return Ok(Sexp::List(items)),
            Token::Atom(a) => items.push(Sexp::Atom(a.into())),
            Token::Eof => {
                return Err(ParseError {
                    line: lex.line,
                    message: "unexpected end of input inside list".into(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_lists() {
        let got = parse_all("(a (b c) 3) atom").unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[1], Sexp::Atom("atom".into()));
        let items = got[0].list().unwrap();
        assert_eq!(items[0].atom(), Some("a"));
        assert_eq!(items[1].list().unwrap().len(), 2);
    }

    #[test]
    fn comments_are_skipped() {
        let got = parse_all("# header\n(x) # trailing\n").unwrap();
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_all("(a\n(b\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_all("\n)").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn operator_atoms() {
        let got = parse_all("(<< x 2) (&& a b)").unwrap();
        assert_eq!(got[0].list().unwrap()[0].atom(), Some("<<"));
        assert_eq!(got[1].list().unwrap()[0].atom(), Some("&&"));
    }
}

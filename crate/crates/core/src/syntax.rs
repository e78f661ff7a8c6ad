// SPDX-License-Identifier: Apache-2.0

//! Tokenizer and cursor shared by the term, formula, system and model parsers.

use std::fmt;

use crate::error::{Error, Position, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Var(String),
    Int(usize),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Slash,
    Arrow,
    Turnstile,
    Amp,
    Pipe,
    Bang,
    Implies,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Var(s) => write!(f, "`?{s}`"),
            Token::Int(n) => write!(f, "`{n}`"),
            Token::Str(s) => write!(f, "\"{s}\""),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::LBrace => f.write_str("`{`"),
            Token::RBrace => f.write_str("`}`"),
            Token::LBracket => f.write_str("`[`"),
            Token::RBracket => f.write_str("`]`"),
            Token::Comma => f.write_str("`,`"),
            Token::Semi => f.write_str("`;`"),
            Token::Colon => f.write_str("`:`"),
            Token::Slash => f.write_str("`/`"),
            Token::Arrow => f.write_str("`->`"),
            Token::Turnstile => f.write_str("`|-`"),
            Token::Amp => f.write_str("`&`"),
            Token::Pipe => f.write_str("`|`"),
            Token::Bang => f.write_str("`!`"),
            Token::Implies => f.write_str("`=>`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<(Token, Position)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    let err = |line, column, message: String| Error::Syntax {
        pos: Position { line, column },
        message,
    };

    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        // comments run to end of line
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two = |next: char| chars.get(i + 1) == Some(&next);
        let (tok, len) = if is_ident_start(c) {
            let start = i;
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Token::Ident(chars[start..j].iter().collect()), j - start)
        } else if c == '?' {
            let mut j = i + 1;
            if j >= chars.len() || !is_ident_start(chars[j]) {
                return Err(err(line, col, "expected variable name after `?`".into()));
            }
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Token::Var(chars[i + 1..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let n = digits
                .parse()
                .map_err(|_| err(line, col, format!("integer `{digits}` out of range")))?;
            (Token::Int(n), j - i)
        } else if c == '"' {
            let mut j = i + 1;
            let mut s = String::new();
            while j < chars.len() && chars[j] != '"' {
                if chars[j] == '\n' {
                    return Err(err(line, col, "unterminated string literal".into()));
                }
                s.push(chars[j]);
                j += 1;
            }
            if j >= chars.len() {
                return Err(err(line, col, "unterminated string literal".into()));
            }
            (Token::Str(s), j + 1 - i)
        } else {
            match c {
                '(' => (Token::LParen, 1),
                ')' => (Token::RParen, 1),
                '{' => (Token::LBrace, 1),
                '}' => (Token::RBrace, 1),
                '[' => (Token::LBracket, 1),
                ']' => (Token::RBracket, 1),
                ',' => (Token::Comma, 1),
                ';' => (Token::Semi, 1),
                ':' => (Token::Colon, 1),
                '/' => (Token::Slash, 1),
                '&' => (Token::Amp, 1),
                '!' => (Token::Bang, 1),
                '-' if two('>') => (Token::Arrow, 2),
                '|' if two('-') => (Token::Turnstile, 2),
                '|' => (Token::Pipe, 1),
                '=' if two('>') => (Token::Implies, 2),
                other => return Err(err(line, col, format!("unexpected character `{other}`"))),
            }
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    out.push((Token::Eof, Position { line, column: col }));
    Ok(out)
}

/// A peekable view over a token stream with error helpers.
pub struct Cursor {
    tokens: Vec<(Token, Position)>,
    at: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self> {
        Ok(Cursor {
            tokens: tokenize(text)?,
            at: 0,
        })
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.at].0
    }

    pub fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.at + offset).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    pub fn pos(&self) -> Position {
        self.tokens[self.at].1
    }

    pub fn next(&mut self) -> Token {
        let tok = self.tokens[self.at].0.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    pub fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    pub fn expect(&mut self, tok: &Token) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Token::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    pub fn expect_keyword(&mut self, word: &str) -> Result<()> {
        match self.peek() {
            Token::Ident(s) if s == word => {
                self.next();
                Ok(())
            }
            other => self.error(format!("expected `{word}`, found {other}")),
        }
    }

    pub fn expect_int(&mut self) -> Result<usize> {
        match self.peek().clone() {
            Token::Int(n) => {
                self.next();
                Ok(n)
            }
            other => self.error(format!("expected integer, found {other}")),
        }
    }

    pub fn expect_str(&mut self) -> Result<String> {
        match self.peek().clone() {
            Token::Str(s) => {
                self.next();
                Ok(s)
            }
            other => self.error(format!("expected string literal, found {other}")),
        }
    }

    pub fn expect_eof(&mut self) -> Result<()> {
        match self.peek() {
            Token::Eof => Ok(()),
            other => self.error(format!("unexpected {other} after end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_rules_and_formulas() {
        let toks: Vec<Token> = tokenize("has(?m), x -> y; |- z => !a | b & c // note")
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        assert_eq!(
            toks,
            vec![
                Token::Ident("has".into()),
                Token::LParen,
                Token::Var("m".into()),
                Token::RParen,
                Token::Comma,
                Token::Ident("x".into()),
                Token::Arrow,
                Token::Ident("y".into()),
                Token::Semi,
                Token::Turnstile,
                Token::Ident("z".into()),
                Token::Implies,
                Token::Bang,
                Token::Ident("a".into()),
                Token::Pipe,
                Token::Ident("b".into()),
                Token::Amp,
                Token::Ident("c".into()),
                Token::Eof,
            ]
        );
    }

    #[test]
    fn reports_position_of_bad_character() {
        match tokenize("a\n  b $") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, Position { line: 2, column: 5 }),
            other => panic!("unexpected {other:?}"),
        }
    }
}

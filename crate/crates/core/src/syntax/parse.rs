// SPDX-License-Identifier: Apache-2.0

//! Lexer and recursive-descent parser for terms and types.
//!
//! ```text
//! term    := join
//! join    := unit { ";" ( jump "->" unit | unit ) }
//! unit    := "[" term "]" "." term
//!          | "<" var [ ":" vtype ] ">" "." term
//!          | postfix
//! postfix := atom { "^" jump }
//! atom    := var | jump | "(" term ")"
//! jump    := "*" | "#" ident
//!
//! vtype   := vector "=>" choice
//! choice  := vector "." jump { "+" vector "." jump }
//! vector  := "1" | ( "(" vtype ")" )+
//! ```
//!
//! Prefix bodies extend as far right as possible, so `<x>.N ; #j -> M`
//! reads as `<x>.(N ; #j -> M)`. Input vectors of types are written in pop
//! order (top of stack first); output vectors bottom to top.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{Jump, Term, Var};
use crate::types::{ChoiceType, StackType, ValueType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Jump(Jump),
    One,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LParen,
    RParen,
    Dot,
    Semi,
    Arrow,
    FatArrow,
    Caret,
    Colon,
    Plus,
    Backslash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Jump(j) => write!(f, "`{j}`"),
            Tok::One => f.write_str("`1`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::LAngle => f.write_str("`<`"),
            Tok::RAngle => f.write_str("`>`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, what: &str, found: String| ParseError {
        line,
        column,
        expected: vec![what.to_string()],
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Tok::Arrow
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                adv = 2;
                Tok::FatArrow
            }
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '<' => Tok::LAngle,
            '>' => Tok::RAngle,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => Tok::Dot,
            ';' => Tok::Semi,
            '^' => Tok::Caret,
            ':' => Tok::Colon,
            '+' => Tok::Plus,
            '\\' => Tok::Backslash,
            '*' => Tok::Jump(Jump::Skip),
            '1' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric()) => Tok::One,
            '#' => {
                let start = i + 1;
                let mut end = start;
                if !chars.get(start).is_some_and(|c| c.is_ascii_alphabetic()) {
                    let found = chars.get(start).map_or("end of input".into(), |c| format!("`{c}`"));
                    return Err(err(l0, c0 + 1, "jump name", found));
                }
                while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '_') {
                    end += 1;
                }
                adv = end - i;
                Tok::Jump(Jump::named(chars[start..end].iter().collect::<String>()))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = i;
                while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '_') {
                    end += 1;
                }
                adv = end - i;
                Tok::Ident(chars[i..end].iter().collect())
            }
            other => return Err(err(l0, c0, "a token", format!("`{other}`"))),
        };
        out.push(Token { tok, line: l0, column: c0 });
        i += adv;
        col += adv;
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error(&["end of input"])),
        }
    }

    pub fn var(&mut self) -> Result<Var, ParseError> {
        match self.peek() {
            Tok::Ident(s) if Var::is_valid_name(s) => {
                let v = Var::new(s.clone());
                self.bump();
                Ok(v)
            }
            _ => Err(self.error(&["variable"])),
        }
    }

    pub fn jump(&mut self) -> Result<Jump, ParseError> {
        match self.peek() {
            Tok::Jump(j) => {
                let j = j.clone();
                self.bump();
                Ok(j)
            }
            _ => Err(self.error(&["jump"])),
        }
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        let mut left = self.unit()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            if matches!(self.peek(), Tok::Jump(_)) && *self.peek_at(1) == Tok::Arrow {
                let j = self.jump()?;
                self.bump();
                let rhs = self.unit()?;
                left = Term::join(left, j, rhs);
            } else {
                let rhs = self.unit()?;
                left = Term::seq(left, rhs);
            }
        }
        Ok(left)
    }

    fn unit(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::LBrack => {
                self.bump();
                let arg = self.term()?;
                self.expect(Tok::RBrack)?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Term::push(arg, body))
            }
            Tok::LAngle => {
                self.bump();
                let x = self.var()?;
                let ann = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.value_type()?)
                } else {
                    None
                };
                self.expect(Tok::RAngle)?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Term::Pop(x, ann, Box::new(body)))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let j = self.jump()?;
            t = Term::looped(t, j);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Ident(_) => Ok(Term::Var(self.var()?)),
            Tok::Jump(_) => Ok(Term::Jump(self.jump()?)),
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.error(&["variable", "jump", "`(`", "`[`", "`<`"])),
        }
    }

    pub fn value_type(&mut self) -> Result<ValueType, ParseError> {
        let mut input = self.vector()?;
        // written in pop order; stored bottom to top
        input.0.reverse();
        self.expect(Tok::FatArrow)?;
        let output = self.choice()?;
        Ok(ValueType { input, output })
    }

    fn choice(&mut self) -> Result<ChoiceType, ParseError> {
        let mut map = BTreeMap::new();
        loop {
            let v = self.vector()?;
            self.expect(Tok::Dot)?;
            let at = self.pos;
            let j = self.jump()?;
            if map.insert(j.clone(), v).is_some() {
                self.pos = at;
                return Err(self.error(&["a jump not already in this choice type"]));
            }
            if *self.peek() != Tok::Plus {
                break;
            }
            self.bump();
        }
        Ok(ChoiceType(map))
    }

    fn vector(&mut self) -> Result<StackType, ParseError> {
        if *self.peek() == Tok::One {
            self.bump();
            return Ok(StackType::empty());
        }
        let mut v = Vec::new();
        while *self.peek() == Tok::LParen {
            self.bump();
            v.push(self.value_type()?);
            self.expect(Tok::RParen)?;
        }
        if v.is_empty() {
            return Err(self.error(&["`1`", "`(`"]));
        }
        Ok(StackType(v))
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<ValueType, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.value_type()?;
    p.expect_eof()?;
    Ok(t)
}

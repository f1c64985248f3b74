//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := ("-")? power ;
//! power  := atom ("^" integer)? ;
//! atom   := number | "i" | "z" | "(" expr ")" | func "(" expr ")" ;
//! func   := "exp" | "log" | "sqrt" ;
//! ```
//!
//! `integer` may carry a leading minus sign. Whitespace is insignificant.

use std::fmt;

use num_complex::Complex64;

use super::{AnalyticExpr, Node, MAX_EXPONENT};

/// Syntax error at a 0-based byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn parse(text: &str) -> Result<AnalyticExpr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let root = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("expected operator or end of input"));
    }
    Ok(AnalyticExpr::new(root))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.eat(b'-') {
            Ok(Node::Neg(Box::new(self.power()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let n = self.integer()?;
            Ok(Node::PowInt(Box::new(base), n))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat(b'-');
        self.skip_ws();
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error("expected integer exponent"));
        }
        let digits = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let magnitude: i64 = digits.parse().unwrap_or(i64::MAX);
        if magnitude > i64::from(MAX_EXPONENT) {
            return Err(ParseError {
                offset: start,
                message: format!("exponent magnitude exceeds {MAX_EXPONENT}"),
            });
        }
        let n = magnitude as i32;
        Ok(if negative { -n } else { n })
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        const EXPECTED: &str = "expected number, 'i', 'z', '(' or function";
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let wrap: fn(Box<Node>) -> Node = match ident {
                    "z" => return Ok(Node::Var),
                    "i" => return Ok(Node::Const(Complex64::new(0.0, 1.0))),
                    "exp" => Node::Exp,
                    "log" => Node::Log,
                    "sqrt" => Node::Sqrt,
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            message: format!("unknown identifier '{ident}'; {EXPECTED}"),
                        })
                    }
                };
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(wrap(Box::new(arg)))
            }
            _ => Err(self.error(EXPECTED)),
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let int_digits = self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            if self.digits() + int_digits == 0 {
                return Err(self.error("expected digit"));
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(self.error("expected exponent digits"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Node::Const(Complex64::new(v, 0.0))),
            _ => Err(ParseError { offset: start, message: "number out of range".into() }),
        }
    }
}

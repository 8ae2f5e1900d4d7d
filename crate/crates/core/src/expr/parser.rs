use thiserror::Error;

use super::{BinaryOp, Node, Symbols, UnaryOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("exponent at byte {offset} depends on a coordinate; only constant exponents are supported")]
    NonConstantExponent { offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

pub(super) struct Parser<'a> {
    src: &'a str,
    pos: usize,
    symbols: &'a Symbols,
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, symbols: &'a Symbols) -> Self {
        Self { src, pos: 0, symbols }
    }

    pub(super) fn parse(mut self) -> Result<Node, ParseError> {
        if self.src.trim().is_empty() {
            return Err(self.syntax(0, "empty expression"));
        }
        let node = self.expr()?;
        let (off, tok) = self.next()?;
        if tok != Tok::End {
            return Err(self.syntax(off, "unexpected trailing input"));
        }
        Ok(node)
    }

    fn syntax(&self, offset: usize, message: &str) -> ParseError {
        ParseError::Syntax {
            offset,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Returns the byte offset of the next token together with the token.
    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let Some(&c) = bytes.get(start) else {
            return Ok((start, Tok::End));
        };
        if c.is_ascii_digit() || c == b'.' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = &self.src[start..end];
            let v: f64 = text
                .parse()
                .map_err(|_| self.syntax(start, &format!("malformed number `{text}`")))?;
            self.pos = end;
            return Ok((start, Tok::Num(v)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((start, Tok::Ident(self.src[start..end].to_string())));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok((start, Tok::Op(c as char)));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(self.syntax(start, &format!("unexpected character `{ch}`")))
    }

    fn peek(&mut self) -> Result<(usize, Tok), ParseError> {
        let save = self.pos;
        let t = self.next();
        self.pos = save;
        t
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek()?.1 {
                Tok::Op('+') => BinaryOp::Add,
                Tok::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.next()?;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek()?.1 {
                Tok::Op('*') => BinaryOp::Mul,
                Tok::Op('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.next()?;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek()?.1 {
            Tok::Op('-') => {
                self.next()?;
                Ok(Node::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.next()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if self.peek()?.1 != Tok::Op('^') {
            return Ok(base);
        }
        self.next()?;
        let (offset, _) = self.peek()?;
        let exponent = self.exponent()?;
        if exponent.uses_coords() {
            return Err(ParseError::NonConstantExponent { offset });
        }
        Ok(Node::Pow(Box::new(base), Box::new(exponent)))
    }

    fn exponent(&mut self) -> Result<Node, ParseError> {
        match self.peek()?.1 {
            Tok::Op('-') => {
                self.next()?;
                Ok(Node::Unary(UnaryOp::Neg, Box::new(self.exponent()?)))
            }
            Tok::Op('+') => {
                self.next()?;
                self.exponent()
            }
            _ => self.power(),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            (_, Tok::Op(')')) => Ok(()),
            (off, _) => Err(self.syntax(off, "expected `)`")),
        }
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let (off, tok) = self.next()?;
        match tok {
            Tok::Num(v) => Ok(Node::Const(v)),
            Tok::Op('(') => {
                let inner = self.expr()?;
                self.expect_close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek()?.1 == Tok::Op('(') {
                    self.next()?;
                    let arg = self.expr()?;
                    self.expect_close()?;
                    let op = UnaryOp::from_name(&name).ok_or(ParseError::UnknownFunction { name, offset: off })?;
                    return Ok(Node::Unary(op, Box::new(arg)));
                }
                if let Some(i) = self.symbols.coords.iter().position(|c| *c == name) {
                    Ok(Node::Coord(i))
                } else if let Some(i) = self.symbols.params.iter().position(|c| *c == name) {
                    Ok(Node::Param(i))
                } else if name == "pi" {
                    Ok(Node::Const(std::f64::consts::PI))
                } else {
                    Err(ParseError::UnknownIdentifier { name, offset: off })
                }
            }
            Tok::End => Err(self.syntax(off, "unexpected end of input")),
            Tok::Op(c) => Err(self.syntax(off, &format!("unexpected `{c}`"))),
        }
    }
}

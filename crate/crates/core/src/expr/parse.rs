use super::{Expr, Func, VarScheme};
use crate::error::ParseError;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Semi,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((start, t));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // Exponent only when digits follow, so `2e` lexes as `2` then `e`.
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => toks.push((start, Tok::Num(v))),
                _ => {
                    return Err(ParseError::InvalidNumber {
                        pos: start,
                        text: text.to_string(),
                    })
                }
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((start, Tok::Ident(src[start..i].to_string())));
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                pos: start,
                expected: vec!["an expression"],
                found: format!("`{ch}`"),
            });
        }
    }
    toks.push((src.len(), Tok::End));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    n: usize,
    scheme: VarScheme,
    depth: usize,
}

pub(super) fn parse_components(
    src: &str,
    n: usize,
    scheme: VarScheme,
) -> Result<Vec<Expr>, ParseError> {
    let mut parser = Parser {
        toks: lex(src)?,
        at: 0,
        n,
        scheme,
        depth: 0,
    };
    let mut components = vec![parser.expr()?];
    while parser.peek() == &Tok::Semi {
        parser.bump();
        components.push(parser.expr()?);
    }
    parser.expect(Tok::End, &["`;`", "an operator", "end of input"])?;
    Ok(components)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &[&'static str]) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep { pos: self.pos() });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let base = self.base()?;
        let out = if *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            let exponent = self.factor()?;
            if exponent.max_var().is_some() {
                return Err(ParseError::NonConstantExponent { pos });
            }
            match exponent.eval::<f64>(&[], 0) {
                Ok(c) if c.is_finite() => Expr::pow(base, c),
                _ => return Err(ParseError::NonConstantExponent { pos }),
            }
        } else {
            base
        };
        self.depth -= 1;
        Ok(out)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        const EXPECTED: &[&str] = &["a number", "a variable", "a function", "`(`", "`-`"];
        self.enter()?;
        let pos = self.pos();
        let out = match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Expr::Const(v)
            }
            Tok::Minus => {
                self.bump();
                Expr::neg(self.base()?)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, &["`)`", "an operator"])?;
                e
            }
            Tok::Ident(name) => {
                self.bump();
                self.ident(pos, name)?
            }
            _ => return Err(self.unexpected(EXPECTED)),
        };
        self.depth -= 1;
        Ok(out)
    }

    fn ident(&mut self, pos: usize, name: String) -> Result<Expr, ParseError> {
        match name.as_str() {
            "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
            "e" => return Ok(Expr::Const(std::f64::consts::E)),
            _ => {}
        }
        if let Some(f) = Func::from_name(&name) {
            self.expect(Tok::LParen, &["`(`"])?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, &["`)`", "an operator"])?;
            return Ok(Expr::call(f, arg));
        }
        let (prefix, digits) = name.split_at(1);
        if !matches!(prefix, "u" | "w" | "x")
            || digits.is_empty()
            || !digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(ParseError::UnknownIdentifier { pos, name });
        }
        let out_of_range = || ParseError::VariableOutOfRange {
            pos,
            name: name.clone(),
            arity: self.n,
        };
        let index: usize = digits.parse().map_err(|_| out_of_range())?;
        if index == 0 {
            return Err(out_of_range());
        }
        let slot = match (self.scheme, prefix) {
            (VarScheme::Plain, "u" | "x") if index <= self.n => index - 1,
            (VarScheme::Split { p }, "u") if index <= p => index - 1,
            (VarScheme::Split { p }, "w") if index <= p => p + index - 1,
            (VarScheme::Plain, "w") | (VarScheme::Split { .. }, "x") => {
                return Err(ParseError::UnknownIdentifier { pos, name })
            }
            _ => return Err(out_of_range()),
        };
        Ok(Expr::Var(slot))
    }
}

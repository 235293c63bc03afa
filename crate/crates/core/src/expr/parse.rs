//! Recursive-descent parser for the infix grammar:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' int)?
//! int   := ['-'] digits | '(' ['-'] digits ')'
//! atom  := number | ident | func '(' expr ')' | '(' expr ')'
//! ```

use super::{Expr, ExprError, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Int(i64),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> ExprError {
        ExprError::Parse {
            pos,
            msg: msg.into(),
        }
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>, ExprError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = bytes[start];
        if c.is_ascii_digit() || c == b'.' {
            let mut end = start;
            let mut is_int = true;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end < bytes.len() && bytes[end] == b'.' {
                is_int = false;
                end += 1;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut e = end + 1;
                if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                    e += 1;
                }
                if e < bytes.len() && bytes[e].is_ascii_digit() {
                    is_int = false;
                    while e < bytes.len() && bytes[e].is_ascii_digit() {
                        e += 1;
                    }
                    end = e;
                }
            }
            let text = &self.src[start..end];
            self.pos = end;
            if is_int {
                if let Ok(i) = text.parse::<i64>() {
                    return Ok(Some((start, Tok::Int(i))));
                }
            }
            let v: f64 = text
                .parse()
                .map_err(|_| self.err(start, format!("bad number `{text}`")))?;
            return Ok(Some((start, Tok::Num(v))));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok(Some((start, Tok::Ident(self.src[start..end].to_string()))));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok(Some((start, Tok::Op(c as char))));
        }
        Err(self.err(start, format!("unexpected character `{}`", c as char)))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

pub(super) fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if let Some((pos, t)) = p.toks.get(p.i) {
        return Err(ExprError::Parse {
            pos: *pos,
            msg: format!("unexpected token {t:?}"),
        });
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> ExprError {
        ExprError::Parse {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<(), ExprError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = lhs.add(self.term()?);
            } else if self.eat_op('-') {
                lhs = lhs.sub(self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = lhs.mul(self.unary()?);
            } else if self.eat_op('/') {
                lhs = lhs.div(self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat_op('-') {
            Ok(self.unary()?.neg())
        } else if self.eat_op('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let paren = self.eat_op('(');
        let negative = self.eat_op('-');
        let n = match self.peek() {
            Some(Tok::Int(n)) => *n,
            _ => return Err(self.err("exponent must be an integer literal")),
        };
        self.i += 1;
        if paren {
            self.expect_op(')')?;
        }
        let n = if negative { -n } else { n };
        let n = i32::try_from(n).map_err(|_| self.err("exponent out of range"))?;
        if n == 0 {
            return Err(self.err("exponent must be nonzero"));
        }
        Ok(base.powi(n))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        match tok {
            Tok::Num(v) => {
                self.i += 1;
                Ok(Expr::constant(v))
            }
            Tok::Int(i) => {
                self.i += 1;
                Ok(Expr::constant(i as f64))
            }
            Tok::Ident(name) => {
                self.i += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    let f = Func::from_name(&name)
                        .ok_or_else(|| self.err(format!("unknown function `{name}`")))?;
                    self.i += 1;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    Ok(arg.call(f))
                } else {
                    Ok(Expr::var(&name))
                }
            }
            Tok::Op('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Op(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    #[test]
    fn precedence_and_associativity() {
        let e = parse("1 - 2 - 3").unwrap();
        assert!(matches!(e.node(), Node::Sub(l, _) if matches!(l.node(), Node::Sub(..))));
        let e = parse("-x^2").unwrap();
        assert!(matches!(e.node(), Node::Neg(a) if matches!(a.node(), Node::PowInt(_, 2))));
        let e = parse("a + b * c").unwrap();
        assert!(matches!(e.node(), Node::Add(_, r) if matches!(r.node(), Node::Mul(..))));
    }

    #[test]
    fn exponent_forms() {
        assert_eq!(parse("x^-2").unwrap(), parse("x^(-2)").unwrap());
        assert!(parse("x^0").is_err());
        assert!(parse("x^2.5").is_err());
        assert!(parse("x^y").is_err());
    }

    #[test]
    fn functions_and_numbers() {
        let e = parse("(sin(1/x))^2").unwrap();
        assert_eq!(e.to_string(), "sin(1 / x)^2");
        assert_eq!(parse("1.5e-3").unwrap().as_const(), Some(1.5e-3));
        assert_eq!(parse(".25").unwrap().as_const(), Some(0.25));
    }

    #[test]
    fn errors_carry_positions() {
        match parse("sin(x") {
            Err(ExprError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("foo(x)"), Err(ExprError::Parse { pos: 3, .. })));
        assert!(parse("2 $ 3").is_err());
        assert!(parse("x y").is_err());
        assert!(parse("").is_err());
    }
}

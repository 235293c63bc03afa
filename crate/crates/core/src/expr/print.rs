//! Canonical infix printing. Output re-parses to the same tree for every tree the parser
//! can produce.

use std::fmt;

use super::{Expr, Node};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const PREFIX: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) | Node::Sub(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Neg(_) => PREFIX,
        Node::PowInt(..) => POWER,
        Node::Const(_) | Node::Var(_) | Node::Call(..) => ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{})", -c)
            }
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(v) => f.write_str(v),
            Node::Neg(a) => {
                f.write_str("-")?;
                write_at(f, a, PREFIX)
            }
            Node::Add(a, b) | Node::Sub(a, b) => {
                let op = if matches!(self.node(), Node::Add(..)) { '+' } else { '-' };
                write_at(f, a, SUM)?;
                write!(f, " {op} ")?;
                write_at(f, b, PRODUCT)
            }
            Node::Mul(a, b) | Node::Div(a, b) => {
                let op = if matches!(self.node(), Node::Mul(..)) { '*' } else { '/' };
                write_at(f, a, PRODUCT)?;
                write!(f, " {op} ")?;
                write_at(f, b, PREFIX)
            }
            Node::PowInt(a, n) => {
                write_at(f, a, ATOM)?;
                write!(f, "^{n}")
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

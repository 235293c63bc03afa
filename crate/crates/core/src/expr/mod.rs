//! Immutable symbolic expressions.
//!
//! Trees are built by the infix parser ([`Expr::parse`]), by symbolic differentiation, or by
//! [`Expr::simplify`]. Subtrees are reference counted, so cloning is cheap and trees can be
//! shared across threads.

mod diff;
mod eval;
mod parse;
mod print;
mod simplify;
mod univariate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::interval::IntervalError;

pub use eval::CompiledFn;
pub use univariate::Univariate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("{op} is undefined at {arg}")]
    EvalDomain { op: &'static str, arg: f64 },
    #[error("`{0}` is not differentiable")]
    NotDifferentiable(&'static str),
    #[error("expected a function of one variable, found {0:?}")]
    NotUnivariate(Vec<String>),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Elementary functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Exp,
    Log,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(String),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    /// Integer power with a nonzero exponent.
    PowInt(Expr, i32),
    Call(Func, Expr),
}

#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub(crate) fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn parse(text: &str) -> Result<Self, ExprError> {
        parse::parse(text)
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub(crate) fn var(name: &str) -> Self {
        Self::from_node(Node::Var(name.to_string()))
    }

    pub(crate) fn neg(self) -> Self {
        Self::from_node(Node::Neg(self))
    }

    pub(crate) fn add(self, rhs: Self) -> Self {
        Self::from_node(Node::Add(self, rhs))
    }

    pub(crate) fn sub(self, rhs: Self) -> Self {
        Self::from_node(Node::Sub(self, rhs))
    }

    pub(crate) fn mul(self, rhs: Self) -> Self {
        Self::from_node(Node::Mul(self, rhs))
    }

    pub(crate) fn div(self, rhs: Self) -> Self {
        Self::from_node(Node::Div(self, rhs))
    }

    pub(crate) fn powi(self, n: i32) -> Self {
        debug_assert!(n != 0);
        Self::from_node(Node::PowInt(self, n))
    }

    pub(crate) fn call(self, f: Func) -> Self {
        Self::from_node(Node::Call(f, self))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Neg(a) | Node::PowInt(a, _) | Node::Call(_, a) => a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.size() + b.size()
            }
        }
    }

    pub fn depth(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Neg(a) | Node::PowInt(a, _) | Node::Call(_, a) => a.depth(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depth().max(b.depth())
            }
        }
    }

    /// Free variables in sorted order.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.clone());
            }
            Node::Neg(a) | Node::PowInt(a, _) | Node::Call(_, a) => a.collect_vars(out),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(v) => v == var,
            Node::Neg(a) | Node::PowInt(a, _) | Node::Call(_, a) => a.depends_on(var),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    /// Replace every occurrence of variable `var` with `with`.
    pub fn substitute(&self, var: &str, with: &Expr) -> Expr {
        let node = match self.node() {
            Node::Const(_) => return self.clone(),
            Node::Var(v) if v == var => return with.clone(),
            Node::Var(_) => return self.clone(),
            Node::Neg(a) => Node::Neg(a.substitute(var, with)),
            Node::PowInt(a, n) => Node::PowInt(a.substitute(var, with), *n),
            Node::Call(f, a) => Node::Call(*f, a.substitute(var, with)),
            Node::Add(a, b) => Node::Add(a.substitute(var, with), b.substitute(var, with)),
            Node::Sub(a, b) => Node::Sub(a.substitute(var, with), b.substitute(var, with)),
            Node::Mul(a, b) => Node::Mul(a.substitute(var, with), b.substitute(var, with)),
            Node::Div(a, b) => Node::Div(a.substitute(var, with), b.substitute(var, with)),
        };
        Expr::from_node(node)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

/// Variable lookup used by point and interval evaluation.
pub trait Bindings<V> {
    fn lookup(&self, name: &str) -> Option<V>;
}

impl<V: Copy> Bindings<V> for HashMap<String, V> {
    fn lookup(&self, name: &str) -> Option<V> {
        self.get(name).copied()
    }
}

impl<V: Copy> Bindings<V> for BTreeMap<String, V> {
    fn lookup(&self, name: &str) -> Option<V> {
        self.get(name).copied()
    }
}

impl<V: Copy> Bindings<V> for [(&str, V)] {
    fn lookup(&self, name: &str) -> Option<V> {
        self.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

impl<V: Copy, const N: usize> Bindings<V> for [(&str, V); N] {
    fn lookup(&self, name: &str) -> Option<V> {
        self.as_slice().lookup(name)
    }
}

use std::collections::BTreeMap;

use super::{ChainError, DecompGraph, DecompNode, NodeKind, UnaryKind};
use crate::expr::{Expr, Node};
use crate::interval::Interval;
use crate::scalar::Scalar;

/// An affine form over node values, not yet materialized as a node.
#[derive(Debug, Clone, PartialEq)]
struct Lin<T> {
    /// Sorted by node id, no zero coefficients.
    terms: Vec<(usize, T)>,
    offset: T,
}

impl<T: Scalar> Lin<T> {
    fn constant(c: T) -> Self {
        Self {
            terms: Vec::new(),
            offset: c,
        }
    }

    fn node(id: usize) -> Self {
        Self {
            terms: vec![(id, T::one())],
            offset: T::zero(),
        }
    }

    fn as_const(&self) -> Option<T> {
        self.terms.is_empty().then_some(self.offset)
    }

    fn scale(mut self, c: T) -> Self {
        if c == T::zero() {
            return Self::constant(T::zero());
        }
        for t in &mut self.terms {
            t.1 = t.1 * c;
        }
        self.offset = self.offset * c;
        self
    }

    fn plus(self, other: Self, sign: T) -> Self {
        let mut map: BTreeMap<usize, T> = self.terms.into_iter().collect();
        for (id, c) in other.terms {
            let e = map.entry(id).or_insert(T::zero());
            *e = *e + sign * c;
        }
        Self {
            terms: map.into_iter().filter(|(_, c)| *c != T::zero()).collect(),
            offset: self.offset + sign * other.offset,
        }
    }
}

struct Builder<'a, T> {
    nodes: Vec<DecompNode<T>>,
    vars: BTreeMap<String, usize>,
    inputs: &'a BTreeMap<String, Interval<T>>,
}

impl<T: Scalar> Builder<'_, T> {
    fn push(&mut self, kind: NodeKind<T>) -> usize {
        let id = self.nodes.len();
        let placeholder = Interval::point(T::zero());
        self.nodes.push(DecompNode {
            id,
            kind,
            domain: placeholder,
            inflated_domain: placeholder,
            tau: T::zero(),
            eps: T::zero(),
            d_bound: None,
            d_pwa: None,
            pwa: None,
        });
        id
    }

    fn materialize(&mut self, form: Lin<T>) -> usize {
        if form.offset == T::zero() && form.terms.len() == 1 && form.terms[0].1 == T::one() {
            return form.terms[0].0;
        }
        let (parents, coeffs) = form.terms.into_iter().unzip();
        self.push(NodeKind::Affine {
            parents,
            coeffs,
            offset: form.offset,
        })
    }

    fn unary(&mut self, op: UnaryKind, arg: Lin<T>) -> Lin<T> {
        if let Some(c) = arg.as_const() {
            return Lin::constant(op.apply(c));
        }
        let parent = self.materialize(arg);
        let id = self.push(NodeKind::Unary {
            parent,
            op,
            function: op.function(),
        });
        Lin::node(id)
    }

    fn product(&mut self, p: Lin<T>, q: Lin<T>) -> Lin<T> {
        if let Some(c) = p.as_const() {
            return q.scale(c);
        }
        if let Some(c) = q.as_const() {
            return p.scale(c);
        }
        if p == q {
            return self.unary(UnaryKind::Square, p);
        }
        let sum = p.clone().plus(q.clone(), T::one());
        let diff = p.plus(q, -T::one());
        let quarter = T::lit(0.25);
        let s = self.unary(UnaryKind::Square, sum).scale(quarter);
        let d = self.unary(UnaryKind::Square, diff).scale(quarter);
        s.plus(d, -T::one())
    }

    fn walk(&mut self, e: &Expr) -> Result<Lin<T>, ChainError> {
        Ok(match e.node() {
            Node::Const(c) => Lin::constant(T::lit(*c)),
            Node::Var(v) => {
                let id = *self
                    .vars
                    .get(v)
                    .ok_or_else(|| ChainError::UnboundVariable(v.clone()))?;
                Lin::node(id)
            }
            Node::Neg(a) => self.walk(a)?.scale(-T::one()),
            Node::Add(a, b) => {
                let (a, b) = (self.walk(a)?, self.walk(b)?);
                a.plus(b, T::one())
            }
            Node::Sub(a, b) => {
                let (a, b) = (self.walk(a)?, self.walk(b)?);
                a.plus(b, -T::one())
            }
            Node::Mul(a, b) => {
                let (a, b) = (self.walk(a)?, self.walk(b)?);
                self.product(a, b)
            }
            Node::Div(a, b) => {
                let (a, b) = (self.walk(a)?, self.walk(b)?);
                match b.as_const() {
                    Some(c) => a.scale(T::one() / c),
                    None => {
                        let r = self.unary(UnaryKind::Reciprocal, b);
                        self.product(a, r)
                    }
                }
            }
            Node::PowInt(a, n) => {
                let a = self.walk(a)?;
                match n {
                    1 => a,
                    n => self.unary(UnaryKind::from_power(*n), a),
                }
            }
            Node::Call(f, a) => {
                let op = UnaryKind::from_func(*f)
                    .ok_or_else(|| ChainError::UnsupportedNode(format!("{}(...)", f.name())))?;
                let a = self.walk(a)?;
                self.unary(op, a)
            }
        })
    }
}

impl<T: Scalar> DecompGraph<T> {
    /// Split `e` into input, affine and unary nodes and enclose every node's range over
    /// the box. Only variables that occur in `e` become input nodes.
    pub fn decompose(e: &Expr, inputs: &BTreeMap<String, Interval<T>>) -> Result<Self, ChainError> {
        let mut b = Builder {
            nodes: Vec::new(),
            vars: BTreeMap::new(),
            inputs,
        };
        for v in e.variables() {
            if !b.inputs.contains_key(&v) {
                return Err(ChainError::UnboundVariable(v));
            }
            let id = b.push(NodeKind::Input { name: v.clone() });
            b.vars.insert(v, id);
        }
        let out = b.walk(e)?;
        // the output always gets its own node when it is a bare input or a constant
        let output = if out.terms.len() == 1 && out.offset == T::zero() && out.terms[0].1 == T::one()
            && !matches!(b.nodes[out.terms[0].0].kind, NodeKind::Input { .. })
        {
            out.terms[0].0
        } else {
            let (parents, coeffs) = out.terms.into_iter().unzip();
            b.push(NodeKind::Affine {
                parents,
                coeffs,
                offset: out.offset,
            })
        };
        let used: BTreeMap<String, Interval<T>> = b
            .vars
            .keys()
            .map(|k| (k.clone(), inputs[k]))
            .collect();
        let mut g = DecompGraph {
            nodes: b.nodes,
            output,
            inputs: used,
        };
        g.propagate_domains()?;
        Ok(g)
    }
}

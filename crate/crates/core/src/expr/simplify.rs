use super::{Expr, Func, Node};

fn fold(v: f64) -> Option<Expr> {
    v.is_finite().then(|| Expr::constant(v))
}

impl Expr {
    /// Constant folding plus the additive and multiplicative identities.
    ///
    /// `0 * e` folds to `0` even where `e` would be undefined.
    pub fn simplify(&self) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Neg(a) => {
                let a = a.simplify();
                match a.node() {
                    Node::Const(c) => Expr::constant(-c),
                    Node::Neg(inner) => inner.clone(),
                    Node::Mul(l, r) if l.as_const().is_some() => {
                        Expr::constant(-l.as_const().unwrap_or(0.0)).mul(r.clone()).simplify()
                    }
                    _ => a.neg(),
                }
            }
            Node::Add(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) => fold(x + y).unwrap_or_else(|| a.add(b)),
                    (Some(x), _) if x == 0.0 => b,
                    (_, Some(y)) if y == 0.0 => a,
                    _ => a.add(b),
                }
            }
            Node::Sub(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) => fold(x - y).unwrap_or_else(|| a.sub(b)),
                    (Some(x), _) if x == 0.0 => b.neg().simplify(),
                    (_, Some(y)) if y == 0.0 => a,
                    _ => a.sub(b),
                }
            }
            Node::Mul(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) => fold(x * y).unwrap_or_else(|| a.mul(b)),
                    (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::constant(0.0),
                    (Some(x), _) if x == 1.0 => b,
                    (_, Some(y)) if y == 1.0 => a,
                    (Some(x), _) if x == -1.0 => b.neg().simplify(),
                    (_, Some(y)) if y == -1.0 => a.neg().simplify(),
                    // constants gather on the left
                    (None, Some(_)) => b.mul(a).simplify(),
                    (Some(x), None) => match b.node() {
                        Node::Mul(l, r) if l.as_const().is_some() => {
                            fold(x * l.as_const().unwrap_or(1.0))
                                .map(|c| c.mul(r.clone()).simplify())
                                .unwrap_or_else(|| a.mul(b))
                        }
                        _ => a.mul(b),
                    },
                    _ => a.mul(b),
                }
            }
            Node::Div(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) if y != 0.0 => fold(x / y).unwrap_or_else(|| a.div(b)),
                    (Some(x), _) if x == 0.0 => Expr::constant(0.0),
                    (_, Some(y)) if y == 1.0 => a,
                    _ => a.div(b),
                }
            }
            Node::PowInt(a, n) => {
                let a = a.simplify();
                match (a.node(), *n) {
                    (_, 1) => a,
                    (Node::Const(c), n) => fold(c.powi(n)).unwrap_or_else(|| a.powi(n)),
                    (Node::PowInt(inner, m), n) => match m.checked_mul(n) {
                        Some(1) => inner.clone(),
                        Some(k) => inner.clone().powi(k),
                        None => a.powi(n),
                    },
                    _ => a.powi(*n),
                }
            }
            Node::Call(f, a) => {
                let a = a.simplify();
                let folded = a.as_const().and_then(|c| {
                    let v = match f {
                        Func::Sin => c.sin(),
                        Func::Cos => c.cos(),
                        Func::Sqrt => c.sqrt(),
                        Func::Exp => c.exp(),
                        Func::Log => c.ln(),
                        Func::Abs => c.abs(),
                    };
                    fold(v)
                });
                folded.unwrap_or_else(|| a.call(*f))
            }
        }
    }
}

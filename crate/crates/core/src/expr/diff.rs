use super::{Expr, ExprError, Func, Node};

impl Expr {
    /// Symbolic derivative with respect to `var`, simplified.
    ///
    /// `abs` is rejected whenever its argument depends on `var`.
    pub fn differentiate(&self, var: &str) -> Result<Expr, ExprError> {
        Ok(self.derive(var)?.simplify())
    }

    fn derive(&self, var: &str) -> Result<Expr, ExprError> {
        if !self.depends_on(var) {
            return Ok(Expr::constant(0.0));
        }
        Ok(match self.node() {
            Node::Const(_) => Expr::constant(0.0),
            Node::Var(_) => Expr::constant(1.0),
            Node::Neg(a) => a.derive(var)?.neg(),
            Node::Add(a, b) => a.derive(var)?.add(b.derive(var)?),
            Node::Sub(a, b) => a.derive(var)?.sub(b.derive(var)?),
            Node::Mul(a, b) => {
                let l = a.derive(var)?.mul(b.clone());
                let r = a.clone().mul(b.derive(var)?);
                l.add(r)
            }
            Node::Div(a, b) if !b.depends_on(var) => a.derive(var)?.div(b.clone()),
            // c / g as c * g^-1 keeps higher derivatives in power form
            Node::Div(a, b) if !a.depends_on(var) => a
                .clone()
                .mul(b.derive(var)?)
                .mul(b.clone().powi(-2))
                .neg(),
            Node::Div(a, b) => {
                let num = a
                    .derive(var)?
                    .mul(b.clone())
                    .sub(a.clone().mul(b.derive(var)?));
                num.div(b.clone().powi(2))
            }
            Node::PowInt(a, n) => {
                let outer = match n - 1 {
                    0 => Expr::constant(1.0),
                    m => a.clone().powi(m),
                };
                Expr::constant(f64::from(*n))
                    .mul(outer)
                    .mul(a.derive(var)?)
            }
            Node::Call(f, a) => {
                let inner = a.derive(var)?;
                let outer = match f {
                    Func::Sin => a.clone().call(Func::Cos),
                    Func::Cos => a.clone().call(Func::Sin).neg(),
                    Func::Sqrt => Expr::constant(1.0)
                        .div(Expr::constant(2.0).mul(a.clone().call(Func::Sqrt))),
                    Func::Exp => a.clone().call(Func::Exp),
                    Func::Log => Expr::constant(1.0).div(a.clone()),
                    Func::Abs => return Err(ExprError::NotDifferentiable("abs")),
                };
                outer.mul(inner)
            }
        })
    }
}

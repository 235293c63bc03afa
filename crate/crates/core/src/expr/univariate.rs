use std::fmt;
use std::sync::{Arc, OnceLock};

use super::{CompiledFn, Expr, ExprError};
use crate::interval::Interval;
use crate::scalar::Scalar;

/// Highest derivative order any routine in the crate needs.
pub const MAX_DERIVATIVE: usize = 3;

/// A scalar function of one named variable with lazily cached symbolic derivatives.
///
/// Clones share the derivative cache.
#[derive(Clone)]
pub struct Univariate {
    expr: Expr,
    var: String,
    derivs: Arc<[OnceLock<Result<Expr, ExprError>>; MAX_DERIVATIVE]>,
}

impl Univariate {
    /// Wrap `expr` as a function of `var`. Any other free variable is rejected.
    pub fn new(expr: Expr, var: &str) -> Result<Self, ExprError> {
        let others: Vec<String> = expr.variables().into_iter().filter(|v| v != var).collect();
        if !others.is_empty() {
            return Err(ExprError::NotUnivariate(others));
        }
        Ok(Self {
            expr,
            var: var.to_string(),
            derivs: Arc::new(Default::default()),
        })
    }

    /// Parse `text`, taking its only free variable (or `x` for constants).
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        let expr = Expr::parse(text)?;
        let vars = expr.variables();
        match vars.len() {
            0 => Self::new(expr, "x"),
            1 => {
                let v = vars.into_iter().next().expect("one variable");
                Self::new(expr, &v)
            }
            _ => Err(ExprError::NotUnivariate(vars.into_iter().collect())),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// The `order`-th derivative, `1 ..= 3`. Order 0 returns the function itself.
    pub fn derivative(&self, order: usize) -> Result<&Expr, ExprError> {
        assert!(order <= MAX_DERIVATIVE, "derivative order {order} not cached");
        if order == 0 {
            return Ok(&self.expr);
        }
        let slot = &self.derivs[order - 1];
        slot.get_or_init(|| {
            let prev = self.derivative(order - 1)?;
            prev.differentiate(&self.var)
        })
        .as_ref()
        .map_err(Clone::clone)
    }

    pub fn compile<T: Scalar>(&self) -> CompiledFn<T> {
        self.expr
            .compile(&self.var)
            .expect("univariate by construction")
    }

    pub fn compile_derivative<T: Scalar>(&self, order: usize) -> Result<CompiledFn<T>, ExprError> {
        Ok(self
            .derivative(order)?
            .compile(&self.var)
            .expect("univariate by construction"))
    }

    pub fn eval<T: Scalar>(&self, x: T) -> Result<T, ExprError> {
        self.expr.eval_point(&[(self.var.as_str(), x)])
    }

    pub fn eval_interval<T: Scalar>(&self, x: Interval<T>) -> Result<Interval<T>, ExprError> {
        self.expr.eval_interval(&[(self.var.as_str(), x)])
    }

    /// Sound enclosure of `|f^(order)|` over `domain`, reported as its upper end.
    pub fn derivative_bound<T: Scalar>(&self, order: usize, domain: Interval<T>) -> Result<T, ExprError> {
        let d = self.derivative(order)?;
        Ok(d.eval_interval(&[(self.var.as_str(), domain)])?.mag())
    }
}

impl fmt::Debug for Univariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Univariate({} ↦ {})", self.var, self.expr)
    }
}

impl fmt::Display for Univariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

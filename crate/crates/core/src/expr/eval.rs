use super::{Bindings, Expr, ExprError, Func, Node};
use crate::interval::Interval;
use crate::scalar::Scalar;

impl Expr {
    /// Evaluate at a point. Domain violations (division by zero, `sqrt` of a negative,
    /// `log` of a nonpositive value, overflow) are reported as [`ExprError::EvalDomain`].
    pub fn eval_point<T: Scalar, B: Bindings<T> + ?Sized>(&self, env: &B) -> Result<T, ExprError> {
        let check = |op: &'static str, arg: T, v: T| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(ExprError::EvalDomain {
                    op,
                    arg: arg.to_f64_lossy(),
                })
            }
        };
        match self.node() {
            Node::Const(c) => Ok(T::lit(*c)),
            Node::Var(v) => env
                .lookup(v)
                .ok_or_else(|| ExprError::UnboundVariable(v.clone())),
            Node::Neg(a) => Ok(-a.eval_point(env)?),
            Node::Add(a, b) => {
                let (x, y) = (a.eval_point(env)?, b.eval_point(env)?);
                check("add", x, x + y)
            }
            Node::Sub(a, b) => {
                let (x, y) = (a.eval_point(env)?, b.eval_point(env)?);
                check("sub", x, x - y)
            }
            Node::Mul(a, b) => {
                let (x, y) = (a.eval_point(env)?, b.eval_point(env)?);
                check("mul", x, x * y)
            }
            Node::Div(a, b) => {
                let (x, y) = (a.eval_point(env)?, b.eval_point(env)?);
                if y == T::zero() {
                    return Err(ExprError::EvalDomain { op: "div", arg: 0.0 });
                }
                check("div", y, x / y)
            }
            Node::PowInt(a, n) => {
                let x = a.eval_point(env)?;
                if *n < 0 && x == T::zero() {
                    return Err(ExprError::EvalDomain { op: "pow", arg: 0.0 });
                }
                check("pow", x, x.powi(*n))
            }
            Node::Call(f, a) => {
                let x = a.eval_point(env)?;
                let v = match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt if x < T::zero() => T::nan(),
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Log if x <= T::zero() => T::nan(),
                    Func::Log => x.ln(),
                    Func::Abs => x.abs(),
                };
                check(f.name(), x, v)
            }
        }
    }

    /// Containment-sound enclosure of the expression's range over a box.
    pub fn eval_interval<T: Scalar, B: Bindings<Interval<T>> + ?Sized>(
        &self,
        env: &B,
    ) -> Result<Interval<T>, ExprError> {
        Ok(match self.node() {
            Node::Const(c) => Interval::point(T::lit(*c)),
            Node::Var(v) => env
                .lookup(v)
                .ok_or_else(|| ExprError::UnboundVariable(v.clone()))?,
            Node::Neg(a) => -a.eval_interval(env)?,
            Node::Add(a, b) => a.eval_interval(env)?.try_add(&b.eval_interval(env)?)?,
            Node::Sub(a, b) => a.eval_interval(env)?.try_sub(&b.eval_interval(env)?)?,
            Node::Mul(a, b) => a.eval_interval(env)?.try_mul(&b.eval_interval(env)?)?,
            Node::Div(a, b) => {
                let den = b.eval_interval(env)?.recip()?;
                a.eval_interval(env)?.try_mul(&den)?
            }
            Node::PowInt(a, n) => a.eval_interval(env)?.pow_int(*n)?,
            Node::Call(f, a) => {
                let x = a.eval_interval(env)?;
                match f {
                    Func::Sin => x.sin()?,
                    Func::Cos => x.cos()?,
                    Func::Sqrt => x.sqrt()?,
                    Func::Exp => x.exp()?,
                    Func::Log => x.log()?,
                    Func::Abs => x.abs()?,
                }
            }
        })
    }

    /// Compile into a closure of the single variable `var`.
    ///
    /// The compiled function never fails: domain violations surface as non-finite results,
    /// which callers must check.
    pub fn compile<T: Scalar>(&self, var: &str) -> Result<CompiledFn<T>, ExprError> {
        Ok(CompiledFn {
            f: build(self, var)?,
        })
    }
}

type Closure<T> = Box<dyn Fn(T) -> T + Send + Sync>;

/// A univariate expression lowered to nested closures for fast repeated evaluation.
pub struct CompiledFn<T> {
    f: Closure<T>,
}

impl<T: Scalar> CompiledFn<T> {
    #[inline]
    pub fn call(&self, x: T) -> T {
        (self.f)(x)
    }

    /// Like [`CompiledFn::call`] but rejects non-finite results.
    pub fn eval(&self, x: T) -> Result<T, ExprError> {
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::EvalDomain {
                op: "eval",
                arg: x.to_f64_lossy(),
            })
        }
    }
}

fn build<T: Scalar>(e: &Expr, var: &str) -> Result<Closure<T>, ExprError> {
    Ok(match e.node() {
        Node::Const(c) => {
            let c = T::lit(*c);
            Box::new(move |_| c)
        }
        Node::Var(v) if v == var => Box::new(|x| x),
        Node::Var(v) => return Err(ExprError::UnboundVariable(v.clone())),
        Node::Neg(a) => {
            let a = build::<T>(a, var)?;
            Box::new(move |x| -a(x))
        }
        Node::Add(a, b) => {
            let (a, b) = (build::<T>(a, var)?, build::<T>(b, var)?);
            Box::new(move |x| a(x) + b(x))
        }
        Node::Sub(a, b) => {
            let (a, b) = (build::<T>(a, var)?, build::<T>(b, var)?);
            Box::new(move |x| a(x) - b(x))
        }
        Node::Mul(a, b) => {
            let (a, b) = (build::<T>(a, var)?, build::<T>(b, var)?);
            Box::new(move |x| a(x) * b(x))
        }
        Node::Div(a, b) => {
            let (a, b) = (build::<T>(a, var)?, build::<T>(b, var)?);
            Box::new(move |x| a(x) / b(x))
        }
        Node::PowInt(a, n) => {
            let a = build::<T>(a, var)?;
            let n = *n;
            match n {
                2 => Box::new(move |x| {
                    let v = a(x);
                    v * v
                }),
                -1 => Box::new(move |x| T::one() / a(x)),
                _ => Box::new(move |x| a(x).powi(n)),
            }
        }
        Node::Call(f, a) => {
            let a = build::<T>(a, var)?;
            match f {
                Func::Sin => Box::new(move |x| a(x).sin()),
                Func::Cos => Box::new(move |x| a(x).cos()),
                Func::Sqrt => Box::new(move |x| {
                    let v = a(x);
                    if v < T::zero() {
                        T::nan()
                    } else {
                        v.sqrt()
                    }
                }),
                Func::Exp => Box::new(move |x| a(x).exp()),
                Func::Log => Box::new(move |x| {
                    let v = a(x);
                    if v <= T::zero() {
                        T::nan()
                    } else {
                        v.ln()
                    }
                }),
                Func::Abs => Box::new(move |x| a(x).abs()),
            }
        }
    })
}

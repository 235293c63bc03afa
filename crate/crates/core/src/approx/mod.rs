//! Breakpoint placement for secant (SOS) approximations of univariate functions.
//!
//! * [`method1_breakpoints`]: greedy bisection on the measured secant error ([`eval_err`]).
//! * [`method2_breakpoints`]: closed-form steps from the cubic error bound
//!   [`theorem1_bound`], given a bound on `|f'''|` (see [`certified_d3`]).
//! * [`uniform_breakpoints`]: equally spaced breakpoints, the naive baseline.

pub mod cubic;
mod eval_err;
mod method1;
mod method2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExprError, Univariate};
use crate::interval::Interval;
use crate::pwa::{PwaError, PwaFunction1D};
use crate::scalar::Scalar;

pub use eval_err::eval_err;
pub use method1::method1_points;
pub use method2::{method2_points, segment_bounds, theorem1_bound};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate domain [{lo}, {hi}]")]
    DegenerateDomain { lo: f64, hi: f64 },
    #[error("tolerance unreachable: bisection collapsed at x = {at}")]
    ToleranceUnreachable { at: f64 },
    #[error("third-derivative bound must be nonnegative, got {0}")]
    InvalidD3(f64),
    #[error("no progress possible from x = {at}")]
    DegenerateStep { at: f64 },
    #[error("bound inputs must be nonnegative")]
    NegativeInput,
    #[error("need at least 2 breakpoints, got {0}")]
    BadCount(usize),
    #[error(transparent)]
    Eval(#[from] ExprError),
    #[error(transparent)]
    Pwa(#[from] PwaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Method1Config<T> {
    /// Output tolerance on every segment.
    pub tolerance: T,
    /// Bisection stops once the bracket is narrower than this. `None` means
    /// `max(1e-9, 16 eps) * domain width`.
    pub breakpoint_tolerance: Option<T>,
    pub eval_err_samples: usize,
    /// Golden-section stopping width, relative to the interval width.
    pub refine_tol: T,
}

impl<T: Scalar> Method1Config<T> {
    pub fn new(tolerance: T) -> Self {
        Self {
            tolerance,
            breakpoint_tolerance: None,
            eval_err_samples: 1024,
            refine_tol: T::lit(1e-10),
        }
    }

    pub fn with_breakpoint_tolerance(mut self, dx: T) -> Self {
        self.breakpoint_tolerance = Some(dx);
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.eval_err_samples = n;
        self
    }

    pub fn validate(&self) -> Result<(), ApproxError> {
        if !(self.tolerance > T::zero()) || !self.tolerance.is_finite() {
            return Err(ApproxError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Some(dx) = self.breakpoint_tolerance {
            if !(dx > T::zero()) {
                return Err(ApproxError::InvalidConfig(format!(
                    "breakpoint tolerance must be positive, got {dx}"
                )));
            }
        }
        if self.eval_err_samples < 8 {
            return Err(ApproxError::InvalidConfig(format!(
                "eval_err_samples must be at least 8, got {}",
                self.eval_err_samples
            )));
        }
        if !(self.refine_tol > T::zero()) {
            return Err(ApproxError::InvalidConfig("refine_tol must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn breakpoint_tolerance_for(&self, domain: Interval<T>) -> T {
        self.breakpoint_tolerance
            .unwrap_or_else(|| T::lit(1e-9).max(T::lit(16.0) * T::epsilon()) * domain.width())
    }
}

/// `d3` must bound `|f'''|` over the domain for the result to be certified. The second
/// derivative comes from the function being approximated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Method2Config<T> {
    pub tolerance: T,
    pub d3: T,
}

impl<T: Scalar> Method2Config<T> {
    pub fn new(tolerance: T, d3: T) -> Self {
        Self { tolerance, d3 }
    }

    pub fn validate(&self) -> Result<(), ApproxError> {
        if !(self.tolerance > T::zero()) || !self.tolerance.is_finite() {
            return Err(ApproxError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.d3 >= T::zero()) || !self.d3.is_finite() {
            return Err(ApproxError::InvalidD3(self.d3.to_f64_lossy()));
        }
        Ok(())
    }
}

fn checked<T: Scalar>(c: &crate::expr::CompiledFn<T>) -> impl Fn(T) -> T + '_ {
    move |x| c.call(x)
}

/// Maximum secant error of `f` on `[a, b]`.
pub fn eval_err_expr<T: Scalar>(f: &Univariate, a: T, b: T, cfg: &Method1Config<T>) -> Result<T, ApproxError> {
    let c = f.compile::<T>();
    let g = checked(&c);
    eval_err(&g, a, b, cfg)
}

pub fn method1_breakpoints<T: Scalar>(
    f: &Univariate,
    domain: Interval<T>,
    cfg: &Method1Config<T>,
) -> Result<PwaFunction1D<T>, ApproxError> {
    let c = f.compile::<T>();
    let g = checked(&c);
    let xs = method1_points(&g, domain, cfg)?;
    Ok(PwaFunction1D::interpolate(f, xs)?)
}

pub fn method2_breakpoints<T: Scalar>(
    f: &Univariate,
    domain: Interval<T>,
    cfg: &Method2Config<T>,
) -> Result<PwaFunction1D<T>, ApproxError> {
    let f2 = f.compile_derivative::<T>(2)?;
    let xs = method2_points(&checked(&f2), domain, cfg)?;
    Ok(PwaFunction1D::interpolate(f, xs)?)
}

/// Per-segment cubic bound of a Method 2 style fit, with `|f''|` taken at each left end.
pub fn method2_segment_bounds<T: Scalar>(f: &Univariate, p: &PwaFunction1D<T>, d3: T) -> Result<Vec<T>, ApproxError> {
    let f2 = f.compile_derivative::<T>(2)?;
    let g = checked(&f2);
    Ok(segment_bounds(&g, p.breakpoints(), d3))
}

/// Sound upper bound on `|f'''|` over `domain` from interval evaluation.
pub fn certified_d3<T: Scalar>(f: &Univariate, domain: Interval<T>) -> Result<T, ApproxError> {
    Ok(f.derivative_bound(3, domain)?)
}

/// `n` equally spaced on-graph breakpoints.
pub fn uniform_breakpoints<T: Scalar>(f: &Univariate, domain: Interval<T>, n: usize) -> Result<PwaFunction1D<T>, ApproxError> {
    if n < 2 {
        return Err(ApproxError::BadCount(n));
    }
    Ok(PwaFunction1D::interpolate(f, domain.linspace(n))?)
}

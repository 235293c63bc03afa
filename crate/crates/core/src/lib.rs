//! Piecewise-affine approximation of nonlinear functions with certified error bounds.
//!
//! The crate covers the whole pipeline:
//!
//! * [`interval`] and [`expr`]: interval arithmetic and symbolic expressions with
//!   derivatives, used for domain propagation and derivative bounds.
//! * [`pwa`]: continuous piecewise-affine functions stored as breakpoint/value pairs.
//! * [`approx`]: breakpoint placement by bisection on the secant error, by the closed-form
//!   cubic bound on the secant error, or on a uniform grid.
//! * [`chain`]: decomposition of a multivariate expression into affine and unary nodes,
//!   and propagation of approximation error through the resulting graph.
//! * [`alloc`]: tolerance/breakpoint trade-off curves and the optimal split of a tolerance
//!   or breakpoint budget across the nodes of a graph.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`); the `*64` and `*32`
//! aliases below name the common instantiations.

pub mod alloc;
pub mod approx;
pub mod bench;
pub mod chain;
pub mod expr;
pub mod interval;
pub mod pwa;
pub mod scalar;

pub use expr::{Expr, ExprError, Univariate};
pub use interval::{Interval, IntervalError};
pub use pwa::{PwaError, PwaFunction1D, Segment};
pub use alloc::{AllocError, AllocationResult, Staircase};
pub use approx::{ApproxError, Method1Config, Method2Config};
pub use chain::{ChainError, DecompGraph, DecompNode, ErrorMode, FitMethod, FitSpec, NodeKind, UnaryKind};
pub use scalar::Scalar;

pub type Interval64 = Interval<f64>;
pub type Interval32 = Interval<f32>;
pub type Pwa64 = PwaFunction1D<f64>;
pub type Pwa32 = PwaFunction1D<f32>;
pub type Graph64 = DecompGraph<f64>;
pub type Graph32 = DecompGraph<f32>;

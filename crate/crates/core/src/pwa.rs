//! Continuous piecewise-affine functions on an interval.
//!
//! A [`PwaFunction1D`] is stored in SOS form: strictly increasing breakpoints and the
//! function value at each one. Segment slopes and intercepts are derived on demand.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExprError, Univariate};
use crate::interval::Interval;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PwaError {
    #[error("a PWA function needs at least 2 breakpoints, got {0}")]
    TooFewBreakpoints(usize),
    #[error("{breakpoints} breakpoints but {values} values")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("breakpoints not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("non-finite breakpoint or value at index {0}")]
    NonFinite(usize),
    #[error("{x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("grid size must be at least 2, got {0}")]
    BadGridSize(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// One affine piece `slope * x + intercept` on `domain`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct Segment<T> {
    pub domain: Interval<T>,
    pub slope: T,
    pub intercept: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawPwa<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct PwaFunction1D<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

#[derive(Deserialize)]
struct RawPwa<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> TryFrom<RawPwa<T>> for PwaFunction1D<T> {
    type Error = PwaError;

    fn try_from(raw: RawPwa<T>) -> Result<Self, Self::Error> {
        Self::new(raw.breakpoints, raw.values)
    }
}

impl<T: Scalar> PwaFunction1D<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self, PwaError> {
        if breakpoints.len() != values.len() {
            return Err(PwaError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if breakpoints.len() < 2 {
            return Err(PwaError::TooFewBreakpoints(breakpoints.len()));
        }
        for (i, (x, y)) in breakpoints.iter().zip(&values).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(PwaError::NonFinite(i));
            }
            if i > 0 && breakpoints[i - 1] >= *x {
                return Err(PwaError::NotIncreasing(i));
            }
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// Interpolate `f` at the given breakpoints (an SOS approximation).
    pub fn interpolate(f: &Univariate, breakpoints: Vec<T>) -> Result<Self, PwaError> {
        let c = f.compile::<T>();
        let values = breakpoints
            .iter()
            .map(|&x| c.eval(x))
            .collect::<Result<Vec<T>, _>>()?;
        Self::new(breakpoints, values)
    }

    /// Same as [`PwaFunction1D::interpolate`] for a plain closure.
    pub fn interpolate_with<F: Fn(T) -> T + ?Sized>(f: &F, breakpoints: Vec<T>) -> Result<Self, PwaError> {
        let values = breakpoints.iter().map(|&x| f(x)).collect();
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_segments(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn domain(&self) -> Interval<T> {
        Interval::new(self.breakpoints[0], self.breakpoints[self.len() - 1])
            .expect("validated breakpoints")
    }

    /// Index `k` of the segment `[x_k, x_{k+1}]` that owns `x`. Interior breakpoints belong
    /// to the segment on their left; `x_0` belongs to the first segment.
    fn segment_index(&self, x: T) -> usize {
        let k = self.breakpoints.partition_point(|&b| b < x);
        k.saturating_sub(1).min(self.num_segments() - 1)
    }

    pub fn eval(&self, x: T) -> Result<T, PwaError> {
        let dom = self.domain();
        if !dom.contains(x) {
            return Err(PwaError::OutOfDomain {
                x: x.to_f64_lossy(),
                lo: dom.lo().to_f64_lossy(),
                hi: dom.hi().to_f64_lossy(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluate at `x` clamped into the domain.
    pub fn eval_clamped(&self, x: T) -> T {
        self.eval_unchecked(self.domain().clamp(x))
    }

    fn eval_unchecked(&self, x: T) -> T {
        let k = self.segment_index(x);
        let (xa, xb) = (self.breakpoints[k], self.breakpoints[k + 1]);
        let (ya, yb) = (self.values[k], self.values[k + 1]);
        if x == xa {
            return ya;
        }
        if x == xb {
            return yb;
        }
        let t = (x - xa) / (xb - xa);
        let y = ya + (yb - ya) * t;
        y.max(ya.min(yb)).min(ya.max(yb))
    }

    pub fn segments(&self) -> Vec<Segment<T>> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| {
                let slope = (y[1] - y[0]) / (x[1] - x[0]);
                Segment {
                    domain: Interval::new(x[0], x[1]).expect("increasing"),
                    slope,
                    intercept: y[0] - slope * x[0],
                }
            })
            .collect()
    }

    /// Largest segment slope magnitude: the Lipschitz constant of the function.
    pub fn max_abs_slope(&self) -> T {
        self.segments()
            .iter()
            .map(|s| s.slope.abs())
            .fold(T::zero(), T::max)
    }

    /// Max of `|p(x) - f(x)|` over a uniform grid of `grid_size` points plus every breakpoint.
    pub fn empirical_max_error(&self, f: &Univariate, grid_size: usize) -> Result<T, PwaError> {
        let c = f.compile::<T>();
        self.empirical_max_error_with(&|x| c.eval(x), grid_size)
    }

    pub fn empirical_max_error_with<F>(&self, f: &F, grid_size: usize) -> Result<T, PwaError>
    where
        F: Fn(T) -> Result<T, ExprError> + ?Sized,
    {
        if grid_size < 2 {
            return Err(PwaError::BadGridSize(grid_size));
        }
        let grid = self.domain().linspace(grid_size);
        let mut worst = T::zero();
        for &x in grid.iter().chain(&self.breakpoints) {
            let e = (self.eval_unchecked(x) - f(x)?).abs();
            worst = worst.max(e);
        }
        Ok(worst)
    }

    /// Whether every breakpoint lies on the graph of `f` within `tol`.
    pub fn is_sos_of(&self, f: &Univariate, tol: T) -> Result<bool, PwaError> {
        let c = f.compile::<T>();
        for (&x, &y) in self.breakpoints.iter().zip(&self.values) {
            if (c.eval(x)? - y).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn f(s: &str) -> Univariate {
        Univariate::parse(s).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(
            PwaFunction1D::new(vec![0.0], vec![0.0]),
            Err(PwaError::TooFewBreakpoints(1))
        );
        assert_eq!(
            PwaFunction1D::new(vec![0.0, 0.0], vec![0.0, 1.0]),
            Err(PwaError::NotIncreasing(1))
        );
        assert!(PwaFunction1D::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(PwaFunction1D::new(vec![0.0, f64::NAN], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn evaluation() {
        let p = PwaFunction1D::new(vec![0.0, 2.0 * PI], vec![0.0, 0.0]).unwrap();
        assert_eq!(p.eval(PI).unwrap(), 0.0);
        let q = PwaFunction1D::interpolate(&f("x^2"), vec![0.0, 1.0]).unwrap();
        assert_eq!(q.eval(0.5).unwrap(), 0.5);
        let r = PwaFunction1D::interpolate(&f("sin(x)"), vec![0.0, 0.3, 1.1, 2.0]).unwrap();
        for k in 0..4 {
            assert_eq!(r.eval(r.breakpoints()[k]).unwrap(), r.values()[k]);
        }
        assert!(matches!(r.eval(2.5), Err(PwaError::OutOfDomain { .. })));
        assert_eq!(r.eval_clamped(2.5), r.values()[3]);
    }

    #[test]
    fn slopes() {
        let p = PwaFunction1D::interpolate(&f("sin(x)"), vec![0.0, PI]).unwrap();
        assert!(p.max_abs_slope() < 1e-15);
        let q = PwaFunction1D::interpolate(&f("x^2"), vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(q.max_abs_slope(), 3.0);
    }

    #[test]
    fn segment_view() {
        let p = PwaFunction1D::interpolate(&f("x"), vec![-1.0, 0.5, 2.0, 7.0]).unwrap();
        let s = p.segments();
        assert_eq!(s.len(), 3);
        for seg in &s {
            assert_eq!(seg.slope, 1.0);
            assert_eq!(seg.intercept, 0.0);
        }
        assert_eq!(s[0].domain.hi(), s[1].domain.lo());
        let one = PwaFunction1D::new(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(one.segments().len(), 1);
    }

    #[test]
    fn secant_of_sine_in_table_two() {
        let lo = 1.0f64 / 3.0;
        let p = PwaFunction1D::interpolate(&f("sin(w)"), vec![lo, 1.0]).unwrap();
        let s = p.segments()[0];
        assert!((s.slope - 0.771).abs() < 1e-3);
        assert!((s.intercept - 0.0701).abs() < 1e-4);
    }

    #[test]
    fn empirical_error() {
        let aff = f("3*x - 1");
        let p = PwaFunction1D::interpolate(&aff, vec![-2.0, 0.0, 5.0]).unwrap();
        assert!(p.empirical_max_error(&aff, 101).unwrap() < 1e-12);
        let s = f("sin(x)");
        let q = PwaFunction1D::interpolate(&s, vec![0.0, PI]).unwrap();
        assert!((q.empirical_max_error(&s, 10001).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(q.empirical_max_error(&s, 1), Err(PwaError::BadGridSize(1)));
    }

    #[test]
    fn json_shape() {
        let p = PwaFunction1D::new(vec![0.0, 0.1, 1.0], vec![1.0, 2.0, 0.30000000000000004]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"breakpoints":[0.0,0.1,1.0],"values":[1.0,2.0,0.30000000000000004]}"#);
        let back: PwaFunction1D<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PwaFunction1D<f64>>(r#"{"breakpoints":[1.0,0.0],"values":[0,0]}"#).is_err());
    }
}

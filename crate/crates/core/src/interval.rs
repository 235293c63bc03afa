//! Closed real intervals with containment-sound images of the elementary operations.
//!
//! Every image is computed from endpoint values and interior extrema, then widened by
//! [`Scalar::interval_slack`] relative to each endpoint's magnitude. No directed rounding
//! is used; the relative widening absorbs the rounding of the libm calls involved.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Arguments beyond this magnitude get the trivial `[-1, 1]` image for sin/cos.
const TRIG_REDUCTION_CAP: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
    #[error("interval [{lo}, {hi}] contains zero")]
    DomainContainsZero { lo: f64, hi: f64 },
    #[error("{func} is undefined on part of [{lo}, {hi}]")]
    DomainError { func: &'static str, lo: f64, hi: f64 },
    #[error("inflation amount {0} is negative")]
    NegativeInflation(f64),
}

/// A closed, bounded interval `[lo, hi]` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(IntervalError::InvalidBounds {
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            })
        }
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: T) -> Self {
        Self::new(x, x).expect("finite point")
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        self.lo + (self.hi - self.lo) / T::lit(2.0)
    }

    /// Largest absolute value attained on the interval.
    pub fn mag(&self) -> T {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(T::zero())
    }

    pub fn encloses(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn clamp(&self, x: T) -> T {
        x.max(self.lo).min(self.hi)
    }

    /// Build an image interval and apply the relative outward slack.
    fn image(lo: T, hi: T, func: &'static str) -> Result<Self, IntervalError> {
        let slack = T::interval_slack();
        let lo = lo - slack * lo.abs();
        let hi = hi + slack * hi.abs();
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(IntervalError::DomainError {
                func,
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            })
        }
    }

    fn domain_error(&self, func: &'static str) -> IntervalError {
        IntervalError::DomainError {
            func,
            lo: self.lo.to_f64_lossy(),
            hi: self.hi.to_f64_lossy(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, IntervalError> {
        Self::image(self.lo + other.lo, self.hi + other.hi, "add")
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, IntervalError> {
        Self::image(self.lo - other.hi, self.hi - other.lo, "sub")
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, IntervalError> {
        let p = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ];
        let lo = p.iter().copied().fold(T::infinity(), T::min);
        let hi = p.iter().copied().fold(T::neg_infinity(), T::max);
        Self::image(lo, hi, "mul")
    }

    pub fn try_scale(&self, c: T) -> Result<Self, IntervalError> {
        let (a, b) = (self.lo * c, self.hi * c);
        Self::image(a.min(b), a.max(b), "scale")
    }

    /// Translation by a constant.
    pub fn try_shift(&self, c: T) -> Result<Self, IntervalError> {
        Self::image(self.lo + c, self.hi + c, "shift")
    }

    pub fn recip(&self) -> Result<Self, IntervalError> {
        if self.contains_zero() {
            return Err(IntervalError::DomainContainsZero {
                lo: self.lo.to_f64_lossy(),
                hi: self.hi.to_f64_lossy(),
            });
        }
        Self::image(T::one() / self.hi, T::one() / self.lo, "recip")
    }

    /// Integer power. Negative exponents go through [`Interval::recip`].
    pub fn pow_int(&self, n: i32) -> Result<Self, IntervalError> {
        if n == 0 {
            return Ok(Self::point(T::one()));
        }
        if n < 0 {
            return self.pow_int(-n)?.recip();
        }
        let (a, b) = (self.lo.powi(n), self.hi.powi(n));
        if n % 2 == 1 {
            Self::image(a, b, "pow")
        } else if self.contains_zero() {
            Self::image(T::zero(), a.max(b), "pow")
        } else {
            Self::image(a.min(b), a.max(b), "pow")
        }
    }

    pub fn sqrt(&self) -> Result<Self, IntervalError> {
        if self.lo < T::zero() {
            return Err(self.domain_error("sqrt"));
        }
        Self::image(self.lo.sqrt(), self.hi.sqrt(), "sqrt")
    }

    pub fn exp(&self) -> Result<Self, IntervalError> {
        Self::image(self.lo.exp(), self.hi.exp(), "exp")
    }

    pub fn log(&self) -> Result<Self, IntervalError> {
        if self.lo <= T::zero() {
            return Err(self.domain_error("log"));
        }
        Self::image(self.lo.ln(), self.hi.ln(), "log")
    }

    pub fn abs(&self) -> Result<Self, IntervalError> {
        if self.contains_zero() {
            Self::image(T::zero(), self.mag(), "abs")
        } else {
            let (a, b) = (self.lo.abs(), self.hi.abs());
            Self::image(a.min(b), a.max(b), "abs")
        }
    }

    pub fn sin(&self) -> Result<Self, IntervalError> {
        // max at pi/2 + 2k*pi, min at -pi/2 + 2k*pi
        let half_pi = T::FRAC_PI_2();
        self.periodic_image(T::sin, half_pi, -half_pi, "sin")
    }

    pub fn cos(&self) -> Result<Self, IntervalError> {
        // max at 2k*pi, min at pi + 2k*pi
        self.periodic_image(T::cos, T::zero(), T::PI(), "cos")
    }

    fn periodic_image(
        &self,
        f: fn(T) -> T,
        max_phase: T,
        min_phase: T,
        func: &'static str,
    ) -> Result<Self, IntervalError> {
        let cap = T::lit(TRIG_REDUCTION_CAP);
        let full = Self {
            lo: -T::one(),
            hi: T::one(),
        };
        if self.mag() > cap || self.width() >= T::TAU() {
            return Ok(full);
        }
        let (a, b) = (f(self.lo), f(self.hi));
        let lo = if self.hits_phase(min_phase) {
            -T::one()
        } else {
            a.min(b)
        };
        let hi = if self.hits_phase(max_phase) {
            T::one()
        } else {
            a.max(b)
        };
        let img = Self::image(lo, hi, func)?;
        Ok(Self {
            lo: img.lo.max(-T::one()),
            hi: img.hi.min(T::one()),
        })
    }

    /// Whether some `phase + 2k*pi` lies in the interval.
    fn hits_phase(&self, phase: T) -> bool {
        let tau = T::TAU();
        let k = ((self.lo - phase) / tau).ceil();
        let p = phase + k * tau;
        p <= self.hi
    }

    /// `[lo - eps, hi + eps]`.
    pub fn inflate(&self, eps: T) -> Result<Self, IntervalError> {
        if eps < T::zero() || eps.is_nan() {
            return Err(IntervalError::NegativeInflation(eps.to_f64_lossy()));
        }
        Self::new(self.lo - eps, self.hi + eps)
    }

    /// `n` equally spaced points from `lo` to `hi`, both endpoints exact.
    pub fn linspace(&self, n: usize) -> Vec<T> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => {
                let step = self.width() / T::of_usize(n - 1);
                let mut v: Vec<T> = (0..n).map(|i| self.lo + step * T::of_usize(i)).collect();
                v[n - 1] = self.hi;
                v
            }
        }
    }
}

impl<T: Scalar> Add for Interval<T> {
    type Output = Interval<T>;

    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("interval sum overflowed")
    }
}

impl<T: Scalar> Sub for Interval<T> {
    type Output = Interval<T>;

    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("interval difference overflowed")
    }
}

impl<T: Scalar> Mul for Interval<T> {
    type Output = Interval<T>;

    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("interval product overflowed")
    }
}

impl<T: Scalar> Neg for Interval<T> {
    type Output = Interval<T>;

    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

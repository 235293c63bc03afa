//! Breakpoint placement from the closed-form cubic bound on the secant error.
//!
//! For a `C^3` function with `|f'''| <= d3` on the domain, the secant over `[a, a + w]`
//! deviates from `f` by at most `(d3 / 8) w^3 + (|f''(a)| / 8) w^2`. Each step solves that
//! bound for the widest admissible `w`, so no error evaluation is needed.

use super::cubic::real_roots;
use super::{ApproxError, Method2Config};
use crate::interval::Interval;
use crate::scalar::Scalar;

/// `(d3 / 8) width^3 + (d2 / 8) width^2`.
pub fn theorem1_bound<T: Scalar>(d2: T, d3: T, width: T) -> Result<T, ApproxError> {
    if d2 < T::zero() || d3 < T::zero() || width < T::zero() || d2.is_nan() || d3.is_nan() || width.is_nan() {
        return Err(ApproxError::NegativeInput);
    }
    Ok(cubic_bound(d2, d3, width))
}

#[inline]
fn cubic_bound<T: Scalar>(d2: T, d3: T, w: T) -> T {
    let eighth = T::lit(0.125);
    eighth * d3 * w * w * w + eighth * d2 * w * w
}

/// Largest step `w` in `(0, max_width)` with `bound(w) = tau`, shrunk so that the bound
/// evaluates to at most `tau` in floating point.
fn step_width<T: Scalar>(d2: T, d3: T, tau: T, max_width: T) -> Option<T> {
    let eighth = T::lit(0.125);
    let roots = real_roots(eighth * d3, eighth * d2, T::zero(), -tau);
    let mut w = roots
        .into_iter()
        .filter(|&r| r > T::zero() && r.is_finite())
        .fold(None, |acc: Option<T>, r| Some(acc.map_or(r, |a| a.max(r))))?;
    w = w.min(max_width);
    // the bound is increasing in w: polish with safeguarded Newton on [0, w_hi]
    let (mut lo, mut hi) = (T::zero(), max_width);
    for _ in 0..64 {
        let g = cubic_bound(d2, d3, w) - tau;
        if g.abs() <= T::lit(1e-12) * tau {
            break;
        }
        if g > T::zero() {
            hi = hi.min(w);
        } else {
            lo = lo.max(w);
        }
        let dg = T::lit(0.375) * d3 * w * w + T::lit(0.25) * d2 * w;
        let newton = w - g / dg;
        w = if dg > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
    }
    let shrink = T::one() - T::lit(4.0) * T::epsilon();
    while cubic_bound(d2, d3, w) > tau && w > T::zero() {
        w = w * shrink;
    }
    Some(w)
}

/// Breakpoints for `f` given its second derivative `f2` and `cfg.d3 >= max |f'''|`.
pub fn method2_points<T, F2>(f2: &F2, domain: Interval<T>, cfg: &Method2Config<T>) -> Result<Vec<T>, ApproxError>
where
    T: Scalar,
    F2: Fn(T) -> T + ?Sized,
{
    cfg.validate()?;
    let (lo, hi) = (domain.lo(), domain.hi());
    if !(lo < hi) {
        return Err(ApproxError::DegenerateDomain {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let (tau, d3) = (cfg.tolerance, cfg.d3);
    let curvature = |x: T| -> Result<T, ApproxError> {
        let v = f2(x);
        if v.is_finite() {
            Ok(v.abs())
        } else {
            Err(ApproxError::Eval(crate::expr::ExprError::EvalDomain {
                op: "f''",
                arg: x.to_f64_lossy(),
            }))
        }
    };
    let min_step = T::lit(1e-12) * (hi - lo);

    let mut points = vec![lo];
    let mut xk = lo;
    let mut d2 = curvature(xk)?;
    let mut e = cubic_bound(d2, d3, hi - xk);
    while e > tau {
        let w = step_width(d2, d3, tau, hi - xk).ok_or(ApproxError::DegenerateStep {
            at: xk.to_f64_lossy(),
        })?;
        if w <= min_step {
            return Err(ApproxError::DegenerateStep {
                at: xk.to_f64_lossy(),
            });
        }
        let mut w = w;
        let mut next = xk + w;
        // the stored width next - xk can round above w; back off one ulp at a time
        while next > xk && cubic_bound(d2, d3, next - xk) > tau {
            w = w - (next.abs() * T::epsilon()).max(T::min_positive_value());
            next = xk + w;
        }
        if next >= hi {
            break;
        }
        xk = next;
        points.push(xk);
        d2 = curvature(xk)?;
        e = cubic_bound(d2, d3, hi - xk);
    }
    points.push(hi);
    Ok(points)
}

/// Per-segment value of the cubic bound, using `|f''|` at each segment's left end.
pub fn segment_bounds<T, F2>(f2: &F2, breakpoints: &[T], d3: T) -> Vec<T>
where
    T: Scalar,
    F2: Fn(T) -> T + ?Sized,
{
    breakpoints
        .windows(2)
        .map(|w| cubic_bound(f2(w[0]).abs(), d3, w[1] - w[0]))
        .collect()
}

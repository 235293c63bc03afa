//! Greedy breakpoint placement by bisection on the secant error.
//!
//! Starting from the left end of the domain, each new breakpoint is pushed as far right as
//! the tolerance allows: the secant error over `[x_k, m]` is bisected on `m` until the
//! bracket is narrower than the breakpoint tolerance and the last evaluated error is within
//! tolerance. The next breakpoint is the lower end of the bracket, whose error is known to
//! be within tolerance.

use super::eval_err::eval_err_below;
use super::{ApproxError, Method1Config};
use crate::interval::Interval;
use crate::scalar::Scalar;

const MAX_BISECTION_STEPS: usize = 10_000;

/// Breakpoints (both domain endpoints included) of a secant chain meeting `cfg.tolerance`.
pub fn method1_points<T, F>(f: &F, domain: Interval<T>, cfg: &Method1Config<T>) -> Result<Vec<T>, ApproxError>
where
    T: Scalar,
    F: Fn(T) -> T + ?Sized,
{
    cfg.validate()?;
    let (lo, hi) = (domain.lo(), domain.hi());
    if !(lo < hi) {
        return Err(ApproxError::DegenerateDomain {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let tau = cfg.tolerance;
    let dx = cfg.breakpoint_tolerance_for(domain);
    let two = T::lit(2.0);

    let mut points = vec![lo];
    let mut xk = lo;
    let mut e = eval_err_below(f, xk, hi, cfg, tau)?.unwrap_or_else(T::infinity);
    while e > tau {
        let (mut l, mut u) = (xk, hi);
        let mut m = (l + u) / two;
        let mut steps = 0;
        // `e` is stale on entry (it exceeds tau), so the body always runs
        while u - l > dx || e > tau {
            // only the comparison with tau matters, so the scan may stop early
            e = eval_err_below(f, xk, m, cfg, tau)?.unwrap_or_else(T::infinity);
            if e < tau {
                l = m;
            } else if e > tau {
                u = m;
            } else {
                l = m;
                u = m;
            }
            let next = (l + u) / two;
            steps += 1;
            if e > tau && (next <= l || next >= u || steps > MAX_BISECTION_STEPS) {
                return Err(ApproxError::ToleranceUnreachable {
                    at: xk.to_f64_lossy(),
                });
            }
            m = next;
        }
        if l <= xk {
            return Err(ApproxError::ToleranceUnreachable {
                at: xk.to_f64_lossy(),
            });
        }
        xk = l;
        if xk >= hi {
            break;
        }
        points.push(xk);
        e = eval_err_below(f, xk, hi, cfg, tau)?.unwrap_or_else(T::infinity);
    }
    points.push(hi);
    Ok(points)
}

//! Maximum deviation between a function and its secant over an interval.
//!
//! The maximum is located by a uniform scan followed by golden-section refinement of the
//! most promising local maxima. This is not a certified global optimizer: a spike narrower
//! than the scan spacing can be missed. Raise `eval_err_samples` for rough functions.

use super::{ApproxError, Method1Config};

use crate::expr::ExprError;
use crate::scalar::Scalar;

/// How many local maxima of the coarse scan get refined.
const MAX_REFINED_PEAKS: usize = 8;
const MAX_GOLDEN_ITERS: usize = 200;

fn finite<T: Scalar>(x: T, v: T) -> Result<T, ApproxError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ApproxError::Eval(ExprError::EvalDomain {
            op: "eval",
            arg: x.to_f64_lossy(),
        }))
    }
}

/// `max_{x in [a, b]} |secant(x) - f(x)|` where the secant interpolates `f` at `a` and `b`.
pub fn eval_err<T, F>(f: &F, a: T, b: T, cfg: &Method1Config<T>) -> Result<T, ApproxError>
where
    T: Scalar,
    F: Fn(T) -> T + ?Sized,
{
    Ok(measure(f, a, b, cfg, None)?.unwrap_or_else(T::infinity))
}

/// Like [`eval_err`], but returns `None` as soon as some sample exceeds `tau`.
pub(crate) fn eval_err_below<T, F>(f: &F, a: T, b: T, cfg: &Method1Config<T>, tau: T) -> Result<Option<T>, ApproxError>
where
    T: Scalar,
    F: Fn(T) -> T + ?Sized,
{
    measure(f, a, b, cfg, Some(tau))
}

fn measure<T, F>(f: &F, a: T, b: T, cfg: &Method1Config<T>, cutoff: Option<T>) -> Result<Option<T>, ApproxError>
where
    T: Scalar,
    F: Fn(T) -> T + ?Sized,
{
    if !(a < b) {
        return Err(ApproxError::DegenerateDomain {
            lo: a.to_f64_lossy(),
            hi: b.to_f64_lossy(),
        });
    }
    let fa = finite(a, f(a))?;
    let fb = finite(b, f(b))?;
    let slope = (fb - fa) / (b - a);
    let gap = |x: T| -> Result<T, ApproxError> {
        let fx = finite(x, f(x))?;
        Ok((fa + slope * (x - a) - fx).abs())
    };
    let above = |v: T| cutoff.is_some_and(|t| v > t);

    let n = cfg.eval_err_samples.max(3);
    let step = (b - a) / T::of_usize(n - 1);
    let xs: Vec<T> = (0..n)
        .map(|i| if i == n - 1 { b } else { a + step * T::of_usize(i) })
        .collect();
    let mut es = Vec::with_capacity(n);
    for &x in &xs {
        let e = gap(x)?;
        if above(e) {
            return Ok(None);
        }
        es.push(e);
    }

    let mut best = es.iter().copied().fold(T::zero(), T::max);
    // interior local maxima; plateaus contribute their right edge
    let mut peaks: Vec<usize> = (1..n - 1)
        .filter(|&i| es[i] > T::zero() && es[i] >= es[i - 1] && es[i] > es[i + 1])
        .collect();
    peaks.sort_by(|&i, &j| es[j].partial_cmp(&es[i]).expect("finite errors"));
    peaks.truncate(MAX_REFINED_PEAKS);

    let tol = cfg.refine_tol * (b - a);
    for i in peaks {
        let v = golden_max(&gap, xs[i - 1], xs[i + 1], tol)?;
        best = best.max(v);
        if above(best) {
            return Ok(None);
        }
    }
    Ok(Some(best))
}

/// Golden-section search for the maximum of `g` on `[lo, hi]`; returns the best value seen.
fn golden_max<T, G>(g: &G, mut lo: T, mut hi: T, tol: T) -> Result<T, ApproxError>
where
    T: Scalar,
    G: Fn(T) -> Result<T, ApproxError>,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut g1 = g(x1)?;
    let mut g2 = g(x2)?;
    let mut best = g1.max(g2);
    for _ in 0..MAX_GOLDEN_ITERS {
        if hi - lo <= tol {
            break;
        }
        if g1 >= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1)?;
            best = best.max(g1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2)?;
            best = best.max(g2);
        }
    }
    Ok(best)
}

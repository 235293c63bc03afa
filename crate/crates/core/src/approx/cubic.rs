//! Real roots of polynomials up to degree three.

use crate::scalar::Scalar;

fn horner<T: Scalar>(c: &[T; 4], x: T) -> (T, T) {
    let p = ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
    let dp = (T::lit(3.0) * c[0] * x + T::lit(2.0) * c[1]) * x + c[2];
    (p, dp)
}

/// Real roots of `a x^3 + b x^2 + c x + d`, ascending, repeated roots reported once.
///
/// Uses the trigonometric form when there are three real roots and Cardano's formula
/// otherwise, followed by one Newton step on the original polynomial per root. Lower degree
/// polynomials (leading coefficients zero) are handled directly; the zero polynomial yields
/// no roots.
pub fn real_roots<T: Scalar>(a: T, b: T, c: T, d: T) -> Vec<T> {
    let mut roots = if a == T::zero() {
        quadratic_roots(b, c, d)
    } else {
        depressed_roots(b / a, c / a, d / a)
    };
    let coeffs = [a, b, c, d];
    for r in roots.iter_mut() {
        let (p, dp) = horner(&coeffs, *r);
        if dp != T::zero() {
            let polished = *r - p / dp;
            if polished.is_finite() && horner(&coeffs, polished).0.abs() <= p.abs() {
                *r = polished;
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).expect("finite roots"));
    roots.dedup();
    roots
}

fn quadratic_roots<T: Scalar>(a: T, b: T, c: T) -> Vec<T> {
    if a == T::zero() {
        if b == T::zero() {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        return Vec::new();
    }
    if disc == T::zero() {
        return vec![-b / (T::lit(2.0) * a)];
    }
    // q avoids cancellation between -b and the square root
    let q = -(b + b.signum() * disc.sqrt()) / T::lit(2.0);
    if q == T::zero() {
        return vec![T::zero()];
    }
    vec![q / a, c / q]
}

/// Roots of the monic cubic `x^3 + b x^2 + c x + d`.
fn depressed_roots<T: Scalar>(b: T, c: T, d: T) -> Vec<T> {
    let three = T::lit(3.0);
    let shift = b / three;
    let p = c - b * b / three;
    let q = T::lit(2.0) * b * b * b / T::lit(27.0) - b * c / three + d;
    let half_q = q / T::lit(2.0);
    let third_p = p / three;
    let disc = half_q * half_q + third_p * third_p * third_p;
    if p == T::zero() && q == T::zero() {
        return vec![-shift];
    }
    if disc > T::zero() {
        let s = disc.sqrt();
        let u = (-half_q + s).cbrt();
        let v = (-half_q - s).cbrt();
        vec![u + v - shift]
    } else {
        // three real roots (p < 0 here)
        let r = (-third_p).sqrt();
        let arg = (-half_q / (r * r * r)).max(-T::one()).min(T::one());
        let phi = arg.acos() / three;
        let two_r = T::lit(2.0) * r;
        let step = T::TAU() / three;
        (0..3)
            .map(|k| two_r * (phi - step * T::of_usize(k)).cos() - shift)
            .collect()
    }
}

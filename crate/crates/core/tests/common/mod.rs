#![allow(dead_code)]

use std::collections::BTreeMap;

use pwacomp::alloc::{AllocationResult, Item};
use pwacomp::Staircase;
use rand::Rng;

fn constant<R: Rng>(rng: &mut R) -> String {
    let c: f64 = rng.gen_range(-2.0..2.0);
    format!("({c:?})")
}

/// Random expression of `x`, defined for every real `x`.
pub fn smooth_expr<R: Rng>(rng: &mut R, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) { "x".into() } else { constant(rng) };
    }
    let a = smooth_expr(rng, depth - 1);
    match rng.gen_range(0..11) {
        0 => format!("({a} + {})", smooth_expr(rng, depth - 1)),
        1 => format!("({a} - {})", smooth_expr(rng, depth - 1)),
        2 => format!("({a} * {})", smooth_expr(rng, depth - 1)),
        3 => format!("({a} / (({})^2 + 1))", smooth_expr(rng, depth - 1)),
        4 => format!("({a})^2"),
        5 => format!("({a})^3"),
        6 => format!("sin({a})"),
        7 => format!("cos({a})"),
        8 => format!("exp(sin({a}))"),
        9 => format!("sqrt(({a})^2 + 1)"),
        _ => format!("log(({a})^2 + 1)"),
    }
}

/// Random staircase with up to `max_len` candidates.
pub fn random_staircase<R: Rng>(rng: &mut R, max_len: usize) -> Staircase<f64> {
    let len = rng.gen_range(1..=max_len);
    let mut n = rng.gen_range(2..6) + len;
    let mut tau: f64 = rng.gen_range(1e-4..1e-2);
    let mut candidates = Vec::with_capacity(len);
    for _ in 0..len {
        candidates.push((tau, n));
        tau *= rng.gen_range(1.1..3.0);
        n -= 1;
        if n < 2 {
            break;
        }
    }
    Staircase { node: None, candidates }
}

/// Every selection of one candidate per item: `(bound, tau_sum, total)`.
pub fn enumerate(items: &[Item<'_, f64>]) -> Vec<(f64, f64, usize)> {
    let mut out = vec![(0.0, 0.0, 0usize)];
    for it in items {
        let mut next = Vec::with_capacity(out.len() * it.staircase.len());
        for &(b, s, n) in &out {
            for &(t, k) in &it.staircase.candidates {
                next.push((b + it.coeff * t, s + t, n + k));
            }
        }
        out = next;
    }
    out
}

pub fn brute_p2(items: &[Item<'_, f64>], budget: usize) -> Option<f64> {
    enumerate(items)
        .into_iter()
        .filter(|e| e.2 <= budget)
        .map(|e| e.0)
        .min_by(|a, b| a.total_cmp(b))
}

pub fn brute_p1(items: &[Item<'_, f64>], target: f64) -> Option<usize> {
    enumerate(items)
        .into_iter()
        .filter(|e| e.0 <= target)
        .map(|e| e.2)
        .min()
}

/// `sum coeff_i tau_i` of a result, in node order.
pub fn recompute(res: &AllocationResult<f64>) -> f64 {
    res.choices.iter().fold(0.0, |acc, c| acc + c.coeff * c.tau)
}

pub fn single_box(lo: f64, hi: f64) -> BTreeMap<String, pwacomp::Interval64> {
    [("x".to_string(), pwacomp::Interval64::new(lo, hi).unwrap())].into_iter().collect()
}

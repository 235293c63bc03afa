//! Built-in benchmark problems.

use std::collections::BTreeMap;

use crate::expr::{Expr, Univariate};
use crate::interval::Interval;
use crate::scalar::Scalar;

/// A univariate test function with its domain.
#[derive(Debug, Clone)]
pub struct UnaryBench {
    pub name: &'static str,
    pub text: &'static str,
    pub lo: f64,
    pub hi: f64,
}

impl UnaryBench {
    pub fn function(&self) -> Univariate {
        Univariate::parse(self.text).expect("benchmark expression parses")
    }

    pub fn domain<T: Scalar>(&self) -> Interval<T> {
        Interval::new(T::lit(self.lo), T::lit(self.hi)).expect("benchmark domain")
    }
}

/// sin on [0, 2 pi], x^2 and x^3 on [-5, 5], 1/x on [1, 10].
pub fn table1() -> Vec<UnaryBench> {
    vec![
        UnaryBench {
            name: "sin",
            text: "sin(x)",
            lo: 0.0,
            hi: std::f64::consts::TAU,
        },
        UnaryBench {
            name: "square",
            text: "x^2",
            lo: -5.0,
            hi: 5.0,
        },
        UnaryBench {
            name: "cube",
            text: "x^3",
            lo: -5.0,
            hi: 5.0,
        },
        UnaryBench {
            name: "reciprocal",
            text: "1/x",
            lo: 1.0,
            hi: 10.0,
        },
    ]
}

/// Source locations of the signal-strength example.
pub const TOWERS: [(f64, f64); 4] = [(1.0, 3.0), (-2.0, 2.0), (3.0, 0.0), (-1.0, -4.0)];

fn shifted(var: &str, s: f64) -> String {
    match s {
        s if s == 0.0 => var.to_string(),
        s if s > 0.0 => format!("({var} - {s})"),
        s => format!("({var} + {})", -s),
    }
}

/// `sum_i 1 / (|x - s_i|^2 + 1)` over the towers, written in squared distances.
pub fn tower_text() -> String {
    TOWERS
        .iter()
        .map(|&(a, b)| format!("1 / ({}^2 + {}^2 + 1)", shifted("x1", a), shifted("x2", b)))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn tower_expr() -> Expr {
    Expr::parse(&tower_text()).expect("tower expression parses")
}

/// `x1, x2 in [-5, 5]`.
pub fn tower_box<T: Scalar>() -> BTreeMap<String, Interval<T>> {
    let b = Interval::new(T::lit(-5.0), T::lit(5.0)).expect("box");
    [("x1".to_string(), b), ("x2".to_string(), b)].into_iter().collect()
}

/// Split `total` breakpoints as evenly as possible across `nodes` (earlier nodes get the
/// remainder), each node getting at least 2.
pub fn even_split(nodes: &[usize], total: usize) -> BTreeMap<usize, usize> {
    let k = nodes.len().max(1);
    let (base, extra) = (total / k, total % k);
    nodes
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, (base + usize::from(i < extra)).max(2)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_value() {
        let e = tower_expr();
        let v: f64 = e.eval_point(&[("x1", 1.0), ("x2", 3.0)]).unwrap();
        let direct: f64 = TOWERS
            .iter()
            .map(|&(a, b)| 1.0 / ((1.0 - a).powi(2) + (3.0 - b).powi(2) + 1.0))
            .sum();
        assert!((v - direct).abs() < 1e-15);
        assert!(tower_text().starts_with("1 / ((x1 - 1)^2 + (x2 - 3)^2 + 1)"));
    }

    #[test]
    fn split_sums() {
        let s = even_split(&[3, 5, 7], 163);
        assert_eq!(s.values().sum::<usize>(), 163);
        assert_eq!(s[&3], 55);
        assert_eq!(even_split(&[1, 2], 1), [(1, 2), (2, 2)].into_iter().collect());
    }

    #[test]
    fn table1_parses() {
        for b in table1() {
            let f = b.function();
            assert!(f.eval(b.lo.max(1.0)).is_ok(), "{}", b.name);
        }
    }
}

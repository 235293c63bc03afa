//! Splitting an error or complexity budget across the unary nodes of a decomposition.
//!
//! Each node gets a [`Staircase`]: the tolerances it can meet and the breakpoints each
//! costs. The output error bound is affine in the node tolerances (the coefficients come
//! from [`DecompGraph::sensitivity`]), so
//!
//! * P2 (least bound under a breakpoint budget) is a multi-choice knapsack, solved exactly
//!   by dynamic programming over the budget, and
//! * P1 (fewest breakpoints meeting a bound) is a binary search over the P2 budget.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approx::{self, ApproxError, Method1Config, Method2Config};
use crate::chain::{ChainError, DecompGraph, FitMethod};
use crate::expr::Univariate;
use crate::interval::Interval;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocError {
    #[error("tolerance range must satisfy 0 < lo < hi, got [{lo}, {hi}]")]
    BadRange { lo: f64, hi: f64 },
    #[error("need at least 2 samples, got {0}")]
    BadSamples(usize),
    #[error("staircase for node {0} is empty")]
    EmptyStaircase(usize),
    #[error("no staircase for unary node {0}")]
    MissingStaircase(usize),
    #[error("budget {budget} is below the minimal feasible total {minimum}")]
    InfeasibleBudget { budget: usize, minimum: usize },
    #[error("tolerance {target} is below the best achievable bound {best}")]
    InfeasibleTolerance { target: f64, best: f64 },
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Tolerance/breakpoint trade-off of one function: strictly increasing `tau`, strictly
/// decreasing breakpoint count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Staircase<T> {
    pub node: Option<usize>,
    pub candidates: Vec<(T, usize)>,
}

impl<T: Scalar> Staircase<T> {
    /// Pareto frontier of raw `(tau, count)` samples: for each count the smallest
    /// tolerance reaching it, and only counts that beat every smaller tolerance.
    pub fn from_samples(node: Option<usize>, mut raw: Vec<(T, usize)>) -> Self {
        raw.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        let mut candidates: Vec<(T, usize)> = Vec::new();
        for (tau, n) in raw {
            match candidates.last() {
                Some(&(t, m)) if n >= m || tau == t => {}
                _ => candidates.push((tau, n)),
            }
        }
        Self { node, candidates }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Breakpoints needed for tolerance `tau`: the count of the largest candidate
    /// tolerance not above `tau`.
    pub fn count_for(&self, tau: T) -> Option<usize> {
        self.candidates
            .iter()
            .take_while(|c| c.0 <= tau)
            .last()
            .map(|c| c.1)
    }

    pub fn is_monotone(&self) -> bool {
        self.candidates
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1)
    }
}

/// `samples` log-spaced values from `lo` to `hi`, endpoints exact.
pub fn log_space<T: Scalar>(lo: T, hi: T, samples: usize) -> Vec<T> {
    match samples {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / T::of_usize(samples - 1);
            let mut v: Vec<T> = (0..samples).map(|i| (a + step * T::of_usize(i)).exp()).collect();
            v[0] = lo;
            v[samples - 1] = hi;
            v
        }
    }
}

/// Options for [`build_staircase_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircaseOptions {
    pub samples: usize,
    pub method: FitMethod,
    /// Scan density of the error measurement in Method 1.
    pub eval_err_samples: usize,
}

impl Default for StaircaseOptions {
    fn default() -> Self {
        Self {
            samples: 500,
            method: FitMethod::Method1,
            eval_err_samples: 1024,
        }
    }
}

pub fn build_staircase<T: Scalar>(
    f: &Univariate,
    domain: Interval<T>,
    tau_lo: T,
    tau_hi: T,
    samples: usize,
    method: FitMethod,
) -> Result<Staircase<T>, AllocError> {
    let opts = StaircaseOptions {
        samples,
        method,
        ..Default::default()
    };
    build_staircase_with(f, domain, tau_lo, tau_hi, &opts)
}

pub fn build_staircase_with<T: Scalar>(
    f: &Univariate,
    domain: Interval<T>,
    tau_lo: T,
    tau_hi: T,
    opts: &StaircaseOptions,
) -> Result<Staircase<T>, AllocError> {
    if !(tau_lo > T::zero() && tau_lo < tau_hi) || !tau_hi.is_finite() {
        return Err(AllocError::BadRange {
            lo: tau_lo.to_f64_lossy(),
            hi: tau_hi.to_f64_lossy(),
        });
    }
    if opts.samples < 2 {
        return Err(AllocError::BadSamples(opts.samples));
    }
    let d3 = match opts.method {
        FitMethod::Method2 => Some(approx::certified_d3(f, domain)?),
        FitMethod::Method1 => None,
    };
    let mut raw = Vec::with_capacity(opts.samples);
    for tau in log_space(tau_lo, tau_hi, opts.samples) {
        let p = match d3 {
            None => approx::method1_breakpoints(
                f,
                domain,
                &Method1Config::new(tau).with_samples(opts.eval_err_samples),
            )?,
            Some(d3) => approx::method2_breakpoints(f, domain, &Method2Config::new(tau, d3))?,
        };
        raw.push((tau, p.len()));
    }
    Ok(Staircase::from_samples(None, raw))
}

/// Build a staircase for every unary node of `g` over the node's input range.
pub fn graph_staircases<T: Scalar>(
    g: &DecompGraph<T>,
    tau_lo: T,
    tau_hi: T,
    opts: &StaircaseOptions,
) -> Result<BTreeMap<usize, Staircase<T>>, AllocError> {
    let mut out = BTreeMap::new();
    for id in g.unary_ids() {
        let mut s = build_staircase_with(g.function(id)?, g.input_domain(id)?, tau_lo, tau_hi, opts)?;
        s.node = Some(id);
        out.insert(id, s);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// Fewest breakpoints meeting a bound.
    P1,
    /// Smallest bound within a breakpoint budget.
    P2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct NodeChoice<T> {
    pub node: usize,
    pub tau: T,
    pub n: usize,
    /// Weight of this node's tolerance in the output bound.
    pub coeff: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct AllocationResult<T> {
    pub objective: Objective,
    pub choices: Vec<NodeChoice<T>>,
    /// Sum of chosen breakpoint counts plus `fixed_breakpoints`.
    pub total_breakpoints: usize,
    /// Breakpoints charged regardless of the choice.
    pub fixed_breakpoints: usize,
    /// `sum_i coeff_i * tau_i`, accumulated in node order.
    pub composed_bound: T,
}

impl<T: Scalar> AllocationResult<T> {
    pub fn taus(&self) -> BTreeMap<usize, T> {
        self.choices.iter().map(|c| (c.node, c.tau)).collect()
    }
}

/// One node of a bare allocation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Item<'a, T> {
    pub node: usize,
    pub coeff: T,
    pub staircase: &'a Staircase<T>,
}

/// DP state: (bound, tau sum) accumulated in node order.
type Key<T> = (T, T);

fn key_less<T: Scalar>(a: Key<T>, b: Key<T>) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Exact P2 over the items: minimize `sum coeff_i tau_i` with `sum n_i <= budget`.
///
/// Ties prefer the smaller tolerance sum, then the smaller total count.
pub fn solve_p2_items<T: Scalar>(items: &[Item<'_, T>], budget: usize, fixed: usize) -> Result<AllocationResult<T>, AllocError> {
    for it in items {
        if it.staircase.is_empty() {
            return Err(AllocError::EmptyStaircase(it.node));
        }
    }
    let minimum: usize = fixed + items
        .iter()
        .map(|it| it.staircase.candidates.iter().map(|c| c.1).min().unwrap_or(0))
        .sum::<usize>();
    if budget < minimum {
        return Err(AllocError::InfeasibleBudget { budget, minimum });
    }
    let cap = budget - fixed;
    // best[b]: best key using exactly b breakpoints; back[k][b]: candidate chosen at item k
    let mut best: Vec<Option<Key<T>>> = vec![None; cap + 1];
    best[0] = Some((T::zero(), T::zero()));
    let mut back: Vec<Vec<u32>> = Vec::with_capacity(items.len());
    for it in items {
        let mut next: Vec<Option<Key<T>>> = vec![None; cap + 1];
        let mut pick = vec![u32::MAX; cap + 1];
        for (b, cur) in best.iter().enumerate() {
            let Some((cost, tsum)) = *cur else { continue };
            for (j, &(tau, n)) in it.staircase.candidates.iter().enumerate() {
                let nb = b + n;
                if nb > cap {
                    continue;
                }
                let cand = (cost + it.coeff * tau, tsum + tau);
                let better = match next[nb] {
                    None => true,
                    Some(old) => key_less(cand, old),
                };
                if better {
                    next[nb] = Some(cand);
                    pick[nb] = j as u32;
                }
            }
        }
        best = next;
        back.push(pick);
    }
    let mut end = None;
    for (b, k) in best.iter().enumerate() {
        if let Some(k) = *k {
            match end {
                None => end = Some((b, k)),
                Some((_, old)) if key_less(k, old) => end = Some((b, k)),
                _ => {}
            }
        }
    }
    let (mut b, (bound, _)) = end.ok_or(AllocError::InfeasibleBudget { budget, minimum })?;
    let mut choices = Vec::with_capacity(items.len());
    for (k, it) in items.iter().enumerate().rev() {
        let j = back[k][b] as usize;
        let (tau, n) = it.staircase.candidates[j];
        choices.push(NodeChoice {
            node: it.node,
            tau,
            n,
            coeff: it.coeff,
        });
        b -= n;
    }
    choices.reverse();
    let total = fixed + choices.iter().map(|c| c.n).sum::<usize>();
    Ok(AllocationResult {
        objective: Objective::P2,
        choices,
        total_breakpoints: total,
        fixed_breakpoints: fixed,
        composed_bound: bound,
    })
}

/// Exact P1 over the items: fewest total breakpoints with bound `<= target`.
pub fn solve_p1_items<T: Scalar>(items: &[Item<'_, T>], target: T, fixed: usize) -> Result<AllocationResult<T>, AllocError> {
    let max_total: usize = fixed + items
        .iter()
        .map(|it| it.staircase.candidates.iter().map(|c| c.1).max().unwrap_or(0))
        .sum::<usize>();
    let finest = solve_p2_items(items, max_total, fixed)?;
    if !(finest.composed_bound <= target) {
        return Err(AllocError::InfeasibleTolerance {
            target: target.to_f64_lossy(),
            best: finest.composed_bound.to_f64_lossy(),
        });
    }
    let min_total: usize = fixed + items
        .iter()
        .map(|it| it.staircase.candidates.iter().map(|c| c.1).min().unwrap_or(0))
        .sum::<usize>();
    let (mut lo, mut hi) = (min_total, max_total);
    let mut found = finest;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let r = solve_p2_items(items, mid, fixed)?;
        if r.composed_bound <= target {
            hi = mid;
            found = r;
        } else {
            lo = mid + 1;
        }
    }
    if found.total_breakpoints != lo {
        found = solve_p2_items(items, lo, fixed)?;
    }
    found.objective = Objective::P1;
    Ok(found)
}

fn graph_items<'a, T: Scalar>(
    g: &DecompGraph<T>,
    staircases: &'a BTreeMap<usize, Staircase<T>>,
) -> Result<Vec<Item<'a, T>>, AllocError> {
    let coeff = g.sensitivity()?;
    g.unary_ids()
        .into_iter()
        .map(|id| {
            let s = staircases.get(&id).ok_or(AllocError::MissingStaircase(id))?;
            Ok(Item {
                node: id,
                coeff: coeff[id],
                staircase: s,
            })
        })
        .collect()
}

/// P2 on a decomposition graph; `budget` counts the breakpoints of the unary nodes.
pub fn solve_p2<T: Scalar>(
    g: &DecompGraph<T>,
    staircases: &BTreeMap<usize, Staircase<T>>,
    budget: usize,
) -> Result<AllocationResult<T>, AllocError> {
    solve_p2_items(&graph_items(g, staircases)?, budget, 0)
}

/// P1 on a decomposition graph.
pub fn solve_p1<T: Scalar>(
    g: &DecompGraph<T>,
    staircases: &BTreeMap<usize, Staircase<T>>,
    target: T,
) -> Result<AllocationResult<T>, AllocError> {
    solve_p1_items(&graph_items(g, staircases)?, target, 0)
}

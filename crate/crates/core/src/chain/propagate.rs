use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ChainError, DecompGraph, NodeKind};
use crate::approx::{self, eval_err_expr, Method1Config, Method2Config};
use crate::expr::Bindings;
use crate::interval::Interval;
use crate::pwa::PwaFunction1D;
use crate::scalar::Scalar;

/// How the error bound of a unary node's input is amplified through the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// Every approximation with a perturbed input must be a single affine piece; its
    /// slope magnitude is the amplification factor.
    AffineThm2,
    /// Largest slope magnitude of the fitted piecewise-affine approximation.
    PwaCor1,
    /// Bound on `|f'|` over the exact input range; valid for on-graph (SOS) fits and
    /// needs no fit at all.
    SecantCor3,
}

/// Approximation method used by [`DecompGraph::fit_tolerances`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Method1,
    Method2,
}

/// How to approximate one unary node.
#[derive(Debug, Clone)]
pub enum FitSpec<T> {
    Method1(Method1Config<T>),
    /// Method 2 with a third-derivative bound certified over the input range.
    Method2 { tolerance: T },
    /// The single secant over the input range; the tolerance is its measured error.
    Secant,
    /// `n` equally spaced breakpoints; the tolerance is the measured error.
    Uniform(usize),
    /// A prebuilt approximation with a known tolerance.
    Given { pwa: PwaFunction1D<T>, tau: T },
}

fn slack_ok<T: Scalar>(x: T, dom: Interval<T>) -> bool {
    let tol = T::lit(1e-12) * (T::one() + dom.mag());
    x >= dom.lo() - tol && x <= dom.hi() + tol
}

impl<T: Scalar> DecompGraph<T> {
    /// Recompute every node's exact-range enclosure and each unary node's derivative
    /// bound, in topological order. Fits and tolerances are kept.
    pub fn propagate_domains(&mut self) -> Result<(), ChainError> {
        for i in 0..self.nodes.len() {
            let (domain, d_bound) = match &self.nodes[i].kind {
                NodeKind::Input { name } => (self.inputs[name], None),
                NodeKind::Affine {
                    parents,
                    coeffs,
                    offset,
                } => {
                    let mut acc = Interval::point(*offset);
                    for (p, c) in parents.iter().zip(coeffs) {
                        acc = acc.try_add(&self.nodes[*p].domain.try_scale(*c)?)?;
                    }
                    (acc, None)
                }
                NodeKind::Unary {
                    parent, function, ..
                } => {
                    let x = self.nodes[*parent].domain;
                    let dom = function.eval_interval(x)?;
                    // an unbounded slope (sqrt at 0) simply leaves the bound absent
                    (dom, function.derivative_bound(1, x).ok())
                }
            };
            let node = &mut self.nodes[i];
            node.domain = domain;
            node.inflated_domain = domain.inflate(node.eps)?;
            node.d_bound = d_bound;
        }
        Ok(())
    }

    /// Set unary tolerances without fitting (enough for the derivative-bound error mode).
    pub fn set_tolerances(&mut self, taus: &BTreeMap<usize, T>) -> Result<(), ChainError> {
        for id in self.unary_ids() {
            let tau = *taus.get(&id).ok_or(ChainError::MissingTolerance(id))?;
            if !(tau >= T::zero()) || !tau.is_finite() {
                return Err(ChainError::BadTolerance {
                    id,
                    tau: tau.to_f64_lossy(),
                });
            }
            self.nodes[id].tau = tau;
        }
        self.refresh_errors()
    }

    /// Fit every unary node at its tolerance, then refresh the propagated error bounds.
    pub fn fit_tolerances(&mut self, taus: &BTreeMap<usize, T>, method: FitMethod) -> Result<(), ChainError> {
        self.fit_all(|id| {
            let tau = *taus.get(&id).ok_or(ChainError::MissingTolerance(id))?;
            Ok(match method {
                FitMethod::Method1 => FitSpec::Method1(Method1Config::new(tau)),
                FitMethod::Method2 => FitSpec::Method2 { tolerance: tau },
            })
        })
    }

    /// Fit every unary node with the spec chosen by `spec`, then refresh error bounds.
    pub fn fit_all<F>(&mut self, mut spec: F) -> Result<(), ChainError>
    where
        F: FnMut(usize) -> Result<FitSpec<T>, ChainError>,
    {
        for id in self.unary_ids() {
            let s = spec(id)?;
            self.fit_node_only(id, &s)?;
        }
        self.refresh_errors()
    }

    /// Fit one unary node and refresh error bounds.
    pub fn fit_node(&mut self, id: usize, spec: &FitSpec<T>) -> Result<(), ChainError> {
        self.fit_node_only(id, spec)?;
        self.refresh_errors()
    }

    fn fit_node_only(&mut self, id: usize, spec: &FitSpec<T>) -> Result<(), ChainError> {
        let domain = self.input_domain(id)?;
        let f = self.function(id)?.clone();
        let measure = |p: &PwaFunction1D<T>| -> Result<T, ChainError> {
            let cfg = Method1Config::new(T::one());
            let mut worst = T::zero();
            for w in p.breakpoints().windows(2) {
                worst = worst.max(eval_err_expr(&f, w[0], w[1], &cfg)?);
            }
            Ok(worst)
        };
        let (pwa, tau) = match spec {
            FitSpec::Method1(cfg) => (approx::method1_breakpoints(&f, domain, cfg)?, cfg.tolerance),
            FitSpec::Method2 { tolerance } => {
                let d3 = approx::certified_d3(&f, domain)?;
                let cfg = Method2Config::new(*tolerance, d3);
                (approx::method2_breakpoints(&f, domain, &cfg)?, *tolerance)
            }
            FitSpec::Secant => {
                let p = approx::uniform_breakpoints(&f, domain, 2)?;
                let t = measure(&p)?;
                (p, t)
            }
            FitSpec::Uniform(n) => {
                let p = approx::uniform_breakpoints(&f, domain, *n)?;
                let t = measure(&p)?;
                (p, t)
            }
            FitSpec::Given { pwa, tau } => {
                if !(*tau >= T::zero()) {
                    return Err(ChainError::BadTolerance {
                        id,
                        tau: tau.to_f64_lossy(),
                    });
                }
                (pwa.clone(), *tau)
            }
        };
        let node = &mut self.nodes[id];
        node.d_pwa = Some(pwa.max_abs_slope());
        node.pwa = Some(pwa);
        node.tau = tau;
        Ok(())
    }

    /// Store the derivative-bound error bounds as `eps` and widen `inflated_domain`.
    fn refresh_errors(&mut self) -> Result<(), ChainError> {
        let eps = self.propagate_error(ErrorMode::SecantCor3)?;
        for (node, e) in self.nodes.iter_mut().zip(eps) {
            node.eps = e;
            node.inflated_domain = node.domain.inflate(e)?;
        }
        Ok(())
    }

    /// Error bound at every node (indexed by id) under `mode`.
    pub fn propagate_error(&self, mode: ErrorMode) -> Result<Vec<T>, ChainError> {
        let mut eps = vec![T::zero(); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            eps[i] = match &node.kind {
                NodeKind::Input { .. } => T::zero(),
                NodeKind::Affine { parents, coeffs, .. } => parents
                    .iter()
                    .zip(coeffs)
                    .fold(T::zero(), |acc, (p, c)| acc + c.abs() * eps[*p]),
                NodeKind::Unary {
                    parent, function, ..
                } => {
                    let e_in = eps[*parent];
                    let d = match mode {
                        ErrorMode::AffineThm2 => {
                            let p = node.pwa.as_ref().ok_or(ChainError::MissingFit(i))?;
                            if e_in > T::zero() && p.num_segments() != 1 {
                                return Err(ChainError::NotAffine(i));
                            }
                            p.max_abs_slope()
                        }
                        ErrorMode::PwaCor1 => {
                            node.pwa.as_ref().ok_or(ChainError::MissingFit(i))?;
                            node.d_pwa.ok_or(ChainError::MissingFit(i))?
                        }
                        ErrorMode::SecantCor3 => {
                            if let Some(p) = &node.pwa {
                                if !p.is_sos_of(function, T::lit(1e-9))? {
                                    return Err(ChainError::NotSos(i));
                                }
                            }
                            if e_in == T::zero() {
                                T::zero()
                            } else {
                                node.d_bound.ok_or(ChainError::MissingBounds(i))?
                            }
                        }
                    };
                    node.tau + d * e_in
                }
            };
        }
        Ok(eps)
    }

    /// Coefficient of each node's tolerance in the output error bound under the
    /// derivative-bound mode, indexed by id. The output bound is `sum_i coeff[i] * tau[i]`.
    pub fn sensitivity(&self) -> Result<Vec<T>, ChainError> {
        let mut coeff = vec![T::zero(); self.nodes.len()];
        coeff[self.output] = T::one();
        for i in (0..self.nodes.len()).rev() {
            let c = coeff[i];
            if c == T::zero() {
                continue;
            }
            match &self.nodes[i].kind {
                NodeKind::Input { .. } => {}
                NodeKind::Affine { parents, coeffs, .. } => {
                    for (p, a) in parents.iter().zip(coeffs) {
                        coeff[*p] = coeff[*p] + c * a.abs();
                    }
                }
                NodeKind::Unary { parent, .. } => {
                    let d = self.nodes[i].d_bound.ok_or(ChainError::MissingBounds(i))?;
                    coeff[*parent] = coeff[*parent] + c * d;
                }
            }
        }
        Ok(coeff)
    }

    fn read_inputs<B: Bindings<T> + ?Sized>(&self, point: &B) -> Result<Vec<(usize, T)>, ChainError> {
        let mut out = Vec::new();
        for node in &self.nodes {
            if let NodeKind::Input { name } = &node.kind {
                let x = point
                    .lookup(name)
                    .ok_or_else(|| ChainError::MissingInput(name.clone()))?;
                let b = self.inputs[name];
                if !b.contains(x) {
                    return Err(ChainError::OutOfDomain {
                        var: name.clone(),
                        x: x.to_f64_lossy(),
                        lo: b.lo().to_f64_lossy(),
                        hi: b.hi().to_f64_lossy(),
                    });
                }
                out.push((node.id, x));
            }
        }
        Ok(out)
    }

    /// Exact value of every node at `point`.
    pub fn eval_exact_trace<B: Bindings<T> + ?Sized>(&self, point: &B) -> Result<Vec<T>, ChainError> {
        let mut v = vec![T::zero(); self.nodes.len()];
        for (id, x) in self.read_inputs(point)? {
            v[id] = x;
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match &node.kind {
                NodeKind::Input { .. } => {}
                NodeKind::Affine {
                    parents,
                    coeffs,
                    offset,
                } => {
                    v[i] = parents
                        .iter()
                        .zip(coeffs)
                        .fold(*offset, |acc, (p, c)| acc + *c * v[*p]);
                }
                NodeKind::Unary { parent, op, .. } => v[i] = op.apply(v[*parent]),
            }
        }
        Ok(v)
    }

    /// Approximate value of every node at `point`, using the fitted approximations.
    ///
    /// Each approximate input is checked against its node's inflated domain and then
    /// clamped into the fit's domain.
    pub fn eval_approx_trace<B: Bindings<T> + ?Sized>(&self, point: &B) -> Result<Vec<T>, ChainError> {
        let mut v = vec![T::zero(); self.nodes.len()];
        for (id, x) in self.read_inputs(point)? {
            v[id] = x;
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match &node.kind {
                NodeKind::Input { .. } => {}
                NodeKind::Affine {
                    parents,
                    coeffs,
                    offset,
                } => {
                    v[i] = parents
                        .iter()
                        .zip(coeffs)
                        .fold(*offset, |acc, (p, c)| acc + *c * v[*p]);
                }
                NodeKind::Unary { parent, .. } => {
                    let pwa = node.pwa.as_ref().ok_or(ChainError::MissingFit(i))?;
                    v[i] = pwa.eval_clamped(v[*parent]);
                }
            }
            let dom = node.inflated_domain;
            if !slack_ok(v[i], dom) {
                return Err(ChainError::InflationViolated {
                    id: i,
                    value: v[i].to_f64_lossy(),
                    lo: dom.lo().to_f64_lossy(),
                    hi: dom.hi().to_f64_lossy(),
                });
            }
        }
        Ok(v)
    }

    /// `(exact, approximate)` output value at `point`.
    pub fn eval_composed<B: Bindings<T> + ?Sized>(&self, point: &B) -> Result<(T, T), ChainError> {
        let exact = self.eval_exact_trace(point)?;
        let approx = self.eval_approx_trace(point)?;
        Ok((exact[self.output], approx[self.output]))
    }

    /// Exact output value at `point`.
    pub fn eval_exact<B: Bindings<T> + ?Sized>(&self, point: &B) -> Result<T, ChainError> {
        Ok(self.eval_exact_trace(point)?[self.output])
    }
    /// Largest `|exact - approx|` at the output over a tensor grid with `per_axis` points
    /// along each input (inputs in name order).
    pub fn empirical_max_error(&self, per_axis: usize) -> Result<T, ChainError> {
        let axes: Vec<(String, Vec<T>)> = self
            .inputs
            .iter()
            .map(|(k, b)| (k.clone(), b.linspace(per_axis.max(2))))
            .collect();
        let mut idx = vec![0usize; axes.len()];
        let mut point: Vec<(&str, T)> = axes.iter().map(|(k, v)| (k.as_str(), v[0])).collect();
        let mut worst = T::zero();
        loop {
            for (j, (_, v)) in axes.iter().enumerate() {
                point[j].1 = v[idx[j]];
            }
            let (e, a) = self.eval_composed(point.as_slice())?;
            worst = worst.max((e - a).abs());
            let mut j = 0;
            loop {
                if j == idx.len() {
                    return Ok(worst);
                }
                idx[j] += 1;
                if idx[j] < axes[j].1.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    }
}

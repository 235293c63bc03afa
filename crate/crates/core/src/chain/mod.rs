//! Decomposition of a multivariate expression into a chain of affine and unary nodes, and
//! propagation of approximation error through that chain.
//!
//! Every nonlinear operation is reduced to a unary node: products go through the identity
//! `p q = ((p + q)^2 - (p - q)^2) / 4` and quotients through a reciprocal. Affine
//! combinations are exact and carry no tolerance of their own. Each unary node is replaced
//! by a secant (SOS) piecewise-affine fit over the exact range of its input; approximate
//! inputs that stray outside that range are clamped back into it before evaluation.

mod decompose;
mod propagate;

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::approx::ApproxError;
use crate::expr::{Expr, ExprError, Func, Univariate};
use crate::interval::{Interval, IntervalError};
use crate::pwa::{PwaError, PwaFunction1D};
use crate::scalar::Scalar;

pub use propagate::{ErrorMode, FitMethod, FitSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("unsupported expression node: {0}")]
    UnsupportedNode(String),
    #[error("variable `{0}` has no input box")]
    UnboundVariable(String),
    #[error("node {0} is not a unary node")]
    NotUnary(usize),
    #[error("node {0} has no fitted approximation")]
    MissingFit(usize),
    #[error("approximation of node {0} is not on the graph of its function")]
    NotSos(usize),
    #[error("node {0} needs a single affine piece for this error mode")]
    NotAffine(usize),
    #[error("node {0} has no derivative bound")]
    MissingBounds(usize),
    #[error("no tolerance given for unary node {0}")]
    MissingTolerance(usize),
    #[error("tolerance for node {id} must be nonnegative and finite, got {tau}")]
    BadTolerance { id: usize, tau: f64 },
    #[error("input `{var}` = {x} lies outside its box [{lo}, {hi}]")]
    OutOfDomain { var: String, x: f64, lo: f64, hi: f64 },
    #[error("missing value for input `{0}`")]
    MissingInput(String),
    #[error("approximate value {value} of node {id} escapes its inflated domain [{lo}, {hi}]")]
    InflationViolated { id: usize, value: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Pwa(#[from] PwaError),
}

/// The nonlinear function applied by a unary node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnaryKind {
    Square,
    Reciprocal,
    Power(i32),
    Sin,
    Cos,
    Sqrt,
    Exp,
    Log,
}

/// Variable name used in the symbolic form of unary node functions.
pub const UNARY_VAR: &str = "w";

impl UnaryKind {
    pub fn name(self) -> &'static str {
        match self {
            UnaryKind::Square => "square",
            UnaryKind::Reciprocal => "reciprocal",
            UnaryKind::Power(_) => "power",
            UnaryKind::Sin => "sin",
            UnaryKind::Cos => "cos",
            UnaryKind::Sqrt => "sqrt",
            UnaryKind::Exp => "exp",
            UnaryKind::Log => "log",
        }
    }

    pub(crate) fn from_power(n: i32) -> Self {
        match n {
            2 => UnaryKind::Square,
            -1 => UnaryKind::Reciprocal,
            n => UnaryKind::Power(n),
        }
    }

    pub(crate) fn from_func(f: Func) -> Option<Self> {
        Some(match f {
            Func::Sin => UnaryKind::Sin,
            Func::Cos => UnaryKind::Cos,
            Func::Sqrt => UnaryKind::Sqrt,
            Func::Exp => UnaryKind::Exp,
            Func::Log => UnaryKind::Log,
            Func::Abs => return None,
        })
    }

    /// The function as a symbolic expression of [`UNARY_VAR`].
    pub fn function(self) -> Univariate {
        let w = Expr::var(UNARY_VAR);
        let e = match self {
            UnaryKind::Square => w.powi(2),
            UnaryKind::Reciprocal => Expr::constant(1.0).div(w),
            UnaryKind::Power(n) => w.powi(n),
            UnaryKind::Sin => w.call(Func::Sin),
            UnaryKind::Cos => w.call(Func::Cos),
            UnaryKind::Sqrt => w.call(Func::Sqrt),
            UnaryKind::Exp => w.call(Func::Exp),
            UnaryKind::Log => w.call(Func::Log),
        };
        Univariate::new(e, UNARY_VAR).expect("single variable")
    }

    #[inline]
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            UnaryKind::Square => x * x,
            UnaryKind::Reciprocal => T::one() / x,
            UnaryKind::Power(n) => x.powi(n),
            UnaryKind::Sin => x.sin(),
            UnaryKind::Cos => x.cos(),
            UnaryKind::Sqrt => x.sqrt(),
            UnaryKind::Exp => x.exp(),
            UnaryKind::Log => x.ln(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", bound(serialize = "T: Scalar + Serialize"))]
pub enum NodeKind<T> {
    Input {
        name: String,
    },
    /// `offset + sum_i coeffs[i] * w[parents[i]]`.
    Affine {
        parents: Vec<usize>,
        coeffs: Vec<T>,
        offset: T,
    },
    Unary {
        parent: usize,
        op: UnaryKind,
        #[serde(serialize_with = "display_function")]
        function: Univariate,
    },
}

fn display_function<S: Serializer>(f: &Univariate, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

impl<T> NodeKind<T> {
    pub fn parents(&self) -> &[usize] {
        match self {
            NodeKind::Input { .. } => &[],
            NodeKind::Affine { parents, .. } => parents,
            NodeKind::Unary { parent, .. } => std::slice::from_ref(parent),
        }
    }

    pub fn unary_op(&self) -> Option<UnaryKind> {
        match self {
            NodeKind::Unary { op, .. } => Some(*op),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct DecompNode<T> {
    pub id: usize,
    pub kind: NodeKind<T>,
    /// Enclosure of the exact node value over the input box.
    pub domain: Interval<T>,
    /// `domain` widened by `eps`: encloses the approximate node value.
    pub inflated_domain: Interval<T>,
    pub tau: T,
    pub eps: T,
    /// Bound on `|f'|` over the exact input range (unary nodes).
    pub d_bound: Option<T>,
    /// Largest slope magnitude of the fitted approximation (unary nodes).
    pub d_pwa: Option<T>,
    pub pwa: Option<PwaFunction1D<T>>,
}

impl<T: Scalar> DecompNode<T> {
    pub fn is_unary(&self) -> bool {
        matches!(self.kind, NodeKind::Unary { .. })
    }
}

/// Nodes in topological order (every parent id is smaller than its child's id).
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct DecompGraph<T> {
    nodes: Vec<DecompNode<T>>,
    output: usize,
    inputs: BTreeMap<String, Interval<T>>,
}

impl<T: Scalar> DecompGraph<T> {
    pub fn nodes(&self) -> &[DecompNode<T>] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &DecompNode<T> {
        &self.nodes[id]
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn inputs(&self) -> &BTreeMap<String, Interval<T>> {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Ids of the unary nodes, ascending.
    pub fn unary_ids(&self) -> Vec<usize> {
        self.nodes.iter().filter(|n| n.is_unary()).map(|n| n.id).collect()
    }

    pub fn count_unary(&self, kind: UnaryKind) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind.unary_op() == Some(kind))
            .count()
    }

    /// Total breakpoints over fitted unary nodes.
    pub fn total_breakpoints(&self) -> usize {
        self.nodes.iter().filter_map(|n| n.pwa.as_ref()).map(|p| p.len()).sum()
    }

    /// For a unary node, the exact range of its input.
    pub fn input_domain(&self, id: usize) -> Result<Interval<T>, ChainError> {
        match &self.nodes[id].kind {
            NodeKind::Unary { parent, .. } => Ok(self.nodes[*parent].domain),
            _ => Err(ChainError::NotUnary(id)),
        }
    }

    /// For a unary node, its function of [`UNARY_VAR`].
    pub fn function(&self, id: usize) -> Result<&Univariate, ChainError> {
        match &self.nodes[id].kind {
            NodeKind::Unary { function, .. } => Ok(function),
            _ => Err(ChainError::NotUnary(id)),
        }
    }
}

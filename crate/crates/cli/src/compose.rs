use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use pwacomp::chain::{ErrorMode, FitSpec, NodeKind};
use pwacomp::{Expr, Graph64, Method1Config};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::parse_box;
use crate::out::{num, out_dir, write_json, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Method 1 fits at the given tolerances.
    Method1,
    /// Method 2 fits at the given tolerances.
    Method2,
    /// Nodes fed directly by an input get a Method 1 fit; every other node is a single
    /// secant over its input range, and the single-piece slope bound is reported too.
    Secant,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Expression, e.g. "(sin(1/x))^2".
    #[arg(long = "f")]
    pub f: String,
    /// Input box entry name=lo:hi; repeat for each variable.
    #[arg(long = "box", required = true, allow_hyphen_values = true)]
    pub boxes: Vec<String>,
    /// One tolerance for every unary node, or one per unary node in id order.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tol: Vec<f64>,
    #[arg(long, value_enum, default_value = "method1")]
    pub mode: Mode,
    /// Validation grid points per axis.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    /// Random sample points written to the CSV for multivariate expressions.
    #[arg(long, default_value_t = 10000)]
    pub csv_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
pub struct Bounds {
    pub pwa_cor1: Vec<f64>,
    pub secant_cor3: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affine_thm2: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct Report<'a> {
    expression: &'a str,
    mode: &'static str,
    graph: &'a Graph64,
    eps: &'a Bounds,
    empirical_max_error: f64,
    validation_grid_per_axis: usize,
}

/// Per-axis grid size so the tensor grid has at most about four million points.
pub fn grid_per_axis(grid: usize, dims: usize) -> usize {
    let cap = (4.0e6f64).powf(1.0 / dims.max(1) as f64).floor() as usize;
    grid.min(cap).max(2)
}

pub fn kind_label(k: &NodeKind<f64>) -> String {
    match k {
        NodeKind::Input { name } => format!("input {name}"),
        NodeKind::Affine { parents, .. } => format!("affine {parents:?}"),
        NodeKind::Unary { parent, op, .. } => format!("{}({parent})", op.name()),
    }
}

pub fn run(a: &Args) -> Result<()> {
    let e = Expr::parse(&a.f)?;
    let bx = parse_box(&a.boxes)?;
    let mut g = Graph64::decompose(&e, &bx)?;
    let ids = g.unary_ids();
    let taus: BTreeMap<usize, f64> = match a.tol.len() {
        1 => ids.iter().map(|&i| (i, a.tol[0])).collect(),
        n if n == ids.len() => ids.iter().copied().zip(a.tol.iter().copied()).collect(),
        n => bail!("{n} tolerances given for {} unary nodes", ids.len()),
    };
    let input_fed: Vec<bool> = (0..g.len())
        .map(|i| match &g.node(i).kind {
            NodeKind::Unary { parent, .. } => matches!(g.node(*parent).kind, NodeKind::Input { .. }),
            _ => false,
        })
        .collect();
    g.fit_all(|id| {
        let tau = taus[&id];
        Ok(match a.mode {
            Mode::Method1 => FitSpec::Method1(Method1Config::new(tau)),
            Mode::Method2 => FitSpec::Method2 { tolerance: tau },
            Mode::Secant if input_fed[id] => FitSpec::Method1(Method1Config::new(tau)),
            Mode::Secant => FitSpec::Secant,
        })
    })?;
    let bounds = Bounds {
        pwa_cor1: g.propagate_error(ErrorMode::PwaCor1)?,
        secant_cor3: g.propagate_error(ErrorMode::SecantCor3)?,
        affine_thm2: match a.mode {
            Mode::Secant => Some(g.propagate_error(ErrorMode::AffineThm2)?),
            _ => None,
        },
    };

    println!("{:>4}  {:<16} {:>24} {:>24} {:>24} {:>24}", "id", "node", "tau", "eps_cor1", "eps_cor3", "eps_affine");
    for n in g.nodes() {
        let thm2 = bounds
            .affine_thm2
            .as_ref()
            .map_or_else(|| "-".to_string(), |v| num(v[n.id]));
        println!(
            "{:>4}  {:<16} {:>24} {:>24} {:>24} {:>24}",
            n.id,
            kind_label(&n.kind),
            num(n.tau),
            num(bounds.pwa_cor1[n.id]),
            num(bounds.secant_cor3[n.id]),
            thm2
        );
    }

    let dims = g.inputs().len();
    let per_axis = grid_per_axis(a.grid, dims);
    let emp = g.empirical_max_error(per_axis)?;
    let out = g.output();
    println!("output node {out}: grid max error {} ({per_axis} points per axis)", num(emp));
    let (c1, c3) = (bounds.pwa_cor1[out], bounds.secant_cor3[out]);
    if !(emp <= c1 && emp <= c3) {
        bail!("grid error {emp} exceeds a propagated bound (cor1 {c1}, cor3 {c3})");
    }
    if let Some(t) = &bounds.affine_thm2 {
        if !(emp <= t[out]) {
            bail!("grid error {emp} exceeds the single-piece bound {}", t[out]);
        }
    }

    let dir = out_dir(&a.out)?;
    let names: Vec<String> = g.inputs().keys().cloned().collect();
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    header.extend(["exact", "approx", "error", "eps_cor1", "eps_cor3"]);
    let mut csv = Csv::new(&header);
    let points: Vec<Vec<f64>> = if dims == 1 {
        g.inputs().values().next().context("no inputs")?.linspace(a.grid.max(2)).into_iter().map(|x| vec![x]).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (0..a.csv_points)
            .map(|_| g.inputs().values().map(|b| rng.gen_range(b.lo()..=b.hi())).collect())
            .collect()
    };
    for p in points {
        let bind: Vec<(&str, f64)> = names.iter().map(String::as_str).zip(p.iter().copied()).collect();
        let (ex, ap) = g.eval_composed(bind.as_slice())?;
        let mut row = p;
        row.extend([ex, ap, (ex - ap).abs(), c1, c3]);
        csv.nums(&row);
    }
    csv.write(&dir.join("compose.csv"))?;
    let report = Report {
        expression: &a.f,
        mode: match a.mode {
            Mode::Method1 => "method1",
            Mode::Method2 => "method2",
            Mode::Secant => "secant",
        },
        graph: &g,
        eps: &bounds,
        empirical_max_error: emp,
        validation_grid_per_axis: per_axis,
    };
    write_json(&dir.join("compose.json"), &report)
}

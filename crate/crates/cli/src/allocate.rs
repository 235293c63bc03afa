use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::ValueEnum;
use pwacomp::alloc::{self, AllocationResult, StaircaseOptions};
use pwacomp::bench;
use pwacomp::chain::{ErrorMode, FitSpec};
use pwacomp::{Expr, Graph64, Staircase};
use serde::Serialize;

use crate::args::{parse_box, parse_range, Method};
use crate::compose::grid_per_axis;
use crate::out::{num, out_dir, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bench {
    Tower,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Expression; not needed with --bench.
    #[arg(long = "f", conflicts_with = "bench")]
    pub f: Option<String>,
    #[arg(long = "box", allow_hyphen_values = true)]
    pub boxes: Vec<String>,
    #[arg(long, value_enum)]
    pub bench: Option<Bench>,
    /// Breakpoint budget (P2).
    #[arg(long, conflicts_with = "tolerance", required_unless_present = "tolerance")]
    pub budget: Option<usize>,
    /// Bound on the output error (P1).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Sampled tolerance range lo:hi for the staircases.
    #[arg(long, default_value = "1e-3:1")]
    pub tau_range: String,
    /// Log-spaced tolerance samples per staircase.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Scan density of the secant error measurement while building staircases.
    #[arg(long, default_value_t = 128)]
    pub eval_samples: usize,
    #[arg(long, value_enum, default_value = "1")]
    pub method: Method,
    /// Also fit equally spaced breakpoints with the same total, split evenly over the nodes.
    #[arg(long)]
    pub uniform_baseline: bool,
    /// Validation grid points per axis.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Validation {
    total_breakpoints: usize,
    eps_cor3: f64,
    empirical_max_error: f64,
    grid_per_axis: usize,
}

#[derive(Serialize)]
struct Baseline {
    counts: BTreeMap<usize, usize>,
    validation: Validation,
}

#[derive(Serialize)]
struct Report<'a> {
    expression: String,
    allocation: &'a AllocationResult<f64>,
    validation: Validation,
    #[serde(skip_serializing_if = "Option::is_none")]
    uniform_baseline: Option<Baseline>,
}

fn validate(g: &Graph64, grid: usize) -> Result<Validation> {
    let per_axis = grid_per_axis(grid, g.inputs().len());
    Ok(Validation {
        total_breakpoints: g.total_breakpoints(),
        eps_cor3: g.propagate_error(ErrorMode::SecantCor3)?[g.output()],
        empirical_max_error: g.empirical_max_error(per_axis)?,
        grid_per_axis: per_axis,
    })
}

pub fn run(a: &Args) -> Result<()> {
    let (text, g0) = match (a.bench, &a.f) {
        (Some(Bench::Tower), _) => (bench::tower_text(), Graph64::decompose(&bench::tower_expr(), &bench::tower_box())?),
        (None, Some(f)) => (f.clone(), Graph64::decompose(&Expr::parse(f)?, &parse_box(&a.boxes)?)?),
        (None, None) => bail!("give an expression with --f and --box, or --bench"),
    };
    let (lo, hi) = parse_range(&a.tau_range)?;
    let opts = StaircaseOptions {
        samples: a.samples,
        method: a.method.fit(),
        eval_err_samples: a.eval_samples,
    };
    let t = Instant::now();
    let stairs: BTreeMap<usize, Staircase<f64>> = alloc::graph_staircases(&g0, lo, hi, &opts)?;
    println!(
        "{} unary nodes, staircases in {:.2} s",
        stairs.len(),
        t.elapsed().as_secs_f64()
    );
    let t = Instant::now();
    let res = match (a.budget, a.tolerance) {
        (Some(n), _) => alloc::solve_p2(&g0, &stairs, n)?,
        (None, Some(tol)) => alloc::solve_p1(&g0, &stairs, tol)?,
        (None, None) => bail!("give --budget or --tolerance"),
    };
    println!("solved in {:.4} s", t.elapsed().as_secs_f64());
    println!("{:>4} {:>24} {:>6} {:>24}", "node", "tau", "n", "coeff");
    for c in &res.choices {
        println!("{:>4} {:>24} {:>6} {:>24}", c.node, num(c.tau), c.n, num(c.coeff));
    }
    println!("total breakpoints {}  composed bound {}", res.total_breakpoints, num(res.composed_bound));

    let mut g = g0.clone();
    let method = a.method.fit();
    g.fit_tolerances(&res.taus(), method)?;
    let v = validate(&g, a.grid)?;
    println!(
        "fitted: breakpoints {}  eps_cor3 {}  grid max error {}",
        v.total_breakpoints,
        num(v.eps_cor3),
        num(v.empirical_max_error)
    );
    if !(v.eps_cor3 <= res.composed_bound + 1e-9 && v.empirical_max_error <= v.eps_cor3) {
        bail!("fitted graph violates the allocated bound");
    }

    let baseline = if a.uniform_baseline {
        let counts = bench::even_split(&g0.unary_ids(), res.total_breakpoints - res.fixed_breakpoints);
        let mut gu = g0.clone();
        gu.fit_all(|id| Ok(FitSpec::Uniform(counts[&id])))?;
        let v = validate(&gu, a.grid)?;
        println!(
            "uniform baseline: breakpoints {}  eps_cor3 {}  grid max error {}",
            v.total_breakpoints,
            num(v.eps_cor3),
            num(v.empirical_max_error)
        );
        if !(v.empirical_max_error <= v.eps_cor3) {
            bail!("uniform baseline violates its bound");
        }
        Some(Baseline { counts, validation: v })
    } else {
        None
    };

    let dir = out_dir(&a.out)?;
    write_json(&dir.join("staircases.json"), &stairs)?;
    write_json(&dir.join("graph.json"), &g)?;
    write_json(
        &dir.join("allocation.json"),
        &Report {
            expression: text,
            allocation: &res,
            validation: v,
            uniform_baseline: baseline,
        },
    )
}

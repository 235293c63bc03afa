use std::path::PathBuf;

use anyhow::{bail, Result};
use pwacomp::approx::{self, theorem1_bound};
use pwacomp::{Interval64, Method1Config, Method2Config, Pwa64, Univariate};
use serde::Serialize;

use crate::args::{parse_domain, Method};
use crate::out::{num, out_dir, write_json, Csv};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Function of one variable, e.g. "sin(x)".
    #[arg(long = "f")]
    pub f: String,
    /// Domain as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: String,
    /// Tolerance, or a comma-separated list of tolerances.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tol: Vec<f64>,
    #[arg(long, value_enum, default_value = "1")]
    pub method: Method,
    /// Validation grid size.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Fit {
    tolerance: f64,
    method: &'static str,
    breakpoints: usize,
    eval_err: f64,
    empirical_max_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    d3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    segment_bounds: Option<Vec<f64>>,
    pwa: Pwa64,
}

#[derive(Serialize)]
struct Report {
    expression: String,
    variable: String,
    domain: Interval64,
    fits: Vec<Fit>,
}

pub fn run(a: &Args) -> Result<()> {
    let f = Univariate::parse(&a.f)?;
    let domain = parse_domain(&a.domain)?;
    let dir = out_dir(&a.out)?;
    let measure = Method1Config::new(1.0);
    let mut fits = Vec::new();
    for (i, &tol) in a.tol.iter().enumerate() {
        let (pwa, d3) = match a.method {
            Method::One => (approx::method1_breakpoints(&f, domain, &Method1Config::new(tol))?, None),
            Method::Two => {
                let d3 = approx::certified_d3(&f, domain)?;
                let p = approx::method2_breakpoints(&f, domain, &Method2Config::new(tol, d3))?;
                (p, Some(d3))
            }
        };
        let mut worst = 0.0f64;
        for w in pwa.breakpoints().windows(2) {
            worst = worst.max(approx::eval_err_expr(&f, w[0], w[1], &measure)?);
        }
        let emp = pwa.empirical_max_error(&f, a.grid)?;
        println!(
            "tol {}  {}  breakpoints {}  eval_err {}  grid max error {}",
            num(tol),
            a.method.label(),
            pwa.len(),
            num(worst),
            num(emp)
        );
        let bounds = match d3 {
            Some(d3) => {
                let f2 = f.compile_derivative::<f64>(2)?;
                let b = approx::method2_segment_bounds(&f, &pwa, d3)?;
                for (j, (seg, bj)) in pwa.segments().iter().zip(&b).enumerate() {
                    let again = theorem1_bound(f2.eval(seg.domain.lo())?.abs(), d3, seg.domain.width())?;
                    println!(
                        "  segment {j} [{}, {}]  bound {}",
                        num(seg.domain.lo()),
                        num(seg.domain.hi()),
                        num(*bj)
                    );
                    if !(*bj <= tol && again <= tol) {
                        bail!("segment {j} bound {bj} exceeds tolerance {tol}");
                    }
                }
                Some(b)
            }
            None => {
                if !(worst <= tol * (1.0 + 1e-9)) {
                    bail!("achieved error {worst} exceeds tolerance {tol}");
                }
                None
            }
        };
        let mut csv = Csv::new(&["x", "f", "approx", "error"]);
        for x in domain.linspace(a.grid.max(2)) {
            let (fx, px) = (f.eval(x)?, pwa.eval(x)?);
            csv.nums(&[x, fx, px, (fx - px).abs()]);
        }
        csv.write(&dir.join(format!("approx_{i}.csv")))?;
        fits.push(Fit {
            tolerance: tol,
            method: a.method.label(),
            breakpoints: pwa.len(),
            eval_err: worst,
            empirical_max_error: emp,
            d3,
            segment_bounds: bounds,
            pwa,
        });
    }
    let report = Report {
        expression: a.f.clone(),
        variable: f.var().to_string(),
        domain,
        fits,
    };
    write_json(&dir.join("approx.json"), &report)
}

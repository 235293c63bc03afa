use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::ValueEnum;
use pwacomp::alloc::log_space;
use pwacomp::approx;
use pwacomp::bench;
use pwacomp::{Interval64, Method1Config, Method2Config, Staircase, Univariate};

use crate::args::{parse_domain, parse_range, Method};
use crate::out::{num, out_dir, write_json, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bench {
    Table1,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long = "f", conflicts_with = "bench", requires = "domain")]
    pub f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Run both methods on the built-in suite and write one CSV per function.
    #[arg(long, value_enum)]
    pub bench: Option<Bench>,
    #[arg(long, default_value = "1e-4:1")]
    pub tau_range: String,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "1")]
    pub method: Method,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn counts(f: &Univariate, domain: Interval64, taus: &[f64], method: Method) -> Result<Vec<usize>> {
    let d3 = match method {
        Method::Two => Some(approx::certified_d3(f, domain)?),
        Method::One => None,
    };
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let p = match d3 {
            None => approx::method1_breakpoints(f, domain, &Method1Config::new(tau))?,
            Some(d3) => approx::method2_breakpoints(f, domain, &Method2Config::new(tau, d3))?,
        };
        out.push(p.len());
    }
    Ok(out)
}

pub fn run(a: &Args) -> Result<()> {
    let (lo, hi) = parse_range(&a.tau_range)?;
    if !(lo > 0.0 && lo < hi) {
        bail!("tolerance range must satisfy 0 < lo < hi");
    }
    if a.samples < 2 {
        bail!("need at least 2 samples");
    }
    let taus = log_space(lo, hi, a.samples);
    let dir = out_dir(&a.out)?;
    match (&a.bench, &a.f, &a.domain) {
        (Some(Bench::Table1), _, _) => {
            for b in bench::table1() {
                let f = b.function();
                let d = b.domain::<f64>();
                let n1 = counts(&f, d, &taus, Method::One)?;
                let n2 = counts(&f, d, &taus, Method::Two)?;
                let mut csv = Csv::new(&["tau", "n_method1", "n_method2"]);
                let mut inverted = 0;
                for ((t, a1), a2) in taus.iter().zip(&n1).zip(&n2) {
                    csv.row(&[num(*t), a1.to_string(), a2.to_string()]);
                    inverted += usize::from(a1 > a2);
                }
                csv.write(&dir.join(format!("staircase_{}.csv", b.name)))?;
                println!(
                    "{:<10} method1 n {}..{}  method2 n {}..{}  rows with method1 > method2: {inverted}",
                    b.name,
                    n1.last().unwrap_or(&0),
                    n1.first().unwrap_or(&0),
                    n2.last().unwrap_or(&0),
                    n2.first().unwrap_or(&0)
                );
            }
            Ok(())
        }
        (None, Some(f), Some(d)) => {
            let f = Univariate::parse(f)?;
            let domain = parse_domain(d)?;
            let n = counts(&f, domain, &taus, a.method)?;
            let s = Staircase::from_samples(None, taus.iter().copied().zip(n).collect());
            if !s.is_monotone() {
                bail!("staircase is not monotone");
            }
            let mut csv = Csv::new(&["tau", "n"]);
            for (t, n) in &s.candidates {
                csv.row(&[num(*t), n.to_string()]);
            }
            csv.write(&dir.join("staircase.csv"))?;
            write_json(&dir.join("staircase.json"), &s)?;
            println!("{} frontier steps, n from {} to {}", s.len(), s.candidates.last().map_or(0, |c| c.1), s.candidates.first().map_or(0, |c| c.1));
            Ok(())
        }
        _ => bail!("give --f with --domain, or --bench table1"),
    }
}

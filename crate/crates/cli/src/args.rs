use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use pwacomp::chain::FitMethod;
use pwacomp::Interval64;

/// `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("expected lo:hi, got `{s}`"))?;
    let lo: f64 = a.trim().parse().with_context(|| format!("bad number `{a}`"))?;
    let hi: f64 = b.trim().parse().with_context(|| format!("bad number `{b}`"))?;
    Ok((lo, hi))
}

pub fn parse_domain(s: &str) -> Result<Interval64> {
    let (lo, hi) = parse_range(s)?;
    if !(lo < hi) {
        bail!("empty domain `{s}`: need lo < hi");
    }
    Ok(Interval64::new(lo, hi)?)
}

/// `name=lo:hi`, possibly repeated.
pub fn parse_box(items: &[String]) -> Result<BTreeMap<String, Interval64>> {
    let mut out = BTreeMap::new();
    for it in items {
        let (name, range) = it
            .split_once('=')
            .ok_or_else(|| anyhow!("expected name=lo:hi, got `{it}`"))?;
        let d = parse_domain(range)?;
        if out.insert(name.trim().to_string(), d).is_some() {
            bail!("variable `{name}` boxed twice");
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl Method {
    pub fn fit(self) -> FitMethod {
        match self {
            Method::One => FitMethod::Method1,
            Method::Two => FitMethod::Method2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::One => "method1",
            Method::Two => "method2",
        }
    }
}

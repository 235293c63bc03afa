//! End-to-end checks at pinned tolerances. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use pwacomp::alloc::{self, log_space, Item, StaircaseOptions};
use pwacomp::approx::{self, theorem1_bound};
use pwacomp::bench;
use pwacomp::chain::{ErrorMode, FitMethod, FitSpec, UnaryKind};
use pwacomp::{Expr, Graph64, Interval64, Method1Config, Method2Config, Univariate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

struct Outcome {
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failed.push(what);
        }
    }

    fn near(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, format!("{name} {got:.6} vs {want} (tol {tol:e})"));
    }

    fn done(self, elapsed: f64, limit: f64) -> Outcome {
        let mut failed = self.failed;
        if elapsed >= limit {
            failed.push(format!("runtime {elapsed:.2} s >= {limit} s"));
        }
        let detail = if failed.is_empty() {
            format!("{}; {elapsed:.2} s", self.notes.join("; "))
        } else {
            format!(
                "failed: {} | passed: {}; {elapsed:.2} s",
                failed.join("; "),
                self.notes.join("; ")
            )
        };
        Outcome {
            ok: failed.is_empty(),
            detail,
        }
    }
}

fn listed<T: std::fmt::Debug>(v: &[T]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        format!(" {v:?}")
    }
}

fn sin_recip_squared() -> Graph64 {
    Graph64::decompose(&Expr::parse("(sin(1/x))^2").unwrap(), &single_box(1.0, 3.0)).unwrap()
}

fn secant_chain() -> Outcome {
    let t = Instant::now();
    let mut c = Checks::default();
    let mut g = sin_recip_squared();
    g.fit_node(1, &FitSpec::Method1(Method1Config::new(0.05))).unwrap();
    g.fit_node(2, &FitSpec::Secant).unwrap();
    g.fit_node(3, &FitSpec::Secant).unwrap();
    let s3 = g.node(2).pwa.as_ref().unwrap().segments()[0];
    let s4 = g.node(3).pwa.as_ref().unwrap().segments()[0];
    c.near("w3 slope", s3.slope, 0.771, 1e-3);
    c.near("w3 intercept", s3.intercept, 0.0701, 1e-3);
    c.near("w4 slope", s4.slope, 1.170, 1e-3);
    c.near("w4 intercept", s4.intercept, -0.2753, 1e-3);
    c.near("tau3", g.node(2).tau, 0.0342, 1e-3);
    c.near("tau4", g.node(3).tau, 0.0661, 1e-3);
    let e = g.propagate_error(ErrorMode::AffineThm2).unwrap();
    c.near("eps3", e[2], 0.0728, 1e-3);
    c.near("eps4", e[3], 0.1512, 1e-3);
    c.done(t.elapsed().as_secs_f64(), 1.0)
}

fn tolerance_chain() -> Outcome {
    let t = Instant::now();
    let mut c = Checks::default();
    let mut g = sin_recip_squared();
    let taus: BTreeMap<usize, f64> = g.unary_ids().into_iter().map(|i| (i, 0.01)).collect();
    g.fit_tolerances(&taus, FitMethod::Method1).unwrap();
    let cor1 = g.propagate_error(ErrorMode::PwaCor1).unwrap();
    let cor3 = g.propagate_error(ErrorMode::SecantCor3).unwrap();
    for (i, want) in [0.01, 0.0186, 0.0391].into_iter().enumerate() {
        c.near(&format!("cor1 eps{}", i + 2), cor1[i + 1], want, 1e-3);
    }
    for (i, want) in [0.01, 0.0194, 0.0427].into_iter().enumerate() {
        c.near(&format!("cor3 eps{}", i + 2), cor3[i + 1], want, 1e-3);
    }
    let exact = 0.01 + (1.0f64 / 3.0).cos() * 0.01;
    c.check(
        (cor3[2] - exact).abs() <= 1e-12,
        format!("cor3 eps3 - (0.01 + cos(1/3) 0.01) = {:.1e}", cor3[2] - exact),
    );
    c.done(t.elapsed().as_secs_f64(), 5.0)
}

fn sine_breakpoints() -> Outcome {
    let t = Instant::now();
    let mut c = Checks::default();
    let f = Univariate::parse("sin(x)").unwrap();
    let p = approx::method1_breakpoints(&f, Interval64::new(0.0, TAU).unwrap(), &Method1Config::new(0.3)).unwrap();
    let xs = p.breakpoints();
    c.check(xs.len() == 4, format!("{} breakpoints", xs.len()));
    c.check(xs[0] == 0.0 && xs[xs.len() - 1] == TAU, "endpoints 0 and 2 pi".into());
    let cfg = Method1Config::new(1.0);
    let worst = xs
        .windows(2)
        .map(|w| approx::eval_err_expr(&f, w[0], w[1], &cfg).unwrap())
        .fold(0.0, f64::max);
    c.check(worst <= 0.3 + 1e-8, format!("max segment error {worst:.9}"));
    c.done(t.elapsed().as_secs_f64(), 1.0)
}

fn tower() -> Outcome {
    let t0 = Instant::now();
    let mut c = Checks::default();
    let g0 = Graph64::decompose(&bench::tower_expr(), &bench::tower_box()).unwrap();
    let (nr, ns) = (g0.count_unary(UnaryKind::Reciprocal), g0.count_unary(UnaryKind::Square));
    c.check(nr == 4 && ns == 8 && g0.unary_ids().len() == 12, format!("{nr} reciprocal, {ns} square"));
    let opts = StaircaseOptions {
        samples: 500,
        method: FitMethod::Method1,
        eval_err_samples: 128,
    };
    let stairs = alloc::graph_staircases(&g0, 1e-3, 1.0, &opts).unwrap();
    let t = Instant::now();
    let res = alloc::solve_p2(&g0, &stairs, 163).unwrap();
    let solve = t.elapsed().as_secs_f64();
    c.check(solve < 5.0, format!("solve {solve:.4} s"));
    c.check(res.total_breakpoints <= 163, format!("{} breakpoints", res.total_breakpoints));
    let bound = res.composed_bound;
    c.check((0.40..=0.49).contains(&bound), format!("bound {bound:.4} in [0.40, 0.49]"));
    let mut g = g0.clone();
    g.fit_tolerances(&res.taus(), FitMethod::Method1).unwrap();
    let emp = g.empirical_max_error(201).unwrap();
    c.check(emp <= bound, format!("empirical {emp:.4} <= bound"));
    c.check((0.25..=0.40).contains(&emp), format!("empirical {emp:.4} in [0.25, 0.40]"));
    let counts = bench::even_split(&g0.unary_ids(), 163);
    let mut gu = g0.clone();
    gu.fit_all(|id| Ok(FitSpec::Uniform(counts[&id]))).unwrap();
    let emp_u = gu.empirical_max_error(201).unwrap();
    c.check(
        (0.5..=0.7).contains(&emp_u),
        format!("uniform baseline ({} breakpoints) empirical {emp_u:.4} in [0.5, 0.7]", gu.total_breakpoints()),
    );
    let mut out = c.done(t0.elapsed().as_secs_f64(), f64::INFINITY);
    out.detail.push_str(" total");
    out
}

fn soundness() -> Outcome {
    let t = Instant::now();
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // geometric midpoints of 21 log-spaced points in [1e-4, 1]
    let taus: Vec<f64> = log_space(1e-4f64, 1.0, 41).into_iter().skip(1).step_by(2).collect();
    let measure = Method1Config::new(1.0);
    let (mut fits, mut over, mut inverted, mut undominated) = (0, Vec::new(), Vec::new(), 0);
    for b in bench::table1() {
        let f = b.function();
        let d = b.domain::<f64>();
        let d3 = approx::certified_d3(&f, d).unwrap();
        for &tau in &taus {
            let p1 = approx::method1_breakpoints(&f, d, &Method1Config::new(tau)).unwrap();
            let p2 = approx::method2_breakpoints(&f, d, &Method2Config::new(tau, d3)).unwrap();
            for p in [&p1, &p2] {
                fits += 1;
                let e = p.empirical_max_error(&f, 10_000).unwrap();
                if !(e <= tau + 1e-6) {
                    over.push(format!("{} tau {tau:.2e}: {e:.3e}", b.name));
                }
            }
            if p2.len() < p1.len() {
                inverted.push(format!("{} tau {tau:.2e}: {} < {}", b.name, p2.len(), p1.len()));
            }
        }
        let f2 = f.compile_derivative::<f64>(2).unwrap();
        for _ in 0..500 {
            let x0 = rng.gen_range(d.lo()..d.hi());
            let x1 = rng.gen_range(d.lo()..d.hi());
            let (a, bb) = (x0.min(x1), x0.max(x1));
            if a == bb {
                continue;
            }
            let bound = theorem1_bound(f2.call(a).abs(), d3, bb - a).unwrap();
            let e = approx::eval_err_expr(&f, a, bb, &measure).unwrap();
            if !(e <= bound * (1.0 + 1e-12) + 1e-15) {
                undominated += 1;
            }
        }
    }
    c.check(over.is_empty(), format!("{fits} fits within tau + 1e-6{}", listed(&over)));
    c.check(inverted.is_empty(), format!("method 2 count >= method 1 count{}", listed(&inverted)));
    c.check(undominated == 0, format!("{undominated} of 2000 subintervals above the cubic bound"));
    c.done(t.elapsed().as_secs_f64(), 60.0)
}

/// Random unary chain of depth 1..=4 on a random interval, as expression text.
fn random_chain(rng: &mut ChaCha8Rng) -> (String, f64, f64) {
    let lo: f64 = rng.gen_range(-2.0..2.0);
    let hi = lo + rng.gen_range(0.2..2.0);
    let depth = rng.gen_range(1..=4);
    let mut text = "x".to_string();
    let range = |t: &str| {
        let g = Graph64::decompose(&Expr::parse(t).unwrap(), &single_box(lo, hi)).unwrap();
        g.node(g.output()).domain
    };
    for _ in 0..depth {
        let d = range(&text);
        let op = loop {
            let k = rng.gen_range(0..5);
            if k == 4 && d.mag() > 3.0 {
                continue;
            }
            break k;
        };
        text = match op {
            0 => format!("sin({text})"),
            1 => format!("cos({text})"),
            2 => format!("({text})^2"),
            3 => {
                let shift = if d.lo() < 0.5 { 0.5 - d.lo() + rng.gen_range(0.0..1.0) } else { 0.0 };
                format!("1 / ({text} + {shift:?})")
            }
            _ => format!("exp({text})"),
        };
    }
    (text, lo, hi)
}

fn chains() -> Outcome {
    let t = Instant::now();
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut bad_emp, mut bad_order, mut bad_recon, mut worst_ratio) = (0, 0, 0, 0.0f64);
    for _ in 0..50 {
        let (text, lo, hi) = random_chain(&mut rng);
        let mut g = Graph64::decompose(&Expr::parse(&text).unwrap(), &single_box(lo, hi)).unwrap();
        let taus: BTreeMap<usize, f64> = g
            .unary_ids()
            .into_iter()
            .map(|i| (i, 10f64.powf(rng.gen_range(-3.0..-1.0))))
            .collect();
        g.fit_tolerances(&taus, FitMethod::Method1).unwrap();
        let out = g.output();
        let cor1 = g.propagate_error(ErrorMode::PwaCor1).unwrap()[out];
        let cor3 = g.propagate_error(ErrorMode::SecantCor3).unwrap()[out];
        let mut emp = 0.0f64;
        for _ in 0..10_000 {
            let x = rng.gen_range(lo..=hi);
            let (e, a) = g.eval_composed(&[("x", x)]).unwrap();
            emp = emp.max((e - a).abs());
        }
        worst_ratio = worst_ratio.max(emp / cor1);
        bad_emp += usize::from(!(emp <= cor1));
        bad_order += usize::from(!(cor1 <= cor3));
        let s = g.sensitivity().unwrap();
        let recon = taus.iter().fold(0.0, |acc, (i, t)| acc + s[*i] * t);
        bad_recon += usize::from(!((recon - cor3).abs() <= 1e-12 * cor3.max(1.0)));
    }
    c.check(bad_emp == 0, format!("empirical <= cor1 (worst ratio {worst_ratio:.3})"));
    c.check(bad_order == 0, "cor1 <= cor3".into());
    c.check(bad_recon == 0, "sensitivity reconstruction within 1e-12".into());
    c.done(t.elapsed().as_secs_f64(), 120.0)
}

fn allocation() -> Outcome {
    let t = Instant::now();
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut p2_bad, mut p1_bad) = (0, 0);
    for _ in 0..200 {
        let k = rng.gen_range(1..=4);
        let stairs: Vec<_> = (0..k).map(|_| random_staircase(&mut rng, 12)).collect();
        let items: Vec<Item<'_, f64>> = stairs
            .iter()
            .enumerate()
            .map(|(i, s)| Item {
                node: i,
                coeff: rng.gen_range(0.1..3.0),
                staircase: s,
            })
            .collect();
        let all = enumerate(&items);
        let lo = all.iter().map(|e| e.2).min().unwrap();
        let hi = all.iter().map(|e| e.2).max().unwrap();
        let budget = rng.gen_range(lo..=hi);
        let r = alloc::solve_p2_items(&items, budget, 0).unwrap();
        let ok2 = Some(r.composed_bound) == brute_p2(&items, budget)
            && r.total_breakpoints <= budget
            && recompute(&r) == r.composed_bound;
        p2_bad += usize::from(!ok2);
        let bmin = all.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let bmax = all.iter().map(|e| e.0).fold(0.0, f64::max);
        let target = bmin + (bmax - bmin) * rng.gen_range(0.0..1.0);
        let r = alloc::solve_p1_items(&items, target, 0).unwrap();
        let ok1 = Some(r.total_breakpoints) == brute_p1(&items, target) && r.composed_bound <= target;
        p1_bad += usize::from(!ok1);
    }
    c.check(p2_bad == 0, format!("P2 matches enumeration ({p2_bad} mismatches)"));
    c.check(p1_bad == 0, format!("P1 matches enumeration ({p1_bad} mismatches)"));
    c.done(t.elapsed().as_secs_f64(), 30.0)
}

fn richardson(f: &pwacomp::expr::CompiledFn<f64>, x: f64) -> f64 {
    let step = |h: f64| {
        (8.0 * (f.call(x + h) - f.call(x - h)) - (f.call(x + 2.0 * h) - f.call(x - 2.0 * h))) / (12.0 * h)
    };
    // shrink the step until two successive estimates agree
    let mut h = 1e-2 * x.abs().max(1.0);
    let mut prev = step(h);
    for _ in 0..12 {
        h /= 4.0;
        let cur = step(h);
        if (cur - prev).abs() <= 1e-9 * cur.abs().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    prev
}

fn plumbing() -> Outcome {
    let t = Instant::now();
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad_d = Vec::new();
    for _ in 0..1000 {
        let text = smooth_expr(&mut rng, 3);
        let f = match Univariate::new(Expr::parse(&text).unwrap(), "x") {
            Ok(f) => f,
            Err(e) => panic!("{text}: {e}"),
        };
        let x = rng.gen_range(-2.0..2.0);
        let d = f.compile_derivative::<f64>(1).unwrap().call(x);
        let fd = richardson(&f.compile::<f64>(), x);
        if !((d - fd).abs() <= 1e-5 * d.abs().max(1.0)) {
            bad_d.push(format!("{text} at {x}: {d} vs {fd}"));
        }
    }
    c.check(bad_d.is_empty(), format!("1000 derivatives vs finite differences{}", listed(&bad_d)));
    let mut escapes = Vec::new();
    for _ in 0..10_000 {
        let text = smooth_expr(&mut rng, 3);
        let e = Expr::parse(&text).unwrap();
        let lo: f64 = rng.gen_range(-3.0..3.0);
        let hi = lo + rng.gen_range(0.0..2.0);
        let b = single_box(lo, hi);
        let enc = e.eval_interval(&b).unwrap();
        for _ in 0..4 {
            let x = rng.gen_range(lo..=hi);
            let v: f64 = e.eval_point(&[("x", x)]).unwrap();
            if !enc.contains(v) {
                escapes.push(format!("{text} on [{lo}, {hi}] at {x}"));
            }
        }
    }
    c.check(escapes.is_empty(), format!("10000 interval enclosures{}", listed(&escapes)));
    let mut not_monotone = Vec::new();
    for b in bench::table1() {
        let s = alloc::build_staircase(&b.function(), b.domain::<f64>(), 1e-4, 1.0, 100, FitMethod::Method1).unwrap();
        let strict = s.candidates.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1);
        if !strict || !s.is_monotone() {
            not_monotone.push(b.name);
        }
    }
    c.check(not_monotone.is_empty(), format!("strictly monotone frontiers{}", listed(&not_monotone)));
    c.done(t.elapsed().as_secs_f64(), f64::INFINITY)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 single secant propagation", secant_chain),
        ("2 per-node tolerance propagation", tolerance_chain),
        ("3 sine at tau 0.3", sine_breakpoints),
        ("4 tower benchmark", tower),
        ("5 method soundness", soundness),
        ("6 composition dominance", chains),
        ("7 allocation optimality", allocation),
        ("8 numerical plumbing", plumbing),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let o = run();
        failures += usize::from(!o.ok);
        println!("{} criterion {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of 8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

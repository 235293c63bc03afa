use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwacomp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> String {
    let o = run(args, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn approx_sine_method1() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["approx", "--f", "sin(x)", "--domain", "0:6.283185307", "--tol", "0.3", "--method", "1"], dir.path());
    assert!(stdout.contains("breakpoints 4"), "{stdout}");
    let v = json(&dir.path().join("approx.json"));
    assert_eq!(v["fits"][0]["breakpoints"], 4);
    assert_eq!(v["fits"][0]["pwa"]["breakpoints"].as_array().unwrap().len(), 4);
    let csv = fs::read_to_string(dir.path().join("approx_0.csv")).unwrap();
    assert!(csv.starts_with("x,f,approx,error\n"));
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), 2002);
}

#[test]
fn approx_affine_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["approx", "--f", "2*x+1", "--domain", "-1:1", "--tol", "0.001"], dir.path());
    let v = json(&dir.path().join("approx.json"));
    assert_eq!(v["fits"][0]["breakpoints"], 2);
    assert_eq!(v["fits"][0]["eval_err"].as_f64(), Some(0.0));
}

#[test]
fn approx_method2_bounds() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["approx", "--f", "1/x", "--domain", "1:10", "--tol", "0.05,0.01", "--method", "2"], dir.path());
    let v = json(&dir.path().join("approx.json"));
    for fit in v["fits"].as_array().unwrap() {
        let tol = fit["tolerance"].as_f64().unwrap();
        for b in fit["segment_bounds"].as_array().unwrap() {
            assert!(b.as_f64().unwrap() <= tol);
        }
    }
    assert!(dir.path().join("approx_1.csv").exists());
}

#[test]
fn compose_table_three() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["compose", "--f", "(sin(1/x))^2", "--box", "x=1:3", "--tol", "0.01"], dir.path());
    let v = json(&dir.path().join("compose.json"));
    let cor1: Vec<f64> = v["eps"]["pwa_cor1"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let cor3: Vec<f64> = v["eps"]["secant_cor3"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (g, w) in cor1[1..].iter().zip([0.01, 0.0186, 0.0391]) {
        assert!((g - w).abs() < 1e-3);
    }
    for (g, w) in cor3[1..].iter().zip([0.01, 0.0194, 0.0427]) {
        assert!((g - w).abs() < 1e-3);
    }
    let csv = fs::read_to_string(dir.path().join("compose.csv")).unwrap();
    assert!(csv.starts_with("x,exact,approx,error,eps_cor1,eps_cor3\n"));
}

#[test]
fn compose_secant_table_two() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["compose", "--f", "(sin(1/x))^2", "--box", "x=1:3", "--tol", "0.05,0.0342,0.0661", "--mode", "secant"],
        dir.path(),
    );
    let v = json(&dir.path().join("compose.json"));
    let e: Vec<f64> = v["eps"]["affine_thm2"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((e[2] - 0.0728).abs() < 1e-3 && (e[3] - 0.1512).abs() < 1e-3, "{e:?}");
}

#[test]
fn compose_affine_zero_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["compose", "--f", "2*x + 3*y - 1", "--box", "x=-1:1", "--box", "y=0:2", "--tol", "0", "--grid", "51", "--csv-points", "20"], dir.path());
    let v = json(&dir.path().join("compose.json"));
    assert_eq!(v["empirical_max_error"].as_f64(), Some(0.0));
    assert!(v["eps"]["secant_cor3"].as_array().unwrap().iter().all(|x| x.as_f64() == Some(0.0)));
    assert_eq!(fs::read_to_string(dir.path().join("compose.csv")).unwrap().lines().count(), 21);
}

#[test]
fn compose_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["compose", "--f", "x*y + sin(x)", "--box", "x=0:1", "--box", "y=1:2", "--tol", "0.01", "--grid", "101", "--seed", "3"];
    ok(&args, a.path());
    ok(&args, b.path());
    for f in ["compose.json", "compose.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn allocate_single_node_minimal_budget() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["allocate", "--f", "sin(x)", "--box", "x=0:6.283185307", "--tau-range", "0.01:1", "--samples", "40"];
    let mut with_budget = args.to_vec();
    // the coarsest candidate of sin on [0, 2 pi] over this range has 3 breakpoints
    with_budget.extend(["--budget", "3", "--grid", "501"]);
    ok(&with_budget, dir.path());
    let v = json(&dir.path().join("allocation.json"));
    assert_eq!(v["allocation"]["total_breakpoints"], 3);
    let s = json(&dir.path().join("staircases.json"));
    let cands = s["1"]["candidates"].as_array().unwrap();
    let coarsest = cands.last().unwrap();
    assert_eq!(v["allocation"]["choices"][0]["tau"], coarsest[0]);
    let mut too_small = args.to_vec();
    too_small.extend(["--budget", "2"]);
    let o = run(&too_small, dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("minimal feasible total 3"));
}

#[test]
fn allocate_tolerance_mode() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["allocate", "--f", "(sin(1/x))^2", "--box", "x=1:3", "--tolerance", "0.05", "--samples", "40", "--grid", "501", "--uniform-baseline"],
        dir.path(),
    );
    let v = json(&dir.path().join("allocation.json"));
    assert_eq!(v["allocation"]["objective"], "P1");
    assert!(v["allocation"]["composed_bound"].as_f64().unwrap() <= 0.05);
    let val = &v["validation"];
    assert!(val["empirical_max_error"].as_f64().unwrap() <= val["eps_cor3"].as_f64().unwrap());
    assert!(v["uniform_baseline"]["validation"]["total_breakpoints"].as_u64().is_some());
}

#[test]
fn staircase_outputs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["staircase", "--f", "sin(x)", "--domain", "0:6.283185307", "--samples", "100"], dir.path());
    let csv = fs::read_to_string(dir.path().join("staircase.csv")).unwrap();
    let rows: Vec<(f64, usize)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));

    ok(&["staircase", "--f", "3*x - 1", "--domain", "-1:1", "--samples", "20"], dir.path());
    let csv = fs::read_to_string(dir.path().join("staircase.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["approx", "--f", "sin(x", "--domain", "0:1", "--tol", "0.1"],
        vec!["approx", "--f", "sin(x)", "--domain", "1:0", "--tol", "0.1"],
        vec!["approx", "--f", "sin(x)", "--domain", "0:1", "--tol", "-1"],
        vec!["compose", "--f", "x + y", "--box", "x=0:1", "--tol", "0.1"],
        vec!["compose", "--f", "1/x", "--box", "x=-1:1", "--tol", "0.1"],
    ] {
        let o = run(&args, dir.path());
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
}

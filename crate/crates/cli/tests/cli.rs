use std::fs;
use std::process::{Command, Output};

fn rootvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootvar")).args(args).env("ROOTVAR_THREADS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .parse()
        .unwrap()
}

#[test]
fn asymptotics_kac_constant() {
    let o = rootvar(&["asymptotics", "--tau", "0", "--tol", "1e-10"]);
    assert!(o.status.success());
    let k = value(&stdout(&o), "kappa");
    let pi = std::f64::consts::PI;
    assert!((k - (1.0 - 2.0 / pi) / pi).abs() < 1e-8);
}

#[test]
fn asymptotics_table_is_csv() {
    let o = rootvar(&["asymptotics", "--tau", "1", "--table", "0,0.9,10"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().next(), Some("u,delta,sigma,f"));
    assert_eq!(s.lines().count(), 11);
}

#[test]
fn count_exact_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.txt");
    // (x - 1/3)(x + 1/2)(x - 2) = x^3 - 11/6 x^2 - 1/2 x + 1/3, one hex-float
    fs::write(&p, "1/3\n-0x1.0000000000001p-1\n-11/6\n1\n").unwrap();
    let o = rootvar(&["count", "--poly", p.to_str().unwrap(), "--interval", "-1,1"]);
    assert!(o.status.success(), "{o:?}");
    // the hex-float is not exactly -1/2, but the roots only move slightly
    assert!(stdout(&o).contains("count = 2"));
    fs::write(&p, "1/3\n-0.5\n-11/6\n1\n").unwrap();
    for m in ["descartes", "sturm"] {
        let o = rootvar(&["count", "--poly", p.to_str().unwrap(), "--interval", "-0.5,1/3", "--method", m]);
        assert!(stdout(&o).contains("count = 2"), "{m}");
    }
}

#[test]
fn check_conditions_kac() {
    let o = rootvar(&["check-conditions", "--model", "kac", "--n", "1000", "--d", "0.25"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("satisfies_a2: true") && s.contains("satisfies_ov: true"), "{s}");
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let o = rootvar(&[
        "simulate", "--model", "kac", "--n", "32", "--dist", "rademacher", "--samples", "300", "--seed", "5", "--d",
        "0.25", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("region,n,samples,mean,variance,se_mean,var_ci_lo,var_ci_hi,seed"));
    assert_eq!(lines.count(), 7);
    // same seed, same bytes
    let again = rootvar(&[
        "simulate", "--model", "kac", "--n", "32", "--dist", "rademacher", "--samples", "300", "--seed", "5",
    ]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn kacrice_reports_panels() {
    let o = rootvar(&["kacrice", "--model", "kac", "--n", "16", "--region", "-1,1", "--stat", "mean", "--tol", "1e-8"]);
    assert!(o.status.success(), "{o:?}");
    let s = stdout(&o);
    assert!(value(&s, "panels") >= 1.0);
    assert!(value(&s, "error") <= 1e-8);
}

#[test]
fn sweep_outputs_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.cfg");
    fs::write(
        &plan,
        "model = kac\ndist = gaussian, uniform\nn = 16, 24, 32\nsamples = 50\nseed = 2\noutputs = table, fig1, fig2, fig3\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = rootvar(&["sweep", "--plan", plan.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    for f in ["results.csv", "fig1.svg", "fig2.svg", "fig3.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("# rootvar "));

    fs::write(&plan, "model = kac\nn = 16\nsamples = 10\nseed = 1\ncolour = red\n").unwrap();
    let o = rootvar(&["sweep", "--plan", plan.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&plan, "model = kac\nn = 16, 32\nsamples = 2000\nseed = 1\nbudget_seconds = 1e-9\n").unwrap();
    let o = rootvar(&["sweep", "--plan", plan.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_model_is_a_usage_error() {
    let o = rootvar(&["check-conditions", "--model", "kac:L=2", "--n", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

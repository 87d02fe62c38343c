//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Pass criterion numbers as
//! arguments to run a subset: `cargo test --test acceptance -- 1 2 8`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rootvar::asymptotics::{alpha_rho, contraction_bound, delta_tau, f_tau, kappa_tau, lambda_fn, predicted_stats};
use rootvar::experiments::fit_slope;
use rootvar::kacrice::{expectation_quadrature, variance_quadrature, Domain, KacRice};
use rootvar::montecarlo::{run_simulation, run_simulation_with_threads, MomentAccumulator, SimulationConfig};
use rootvar::rootcount::{count_roots, count_roots_sturm, RealInterval};
use rootvar::sampling::{sample_coefficients, XiDistribution};
use rootvar::{CoefficientModel, Region, RegionSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn model(s: &str) -> CoefficientModel {
    s.parse().unwrap()
}

fn c1_kappa_zero() -> Outcome {
    let t = Instant::now();
    let k = kappa_tau(0.0, 1e-10).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let want = (1.0 - 2.0 / PI) / PI;
    let err = (k.kappa - want).abs();
    outcome(err <= 1e-8 && secs < 1.0, format!("kappa_0 = {:.12} |err| = {err:.1e} in {:.3} s", k.kappa, secs))
}

fn c2_total_slope_tau_one() -> Outcome {
    let s = predicted_stats(1.0).unwrap();
    let v = 2.0 * s.kappa + (2.0 / PI) * (1.0 - 2.0 / PI);
    let err = (v - 0.575737845).abs();
    outcome(err <= 1e-6, format!("2 kappa_1 + (2/pi)(1 - 2/pi) = {v:.10} |err| = {err:.1e}"))
}

fn c3_mean_oracle() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in ["kac", "deriv:k=1:kac"] {
        for n in [8, 64, 512] {
            let cfg = SimulationConfig::new(model(m), n, XiDistribution::Gaussian, 100_000, 3000 + n as u64);
            let r = run_simulation(&cfg).unwrap();
            let s = r.get(Region::Real).unwrap();
            let c = model(m).build(n).unwrap();
            let q = expectation_quadrature(&c.values, &Domain::Region(Region::Real), 1e-8).unwrap();
            let z = (s.mean - q.value) / s.se_mean;
            pass &= z.abs() < 3.0;
            parts.push(format!("{m} n={n} z={z:+.2}"));
        }
    }
    outcome(pass, parts.join(", "))
}

fn c4_variance_oracle() -> Outcome {
    let m = model("deriv:k=1:kac");
    let n = 1024;
    let cfg = SimulationConfig::new(m.clone(), n, XiDistribution::Gaussian, 4000, 4004);
    let r = run_simulation(&cfg).unwrap();
    let s = r.get(Region::Real).unwrap();
    let c = m.build(n).unwrap();
    let q = variance_quadrature(&c.values, &Domain::Region(Region::Real), 1e-6).unwrap();
    let z = (s.variance - q.value) / s.se_variance;
    outcome(
        z.abs() < 3.0,
        format!("tau=1 n={n}: mc {:.4} +- {:.4}, quadrature {:.6}, z={z:+.2}", s.variance, s.se_variance, q.value),
    )
}

fn core_slope(m: &str) -> (f64, Vec<f64>) {
    let ns = [1_000usize, 10_000, 100_000];
    let c = model(m);
    let vs: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let co = c.build(n).unwrap();
            KacRice::new(&co.values).unwrap().variance(&Domain::Region(Region::Core), 1e-4).unwrap().value
        })
        .collect();
    let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
    (fit_slope(&xs, &vs).unwrap().slope, vs)
}

fn c5_variance_slopes() -> Outcome {
    let (kac, kv) = core_slope("kac");
    let (mono, mv) = core_slope("monomial:tau=1,c1=1");
    let ek = (kac / 0.462674 - 1.0).abs();
    let em = (mono / 0.575738 - 1.0).abs();
    outcome(
        ek <= 0.10 && em <= 0.15,
        format!(
            "kac slope {kac:.5} ({:+.1}%) from {kv:.4?}; monomial tau=1 slope {mono:.5} ({:+.1}%) from {mv:.4?}",
            100.0 * (kac / 0.462674 - 1.0),
            100.0 * (mono / 0.575738 - 1.0)
        ),
    )
}

fn tau_one_kernel() -> (KacRice, RegionSpec) {
    let n = 10_000;
    let c = model("monomial:tau=1,c1=1").build(n).unwrap();
    (KacRice::new(&c.values).unwrap(), RegionSpec::with_default_d(n).unwrap())
}

/// Worst deviation and miss count over 1000 pairs in `I_n x I_n` with
/// `alpha in [0.1, 0.9]`; `pick` draws a point of `I_n`.
fn rho2_pairs(kr: &KacRice, rng: &mut ChaCha8Rng, pick: &dyn Fn(&mut ChaCha8Rng) -> f64) -> (usize, f64) {
    let (mut bad, mut worst, mut got) = (0, 0.0f64, 0);
    while got < 1000 {
        let (x, y) = (pick(rng), pick(rng));
        let (a, _) = alpha_rho(x, y).unwrap();
        if !(0.1..=0.9).contains(&a) {
            continue;
        }
        got += 1;
        let f = kr.frame(x, y);
        let dev = (f.rho2 / (f.rho1_x * f.rho1_y) - (1.0 + f_tau(1.0, a).unwrap())).abs();
        worst = worst.max(dev);
        bad += usize::from(dev > 0.05);
    }
    (bad, worst)
}

fn c6_correlation_structure() -> Outcome {
    let (kr, spec) = tau_one_kernel();
    let (a, b) = (spec.alpha, spec.beta);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (bad, worst) = rho2_pairs(&kr, &mut rng, &|r| r.gen_range(a..b));
    // diagnostic: the same check with points uniform in t = atanh x
    let (ta, tb) = (a.atanh(), b.atanh());
    let (hbad, hworst) = rho2_pairs(&kr, &mut rng, &|r| r.gen_range(ta..tb).tanh());
    outcome(
        bad <= 10,
        format!(
            "x uniform on I_n: {bad}/1000 off by > 0.05 (worst {worst:.4}); [diagnostic, atanh-uniform: {hbad}/1000, worst {hworst:.4}]"
        ),
    )
}

fn c7_decoupling() -> Outcome {
    let (kr, spec) = tau_one_kernel();
    let (a, b) = (spec.alpha, spec.beta);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rel = |x: f64, y: f64| {
        let f = kr.frame(x, y);
        let p = f.rho1_x * f.rho1_y;
        (f.rho2 - p).abs() / p
    };
    let (mut worst, mut over) = (0.0f64, 0);
    for _ in 0..1000 {
        let x = rng.gen_range(a..b);
        let y = rng.gen_range(1.0 / b..1.0 / a);
        let e = rel(x, y);
        worst = worst.max(e);
        over += usize::from(e > 1e-6);
    }
    let (ta, tb) = (a.atanh(), b.atanh());
    let mut hworst = 0.0f64;
    for _ in 0..1000 {
        let x = rng.gen_range(ta..tb).tanh();
        let y = 1.0 / rng.gen_range(ta..tb).tanh();
        hworst = hworst.max(rel(x, y));
    }
    outcome(
        worst <= 1e-6,
        format!(
            "uniform pairs in I_n x I_n^-1: {over}/1000 above 1e-6, worst |rho2 - rho1 rho1| / rho1 rho1 = {worst:.2e}; [diagnostic, atanh-uniform: {hworst:.2e}]"
        ),
    )
}

fn c8_descartes_vs_sturm() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = 0;
    let m = CoefficientModel::kac();
    for i in 0..1000u64 {
        let deg = rng.gen_range(1..=64usize);
        let c: Vec<f64> = if i % 2 == 0 {
            let bound = rng.gen_range(1..=1_000_000i64);
            let mut c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-bound..=bound) as f64).collect();
            if c[deg] == 0.0 {
                c[deg] = 1.0;
            }
            c
        } else {
            let base = m.build(deg).unwrap();
            sample_coefficients(&base.values, XiDistribution::ALL[(i / 2 % 3) as usize], 8, i)
        };
        let lo = rng.gen_range(-2.0..1.0);
        let iv = [RealInterval::real(), RealInterval::half_open(lo, lo + rng.gen_range(0.0..2.0)).unwrap()];
        for iv in iv {
            if count_roots(&c, &iv).unwrap().count != count_roots_sturm(&c, &iv).unwrap().count {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("1000 polynomials of degree <= 64, 2000 intervals: {mismatches} mismatches"))
}

fn c9_invariants() -> Outcome {
    let mut fails = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            fails.push(name.to_string());
        }
    };
    let taus = [-0.25, 0.0, 0.5, 1.0, 3.0];
    check(
        "delta range",
        taus.iter().all(|&t| (1..1000).all(|i| {
            let d = delta_tau(t, i as f64 / 1000.0).unwrap();
            d > -1.0 && d < 0.0
        })),
    );
    check(
        "lambda range",
        (0..=2000).all(|i| {
            let l = lambda_fn(-1.0 + i as f64 / 1000.0).unwrap();
            (1.0..=PI / 2.0 + 1e-15).contains(&l)
        }),
    );
    check(
        "f endpoint laws",
        taus.iter().all(|&t| {
            f_tau(t, 0.0).unwrap() == 0.0 && f_tau(t, 1.0).unwrap() == -1.0 && (f_tau(t, 1.0 - 1e-12).unwrap() + 1.0).abs() < 1e-4
        }),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut rho_ok = true;
    let mut contraction_ok = true;
    for _ in 0..10_000 {
        let (x, y) = (rng.gen_range(-0.999..0.999), rng.gen_range(-0.999..0.999));
        let (a, r) = alpha_rho(x, y).unwrap();
        rho_ok &= (a + r * r - 1.0).abs() < 1e-12;
        let c = 0.44;
        let x: f64 = rng.gen_range(0.0..0.999);
        let r = rng.gen_range(0.0..c);
        let y = (x + r) / (1.0 + r * x);
        let sgn = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        let (x, y) = (sgn * x, sgn * y);
        let (_, rho) = alpha_rho(x, y).unwrap();
        let z1 = x + rng.gen_range(0.0..1.0) * (y - x);
        let z2 = x + rng.gen_range(0.0..1.0) * (y - x);
        let (_, rz) = alpha_rho(z1, z2).unwrap();
        if let Some(bound) = contraction_bound(rho, c) {
            contraction_ok &= rz <= bound * (1.0 + 1e-12) + 1e-15;
        }
    }
    check("rho^2 + alpha = 1", rho_ok);
    check("contraction bound", contraction_ok);
    let kr = KacRice::new(&model("monomial:tau=1,c1=1").build(300).unwrap().values).unwrap();
    check(
        "rho2 symmetry",
        (0..2000).all(|_| {
            let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            kr.frame(x, y).rho2 == kr.frame(y, x).rho2
        }),
    );
    let xs: Vec<f64> = (0..5000).map(|_| rng.gen_range(0..30) as f64).collect();
    let mut whole = MomentAccumulator::new();
    xs.iter().for_each(|x| whole.push(*x));
    let mut merged = MomentAccumulator::new();
    for chunk in xs.chunks(333).rev() {
        let mut a = MomentAccumulator::new();
        chunk.iter().for_each(|x| a.push(*x));
        merged.merge(&a);
    }
    check("accumulator merge", merged.count == whole.count && (merged.variance() / whole.variance() - 1.0).abs() <= 1e-12);
    let cfg = SimulationConfig::new(model("deriv:k=1:kac"), 200, XiDistribution::Gaussian, 600, 9).with_regions(&Region::ALL);
    let one = run_simulation_with_threads(&cfg, Some(1)).unwrap();
    let four = run_simulation_with_threads(&cfg, Some(4)).unwrap();
    check("thread-count determinism", one.stats == four.stats && one.accumulators == four.accumulators);
    let pass = fails.is_empty();
    outcome(pass, if pass { "all 8 suites hold".into() } else { format!("failed: {}", fails.join(", ")) })
}

fn c10_appendix_conditions() -> Outcome {
    let m = model("appendix:tau=1");
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [100_000, 1_000_000] {
        let r = m.check_conditions(n, 0.25).unwrap();
        pass &= r.satisfies_a2 && !r.satisfies_ov;
        parts.push(format!("n={n}: A2 {} OV {}", r.satisfies_a2, r.satisfies_ov));
    }
    outcome(pass, parts.join(", "))
}

fn c11_universality() -> Outcome {
    let m = model("deriv:k=1:kac");
    let stats: Vec<(XiDistribution, f64, f64)> = XiDistribution::ALL
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let cfg = SimulationConfig::new(m.clone(), 512, *d, 10_000, 1100 + i as u64);
            let r = run_simulation(&cfg).unwrap();
            let s = r.get(Region::Real).unwrap();
            (*d, s.variance, s.se_variance)
        })
        .collect();
    let mut pass = true;
    let mut parts: Vec<String> = stats.iter().map(|(d, v, se)| format!("{d} {v:.4}+-{se:.4}")).collect();
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (&stats[i], &stats[j]);
            let z = (a.1 - b.1) / (a.2 * a.2 + b.2 * b.2).sqrt();
            pass &= z.abs() < 3.0;
            parts.push(format!("z({},{})={z:+.2}", a.0, b.0));
        }
    }
    outcome(pass, parts.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("kappa_0 closed form", c1_kappa_zero),
        ("Maslova-type constant at tau=1", c2_total_slope_tau_one),
        ("mean: Monte Carlo vs quadrature", c3_mean_oracle),
        ("variance: Monte Carlo vs quadrature", c4_variance_oracle),
        ("variance slopes in log n", c5_variance_slopes),
        ("two-point correlation in I_n", c6_correlation_structure),
        ("decoupling of I_n and I_n^-1", c7_decoupling),
        ("Descartes vs Sturm", c8_descartes_vs_sturm),
        ("invariant suites", c9_invariants),
        ("appendix example conditions", c10_appendix_conditions),
        ("universality across xi", c11_universality),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "criterion {k:>2} {} {name}: {} ({:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

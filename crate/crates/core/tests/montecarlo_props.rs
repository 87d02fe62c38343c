use proptest::prelude::*;
use rootvar::kacrice::{expectation_quadrature, Domain};
use rootvar::montecarlo::{run_simulation_with_threads, variance_ci, MomentAccumulator, SimulationConfig};
use rootvar::sampling::XiDistribution;
use rootvar::{CoefficientModel, Region};

#[test]
fn degree_one_always_one_root() {
    let cfg = SimulationConfig::new(CoefficientModel::kac(), 1, XiDistribution::Gaussian, 5000, 8);
    let r = run_simulation_with_threads(&cfg, Some(1)).unwrap();
    let s = r.get(Region::Real).unwrap();
    assert_eq!((s.mean, s.variance, s.min, s.max), (1.0, 0.0, 1.0, 1.0));
}

#[test]
fn kac_mean_matches_quadrature() {
    for n in [2, 8, 16] {
        let cfg = SimulationConfig::new(CoefficientModel::kac(), n, XiDistribution::Gaussian, 100_000, 21);
        let s = run_simulation_with_threads(&cfg, None).unwrap();
        let s = s.get(Region::Real).unwrap();
        let q = expectation_quadrature(&vec![1.0; n + 1], &Domain::Region(Region::Real), 1e-9).unwrap();
        let z = (s.mean - q.value) / s.se_mean;
        assert!(z.abs() < 3.0, "n={n}: mc {} quad {} z={z}", s.mean, q.value);
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let cfg = SimulationConfig::new(CoefficientModel::monomial(1.0, 1.0).unwrap(), 120, XiDistribution::Uniform, 700, 4)
        .with_regions(&Region::ALL);
    let a = run_simulation_with_threads(&cfg, Some(1)).unwrap();
    for t in [2, 3, 7] {
        let b = run_simulation_with_threads(&cfg, Some(t)).unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.accumulators, b.accumulators);
    }
}

#[test]
fn region_consistency_and_ci() {
    let cfg = SimulationConfig::new(CoefficientModel::kac(), 200, XiDistribution::Rademacher, 2000, 17)
        .with_regions(&Region::ALL);
    let r = run_simulation_with_threads(&cfg, None).unwrap();
    let mean = |reg| r.get(reg).unwrap().mean;
    let bands: f64 = Region::BANDS.iter().map(|b| mean(*b)).sum();
    assert!((bands - mean(Region::Core)).abs() < 1e-9);
    assert!((mean(Region::Core) + mean(Region::Rest) - mean(Region::Real)).abs() < 1e-9);
    for s in &r.stats {
        assert!(s.variance >= 0.0);
        let (lo, hi) = s.var_ci.unwrap();
        assert!(lo <= s.variance && s.variance <= hi);
    }
}

#[test]
fn alternating_counts_ci() {
    let mut acc = MomentAccumulator::new();
    for i in 0..10_000 {
        acc.push(if i % 2 == 0 { 0.0 } else { 2.0 });
    }
    let v = acc.variance();
    assert!((v - 1.0001).abs() < 1e-4);
    let (lo, hi) = variance_ci(&acc, 0.95).unwrap();
    let want = 2.0 * 1.959963984540054 * v * (2.0 / 9999.0f64).sqrt();
    assert!(((hi - lo) - want).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn merge_equals_single_stream(xs in prop::collection::vec(0u32..40, 2..400), cut in 0usize..400, cut2 in 0usize..400) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let (c1, c2) = (cut.min(xs.len()), cut2.min(xs.len()));
        let (c1, c2) = (c1.min(c2), c1.max(c2));
        let mut whole = MomentAccumulator::new();
        xs.iter().for_each(|x| whole.push(*x));
        let part = |s: &[f64]| { let mut a = MomentAccumulator::new(); s.iter().for_each(|x| a.push(*x)); a };
        let (a, b, c) = (part(&xs[..c1]), part(&xs[c1..c2]), part(&xs[c2..]));
        let mut left = a.clone(); left.merge(&b); left.merge(&c);
        let mut bc = b.clone(); bc.merge(&c);
        let mut right = a.clone(); right.merge(&bc);
        let mut swapped = c.clone(); swapped.merge(&a); swapped.merge(&b);
        for m in [&left, &right, &swapped] {
            prop_assert_eq!(m.count, whole.count);
            let tol = 1e-12 * whole.variance().max(1e-300);
            prop_assert!((m.variance() - whole.variance()).abs() <= tol.max(1e-12));
        }
    }
}

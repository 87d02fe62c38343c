use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rootvar::coeff_models::CoefficientModel;
use rootvar::rootcount::{count_regions, count_roots, count_roots_sturm, RealInterval};
use rootvar::sampling::{sample_polynomial, XiDistribution};
use rootvar::{Region, RegionSpec};

fn random_int_poly(rng: &mut ChaCha8Rng, max_degree: usize, bound: i64) -> Vec<f64> {
    let deg = rng.gen_range(1..=max_degree);
    let mut c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-bound..=bound) as f64).collect();
    if c[deg] == 0.0 {
        c[deg] = 1.0;
    }
    c
}

#[test]
fn descartes_matches_sturm_small_integer_polys() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let c = random_int_poly(&mut rng, 12, 9);
        for iv in [RealInterval::real(), RealInterval::closed(-1.0, 1.0).unwrap(), RealInterval::half_open(-3.5, 0.25).unwrap()] {
            assert_eq!(count_roots(&c, &iv).unwrap().count, count_roots_sturm(&c, &iv).unwrap().count, "{c:?} on {iv}");
        }
    }
}

#[test]
fn trivial_counts() {
    let r = RealInterval::closed(-2.0, 2.0).unwrap();
    assert_eq!(count_roots(&[-1.0, 0.0, 1.0], &r).unwrap().count, 2);
    assert_eq!(count_roots(&[1.0, 0.0, 1.0], &RealInterval::real()).unwrap().count, 0);
    assert!(count_roots(&[0.0, 0.0], &RealInterval::real()).is_err());
}

#[test]
fn region_counts_of_sampled_kac() {
    let m = CoefficientModel::kac();
    let spec = RegionSpec::with_default_d(50).unwrap();
    for idx in 0..200 {
        let p = sample_polynomial(&m, 50, XiDistribution::Gaussian, 99, idx).unwrap();
        let rc = count_regions(&p.coeffs, &spec).unwrap();
        let bands: usize = Region::BANDS.iter().map(|r| rc.get(*r)).sum();
        assert_eq!(bands, rc.get(Region::Core));
        assert!(bands <= rc.get(Region::Real));
        assert_eq!(bands == rc.get(Region::Real), rc.get(Region::Rest) == 0);
        assert!(rc.squarefree);
        // outer bands through the reversed polynomial
        let rev: Vec<f64> = p.coeffs.iter().rev().copied().collect();
        let (a, b) = (spec.alpha, spec.beta);
        assert_eq!(rc.get(Region::Outer), count_roots(&rev, &RealInterval::new(a, b, false, true).unwrap()).unwrap().count);
        assert_eq!(
            rc.get(Region::NegOuter),
            count_roots(&rev, &RealInterval::new(-b, -a, true, false).unwrap()).unwrap().count
        );
    }
}

#[test]
fn reciprocal_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let c = random_int_poly(&mut rng, 30, 50);
        if c[0] == 0.0 {
            continue;
        }
        let rev: Vec<f64> = c.iter().rev().copied().collect();
        let (a, b) = (0.25, 0.75);
        let outer = RealInterval::closed(1.0 / b, 1.0 / a).unwrap();
        let inner = RealInterval::closed(a, b).unwrap();
        assert_eq!(count_roots(&c, &outer).unwrap().count, count_roots(&rev, &inner).unwrap().count, "{c:?}");
    }
}

#[test]
fn descartes_matches_sturm_sampled_degree_48() {
    let m = CoefficientModel::hyperbolic(2.0).unwrap();
    for (i, dist) in XiDistribution::ALL.into_iter().enumerate() {
        for idx in 0..20 {
            let p = sample_polynomial(&m, 48, dist, i as u64, idx).unwrap();
            for iv in [RealInterval::real(), RealInterval::half_open(0.9, 1.1).unwrap()] {
                let a = count_roots(&p.coeffs, &iv).unwrap();
                let b = count_roots_sturm(&p.coeffs, &iv).unwrap();
                assert_eq!(a.count, b.count);
                if dist != XiDistribution::Rademacher {
                    assert!(a.squarefree && b.squarefree);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn additivity(c in prop::collection::vec(-20i64..=20, 2..16), lo in -4.0f64..0.0, w1 in 0.01f64..3.0, w2 in 0.01f64..3.0) {
        let c: Vec<f64> = c.into_iter().map(|v| v as f64).collect();
        prop_assume!(c.iter().any(|v| *v != 0.0));
        let (m, hi) = (lo + w1, lo + w1 + w2);
        let whole = count_roots(&c, &RealInterval::half_open(lo, hi).unwrap()).unwrap().count;
        let left = count_roots(&c, &RealInterval::half_open(lo, m).unwrap()).unwrap().count;
        let right = count_roots(&c, &RealInterval::half_open(m, hi).unwrap()).unwrap().count;
        prop_assert_eq!(whole, left + right);
    }

    #[test]
    fn negation_symmetry(c in prop::collection::vec(-20i64..=20, 2..16), a in -3.0f64..3.0, w in 0.0f64..3.0) {
        let c: Vec<f64> = c.into_iter().map(|v| v as f64).collect();
        prop_assume!(c.iter().any(|v| *v != 0.0));
        let neg: Vec<f64> = c.iter().enumerate().map(|(j, v)| if j % 2 == 1 { -v } else { *v }).collect();
        let p = count_roots(&c, &RealInterval::closed(a, a + w).unwrap()).unwrap().count;
        let q = count_roots(&neg, &RealInterval::closed(-a - w, -a).unwrap()).unwrap().count;
        prop_assert_eq!(p, q);
    }
}

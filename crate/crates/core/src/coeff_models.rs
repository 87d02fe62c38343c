//! Deterministic coefficient sequences `c_j` for generalized Kac polynomials
//! `P_n(x) = sum_j xi_j c_j x^j`, and numerical checks of the growth conditions
//! they are supposed to satisfy.
//!
//! Every built-in model has `|c_j| = C1 j^tau (1 + o_j(1))` with `tau > -1/2`,
//! except where a model deliberately breaks a condition (the alternating
//! `appendix` sequence satisfies the asymptotic condition but not the
//! concentration condition near `j = n`).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::regions::RegionSpec;

/// Default `epsilon` in the concentration threshold `exp(-(log log n)^(1+eps))`.
pub const DEFAULT_OV_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Kac,
    Hyperbolic { l: f64 },
    /// `k`-th derivative of `base`, reindexed so that the constant term is the
    /// first entry.
    Derivative { base: Box<CoefficientModel>, k: usize },
    Monomial { tau: f64, c1: f64 },
    /// `c_j = j^tau (1 + (-1)^j / log j)` for `j >= 2`, and `c_0 = c_1 = 1`.
    AppendixExample { tau: f64 },
    Custom { table: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientModel {
    kind: ModelKind,
    declared_tau: Option<f64>,
    declared_c1: f64,
    n0: usize,
}

/// Output of [`CoefficientModel::build`]. `values.len() == degree + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub values: Vec<f64>,
    pub degree: usize,
    /// How much the requested degree shrank (non-zero only for derivatives).
    pub degree_reduction: usize,
}

impl CoefficientModel {
    pub fn kac() -> Self {
        CoefficientModel {
            kind: ModelKind::Kac,
            declared_tau: Some(0.0),
            declared_c1: 1.0,
            n0: 1,
        }
    }

    /// `c_j = sqrt(L (L+1) ... (L+j-1) / j!)`, so `tau = (L-1)/2` and
    /// `C1 = Gamma(L)^(-1/2)`.
    pub fn hyperbolic(l: f64) -> Result<Self> {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidModel(format!(
                "hyperbolic parameter L must be positive, got {l}"
            )));
        }
        Ok(CoefficientModel {
            kind: ModelKind::Hyperbolic { l },
            declared_tau: Some((l - 1.0) / 2.0),
            declared_c1: (-0.5 * ln_gamma(l)).exp(),
            n0: 1,
        })
    }

    /// `k`-th derivative of `base`. Nested derivatives are flattened, so
    /// `derivative(derivative(m, a), b) == derivative(m, a + b)`.
    pub fn derivative(base: CoefficientModel, k: usize) -> Result<Self> {
        let (base, k) = match base.kind {
            ModelKind::Derivative { base: inner, k: k0 } => (*inner, k0 + k),
            _ => (base, k),
        };
        if k == 0 {
            return Ok(base);
        }
        let declared_tau = base.declared_tau.map(|t| t + k as f64);
        let declared_c1 = base.declared_c1;
        let n0 = base.n0.saturating_sub(k).max(1);
        Ok(CoefficientModel {
            kind: ModelKind::Derivative {
                base: Box::new(base),
                k,
            },
            declared_tau,
            declared_c1,
            n0,
        })
    }

    /// `c_j = C1 j^tau` for `j >= 1`. The constant term is `0` when `tau > 0`
    /// (the polynomial `sum_{j>=1} xi_j j^tau x^j`) and `C1` otherwise.
    pub fn monomial(tau: f64, c1: f64) -> Result<Self> {
        check_tau(tau)?;
        if !(c1.is_finite() && c1 > 0.0) {
            return Err(Error::InvalidModel(format!("C1 must be positive, got {c1}")));
        }
        Ok(CoefficientModel {
            kind: ModelKind::Monomial { tau, c1 },
            declared_tau: Some(tau),
            declared_c1: c1,
            n0: 1,
        })
    }

    pub fn appendix_example(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(CoefficientModel {
            kind: ModelKind::AppendixExample { tau },
            declared_tau: Some(tau),
            declared_c1: 1.0,
            n0: 2,
        })
    }

    /// A fixed table `c_0..c_m`. The table may only be built for `n <= m`.
    pub fn custom(table: Vec<f64>, tau: Option<f64>, c1: f64, n0: usize) -> Result<Self> {
        if table.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel("custom table has non-finite entries".into()));
        }
        if let Some(t) = tau {
            check_tau(t)?;
        }
        if !(c1.is_finite() && c1 > 0.0) {
            return Err(Error::InvalidModel(format!("C1 must be positive, got {c1}")));
        }
        Ok(CoefficientModel {
            kind: ModelKind::Custom { table },
            declared_tau: tau,
            declared_c1: c1,
            n0: n0.max(1),
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn declared_tau(&self) -> Option<f64> {
        self.declared_tau
    }

    pub fn declared_c1(&self) -> f64 {
        self.declared_c1
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Number of degrees lost when building for a nominal degree `n`.
    pub fn degree_reduction(&self) -> usize {
        match &self.kind {
            ModelKind::Derivative { k, .. } => *k,
            _ => 0,
        }
    }

    /// Coefficients `c_0..c_{n-k}` where `k` is [`Self::degree_reduction`].
    pub fn build(&self, n: usize) -> Result<Coefficients> {
        if n < 1 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        let k = self.degree_reduction();
        if k > n {
            return Err(Error::InvalidArgument(format!(
                "derivative order {k} exceeds degree {n}"
            )));
        }
        let values = self.values(n)?;
        Ok(Coefficients {
            degree: values.len() - 1,
            values,
            degree_reduction: k,
        })
    }

    fn values(&self, n: usize) -> Result<Vec<f64>> {
        Ok(match &self.kind {
            ModelKind::Kac => vec![1.0; n + 1],
            ModelKind::Hyperbolic { l } => hyperbolic_values(*l, n),
            ModelKind::Monomial { tau, c1 } => (0..=n)
                .map(|j| {
                    if j == 0 {
                        if *tau > 0.0 {
                            0.0
                        } else {
                            *c1
                        }
                    } else {
                        c1 * (j as f64).powf(*tau)
                    }
                })
                .collect(),
            ModelKind::AppendixExample { tau } => (0..=n)
                .map(|j| {
                    if j < 2 {
                        1.0
                    } else {
                        let jf = j as f64;
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        jf.powf(*tau) * (1.0 + sign / jf.ln())
                    }
                })
                .collect(),
            ModelKind::Custom { table } => {
                if table.len() < n + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "custom table has {} entries, degree {n} needs {}",
                        table.len(),
                        n + 1
                    )));
                }
                table[..=n].to_vec()
            }
            ModelKind::Derivative { base, k } => {
                let base_vals = base.values(n)?;
                (0..=n - k)
                    .map(|j| {
                        let mut c = base_vals[j + k];
                        for i in 1..=*k {
                            c *= (j + i) as f64;
                        }
                        c
                    })
                    .collect()
            }
        })
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau > -0.5) {
        return Err(Error::InvalidModel(format!("tau must exceed -1/2, got {tau}")));
    }
    Ok(())
}

/// `c_j^2 = prod_{i=1}^{j} (L+i-1)/i`, accumulated in log space with
/// Neumaier summation so that `j` up to 10^6 neither overflows nor drifts.
fn hyperbolic_values(l: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in 1..=n {
        let term = ((l - 1.0) / i as f64).ln_1p();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        out.push((0.5 * (sum + comp)).exp());
    }
    out
}

fn log_log(n: usize) -> f64 {
    (n as f64).ln().ln()
}

impl CoefficientModel {
    /// `max_{log log n <= j <= n} | |c_j| / (C1 j^tau) - 1 | + 1 / log log n`.
    pub fn tau_n(&self, n: usize) -> Result<f64> {
        if n < 16 {
            return Err(Error::InvalidArgument(format!("tau_n needs n >= 16, got {n}")));
        }
        let tau = self.declared_tau.ok_or_else(|| {
            Error::InvalidModel("tau_n needs a declared tau".into())
        })?;
        let c = self.build(n)?;
        let ll = log_log(n);
        let start = (ll.ceil() as usize).max(1);
        let mut max_dev = 0.0f64;
        for j in start..=c.degree {
            let dev = (c.values[j].abs() / (self.declared_c1 * (j as f64).powf(tau)) - 1.0).abs();
            max_dev = max_dev.max(dev);
        }
        Ok(max_dev + 1.0 / ll)
    }

    /// `max_{0 <= j <= n sqrt(a_n)} | |c_{n-j}| / |c_n| - 1 | + 1 / log log n`.
    pub fn e_n(&self, n: usize, d: f64) -> Result<f64> {
        if n < 16 {
            return Err(Error::InvalidArgument(format!("e_n needs n >= 16, got {n}")));
        }
        let c = self.build(n)?;
        let a_n = RegionSpec::a_n_for(n, d)?;
        let window = ((n as f64) * a_n.sqrt()).floor() as usize;
        let top = c.degree;
        let cn = c.values[top].abs();
        if cn == 0.0 {
            return Err(Error::InvalidModel("leading coefficient vanishes".into()));
        }
        let max_dev = (0..=window.min(top))
            .map(|j| (c.values[top - j].abs() / cn - 1.0).abs())
            .fold(0.0f64, f64::max);
        Ok(max_dev + 1.0 / log_log(n))
    }

    pub fn check_conditions(&self, n: usize, d: f64) -> Result<ConditionReport> {
        self.check_conditions_with(n, d, DEFAULT_OV_EPSILON)
    }

    pub fn check_conditions_with(&self, n: usize, d: f64, ov_epsilon: f64) -> Result<ConditionReport> {
        if n < 16 {
            return Err(Error::InvalidArgument(format!(
                "condition checks need n >= 16, got {n}"
            )));
        }
        let c = self.build(n)?;
        let top = c.degree;
        let ll = log_log(n);

        // (A2): relative deviation from C1 j^tau over j >= N0, summarised per
        // dyadic block; the sequence passes when block maxima never increase
        // and the last block is below the 1/log log n scale.
        let (a2_max, a2_tail, a2_monotone) = match self.declared_tau {
            Some(tau) => {
                let dev = |j: usize| {
                    (c.values[j].abs() / (self.declared_c1 * (j as f64).powf(tau)) - 1.0).abs()
                };
                let mut blocks = Vec::new();
                let mut lo = self.n0.max(1);
                while lo <= top {
                    let hi = (2 * lo - 1).min(top);
                    blocks.push((lo..=hi).map(dev).fold(0.0f64, f64::max));
                    lo *= 2;
                }
                let max = blocks.iter().copied().fold(0.0f64, f64::max);
                let tail = blocks.last().copied().unwrap_or(0.0);
                let monotone = blocks.windows(2).all(|w| w[1] <= w[0] + 1e-12);
                (max, tail, monotone)
            }
            None => (f64::NAN, f64::NAN, false),
        };
        let finite = c.values.iter().all(|v| v.is_finite())
            && c.values[self.n0.min(top)..].iter().all(|v| *v != 0.0);
        let satisfies_a2 = finite && a2_monotone && a2_tail <= 1.0 / ll;

        let tau_n = if self.declared_tau.is_some() {
            self.tau_n(n)?
        } else {
            f64::NAN
        };
        let e_n = self.e_n(n, d)?;

        // Concentration near the top: n - n e^{-log^{1/5} n} <= j <= n - e^{log^{1/5} n}.
        let nf = top as f64;
        let l5 = nf.ln().powf(0.2);
        let j_lo = (nf - nf * (-l5).exp()).ceil().max(0.0) as usize;
        let j_hi = (nf - l5.exp()).floor().max(0.0) as usize;
        let threshold = (-(ll.powf(1.0 + ov_epsilon))).exp();
        let cn = c.values[top].abs();
        let mut ov_max = 0.0f64;
        let mut first_violation = None;
        for j in j_lo..=j_hi.min(top) {
            let dev = (c.values[j].abs() / cn - 1.0).abs();
            ov_max = ov_max.max(dev);
            if dev > threshold && first_violation.is_none() {
                first_violation = Some(j);
            }
        }

        Ok(ConditionReport {
            n,
            degree: top,
            satisfies_a2,
            a2_max_deviation: a2_max,
            a2_tail_deviation: a2_tail,
            tau_n,
            e_n,
            satisfies_ov: first_violation.is_none(),
            ov_first_violation: first_violation,
            ov_max_deviation: ov_max,
            ov_threshold: threshold,
            ov_window: (j_lo, j_hi),
            ov_epsilon,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub n: usize,
    pub degree: usize,
    pub satisfies_a2: bool,
    /// Largest `| |c_j| / (C1 j^tau) - 1 |` over `j >= N0`.
    pub a2_max_deviation: f64,
    /// Same quantity restricted to the last dyadic block of indices.
    pub a2_tail_deviation: f64,
    pub tau_n: f64,
    pub e_n: f64,
    pub satisfies_ov: bool,
    pub ov_first_violation: Option<usize>,
    pub ov_max_deviation: f64,
    pub ov_threshold: f64,
    pub ov_window: (usize, usize),
    pub ov_epsilon: f64,
}

impl fmt::Display for CoefficientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Kac => write!(f, "kac"),
            ModelKind::Hyperbolic { l } => write!(f, "hyperbolic:L={l}"),
            ModelKind::Derivative { base, k } => write!(f, "deriv:k={k}:{base}"),
            ModelKind::Monomial { tau, c1 } => write!(f, "monomial:tau={tau},c1={c1}"),
            ModelKind::AppendixExample { tau } => write!(f, "appendix:tau={tau}"),
            ModelKind::Custom { table } => write!(f, "custom[{}]", table.len()),
        }
    }
}

impl FromStr for CoefficientModel {
    type Err = Error;

    /// `kac | hyperbolic:L=<r> | deriv:k=<int>:<spec> | monomial:tau=<r>,c1=<r> | appendix:tau=<r>`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad model spec `{s}`"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        if s == "kac" {
            return Ok(Self::kac());
        }
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "hyperbolic" => {
                let l = rest.strip_prefix("L=").ok_or_else(bad)?;
                Self::hyperbolic(num(l)?)
            }
            "deriv" => {
                let rest = rest.strip_prefix("k=").ok_or_else(bad)?;
                let (k, inner) = rest.split_once(':').ok_or_else(bad)?;
                let k = k.trim().parse::<usize>().map_err(|_| bad())?;
                Self::derivative(inner.parse()?, k)
            }
            "monomial" => {
                let mut tau = None;
                let mut c1 = 1.0;
                for part in rest.split(',') {
                    let (key, v) = part.split_once('=').ok_or_else(bad)?;
                    match key.trim() {
                        "tau" => tau = Some(num(v)?),
                        "c1" | "C1" => c1 = num(v)?,
                        _ => return Err(bad()),
                    }
                }
                Self::monomial(tau.ok_or_else(bad)?, c1)
            }
            "appendix" => {
                let tau = rest.strip_prefix("tau=").ok_or_else(bad)?;
                Self::appendix_example(num(tau)?)
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;

    #[test]
    fn kac_is_all_ones() {
        let c = CoefficientModel::kac().build(4).unwrap();
        assert_eq!(c.values, vec![1.0; 5]);
        assert_eq!(c.degree, 4);
    }

    #[test]
    fn hyperbolic_one_is_kac() {
        let c = CoefficientModel::hyperbolic(1.0).unwrap().build(3).unwrap();
        assert_eq!(c.values, vec![1.0; 4]);
    }

    #[test]
    fn hyperbolic_two_by_hand() {
        let c = CoefficientModel::hyperbolic(2.0).unwrap().build(2).unwrap();
        let want = [1.0, 2f64.sqrt(), 3f64.sqrt()];
        for (a, b) in c.values.iter().zip(want) {
            assert!((a - b).abs() <= 1e-15 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn derivative_of_kac() {
        let m = CoefficientModel::derivative(CoefficientModel::kac(), 1).unwrap();
        let c = m.build(5).unwrap();
        assert_eq!(c.values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(c.degree_reduction, 1);
        assert_eq!(m.declared_tau(), Some(1.0));
    }

    #[test]
    fn derivative_of_hyperbolic_tau() {
        let m = CoefficientModel::derivative(CoefficientModel::hyperbolic(2.5).unwrap(), 2).unwrap();
        assert_eq!(m.declared_tau(), Some(2.0 + 0.75));
    }

    #[test]
    fn nested_derivatives_flatten() {
        let base = CoefficientModel::hyperbolic(1.7).unwrap();
        let a = CoefficientModel::derivative(CoefficientModel::derivative(base.clone(), 1).unwrap(), 2)
            .unwrap();
        let b = CoefficientModel::derivative(base, 3).unwrap();
        assert_eq!(a.build(40).unwrap(), b.build(40).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CoefficientModel::hyperbolic(0.0).is_err());
        assert!(CoefficientModel::hyperbolic(-1.0).is_err());
        assert!(CoefficientModel::monomial(-0.5, 1.0).is_err());
        assert!(CoefficientModel::appendix_example(-0.7).is_err());
        let d = CoefficientModel::derivative(CoefficientModel::kac(), 6).unwrap();
        assert!(d.build(5).is_err());
    }

    #[test]
    fn hyperbolic_matches_rising_factorial() {
        // c_j^2 j! == L (L+1) ... (L+j-1) for integer L, checked in big integers.
        for l in [2u32, 3, 5] {
            let c = CoefficientModel::hyperbolic(l as f64).unwrap().build(1000).unwrap();
            let mut rising = BigUint::from(1u32);
            let mut fact = BigUint::from(1u32);
            for j in 1..=1000u32 {
                rising *= BigUint::from(l + j - 1);
                fact *= BigUint::from(j);
                // ratio rising / j! as f64 through logs of big integers
                let lr = big_ln(&rising) - big_ln(&fact);
                let lc = 2.0 * c.values[j as usize].ln();
                assert!((lr - lc).abs() <= 1e-12 * lr.abs().max(1.0), "L={l} j={j}: {lr} vs {lc}");
            }
        }
    }

    fn big_ln(x: &BigUint) -> f64 {
        let bits = x.bits();
        if bits < 1000 {
            return x.to_f64().unwrap().ln();
        }
        let shift = bits - 60;
        let top = (x >> shift).to_f64().unwrap();
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn hyperbolic_large_degree_is_finite() {
        let c = CoefficientModel::hyperbolic(3.5).unwrap().build(1_000_000).unwrap();
        assert!(c.values.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn tau_n_kac_is_inverse_loglog() {
        for n in [16usize, 100, 10_000] {
            let t = CoefficientModel::kac().tau_n(n).unwrap();
            assert_eq!(t, 1.0 / log_log(n));
        }
        let t = CoefficientModel::monomial(1.0, 2.0).unwrap().tau_n(100).unwrap();
        assert!((t - 1.0 / log_log(100)).abs() < 1e-15);
    }

    #[test]
    fn tau_n_appendix_brute_force() {
        let n = 10_000usize;
        let m = CoefficientModel::appendix_example(0.0).unwrap();
        let t = m.tau_n(n).unwrap();
        // deviations are 1/log j, largest at the smallest scanned index
        let j0 = log_log(n).ceil() as usize;
        let want = 1.0 / (j0 as f64).ln() + 1.0 / log_log(n);
        assert!((t - want).abs() < 1e-14, "{t} vs {want}");
        assert!(m.tau_n(15).is_err());
    }

    #[test]
    fn e_n_examples() {
        let n = 10_000;
        let e = CoefficientModel::kac().e_n(n, 0.25).unwrap();
        assert_eq!(e, 1.0 / log_log(n));

        let e = CoefficientModel::monomial(1.0, 1.0).unwrap().e_n(n, 0.25).unwrap();
        let a_n = RegionSpec::a_n_for(n, 0.25).unwrap();
        let w = ((n as f64) * a_n.sqrt()).floor() as usize;
        let want = (0..=w)
            .map(|j| ((n - j) as f64 / n as f64 - 1.0).abs())
            .fold(0.0, f64::max)
            + 1.0 / log_log(n);
        assert!((e - want).abs() < 1e-14);

        let n = 1_000_000;
        let e = CoefficientModel::appendix_example(0.0).unwrap().e_n(n, 0.25).unwrap();
        assert!(e >= 0.5 / (n as f64).ln());
    }

    #[test]
    fn conditions_kac_and_monomial() {
        let r = CoefficientModel::kac().check_conditions(100_000, 0.25).unwrap();
        assert!(r.satisfies_a2 && r.satisfies_ov);
        let r = CoefficientModel::monomial(1.0, 1.0).unwrap().check_conditions(100_000, 0.25).unwrap();
        assert!(r.satisfies_a2);
        assert_eq!(r.a2_max_deviation, 0.0);
    }

    #[test]
    fn conditions_appendix() {
        let r = CoefficientModel::appendix_example(0.0)
            .unwrap()
            .check_conditions(1_000_000, 0.25)
            .unwrap();
        assert!(r.satisfies_a2);
        assert!(!r.satisfies_ov);
        let j = r.ov_first_violation.unwrap();
        assert_eq!((1_000_000 - j) % 2, 1);
    }

    #[test]
    fn appendix_odd_offsets_violate() {
        for n in [100_000usize, 200_000, 1_000_000] {
            let c = CoefficientModel::appendix_example(0.0).unwrap().build(n).unwrap();
            let nf = n as f64;
            let l5 = nf.ln().powf(0.2);
            let lo = (nf - nf * (-l5).exp()).ceil() as usize;
            let hi = (nf - l5.exp()).floor() as usize;
            for j in (lo..=hi).filter(|j| (n - j) % 2 == 1) {
                let dev = (c.values[j].abs() / c.values[n].abs() - 1.0).abs();
                assert!(dev >= 0.5 / nf.ln(), "n={n} j={j} dev={dev}");
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "kac",
            "hyperbolic:L=2.5",
            "deriv:k=2:hyperbolic:L=3",
            "monomial:tau=1,c1=2",
            "appendix:tau=0.5",
        ] {
            let m: CoefficientModel = s.parse().unwrap();
            let again: CoefficientModel = m.to_string().parse().unwrap();
            assert_eq!(m, again, "{s}");
        }
        assert!("hyperbolic:L=".parse::<CoefficientModel>().is_err());
        assert!("wat".parse::<CoefficientModel>().is_err());
        assert!("monomial:tau=-1".parse::<CoefficientModel>().is_err());
    }
}

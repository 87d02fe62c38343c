//! Exact counting of the distinct real roots of a polynomial with double
//! (hence dyadic rational) coefficients.
//!
//! The fast path isolates roots in double precision with certified error
//! bounds ([`bernstein`]); anything it cannot certify is recounted over big
//! integers with Descartes bisection ([`descartes`]). Both answers are exact.
//! [`sturm`] is an independent exact counter used to cross-check.

mod bernstein;
pub mod descartes;
pub mod intpoly;
pub mod modular;
pub mod sturm;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regions::{Region, RegionSpec};
use bernstein::{Domain, FastRoots, Isolated};
pub use intpoly::IntPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    DescartesIsolation,
    SturmExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootCount {
    /// Number of distinct real roots.
    pub count: usize,
    pub method: Method,
    pub certified: bool,
    /// `gcd(p, p')` is constant, so distinct roots are simple roots.
    pub squarefree: bool,
}

/// Interval endpoint for the exact counters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Endpoint {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl Endpoint {
    pub fn from_f64(x: f64) -> Result<Self> {
        if x == f64::INFINITY {
            Ok(Endpoint::PosInf)
        } else if x == f64::NEG_INFINITY {
            Ok(Endpoint::NegInf)
        } else {
            Ok(Endpoint::Finite(
                BigRational::from_float(x).ok_or_else(|| Error::InvalidArgument("NaN endpoint".into()))?,
            ))
        }
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    /// `inf`, `-inf`, integers, exact decimals (`-0.125`, `1e-3`), `p/q`, or
    /// hex floats (`0x1.8p-1`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "+inf" | "infinity" => return Ok(Endpoint::PosInf),
            "-inf" | "-infinity" => return Ok(Endpoint::NegInf),
            _ => {}
        }
        parse_exact(s).map(Endpoint::Finite)
    }
}

/// Exact rational value of a decimal, fraction or hex-float literal.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not an exact number: `{s}`"));
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let v = if let Some((p, q)) = body.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(bad());
        }
        BigRational::new(p, q)
    } else if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        let (mant, exp) = hex.split_once(['p', 'P']).unwrap_or((hex, "0"));
        let exp: i64 = exp.parse().map_err(|_| bad())?;
        let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
        let digits = format!("{ip}{fp}");
        if digits.is_empty() {
            return Err(bad());
        }
        let m = BigInt::parse_bytes(digits.as_bytes(), 16).ok_or_else(bad)?;
        let e = exp - 4 * fp.len() as i64;
        pow2_scale(m, e)
    } else {
        let (mant, exp) = body.split_once(['e', 'E']).unwrap_or((body, "0"));
        let exp: i64 = exp.parse().map_err(|_| bad())?;
        let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
        let digits = format!("{ip}{fp}");
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let m: BigInt = digits.parse().map_err(|_| bad())?;
        let e = exp - fp.len() as i64;
        let ten = BigInt::from(10);
        if e >= 0 {
            BigRational::from_integer(m * num_traits::pow(ten, e as usize))
        } else {
            BigRational::new(m, num_traits::pow(ten, (-e) as usize))
        }
    };
    Ok(if neg { -v } else { v })
}

fn pow2_scale(m: BigInt, e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(m << e as usize)
    } else {
        BigRational::new(m, BigInt::from(1) << (-e) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(RealInterval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// `[lo, hi)`, the tiling convention.
    pub fn half_open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    pub fn real() -> Self {
        RealInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY, lo_closed: false, hi_closed: false }
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

fn trimmed(c: &[f64]) -> Result<&[f64]> {
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coefficient".into()));
    }
    let len = c.iter().rposition(|x| *x != 0.0).map_or(0, |i| i + 1);
    if len == 0 {
        return Err(Error::ZeroPolynomial);
    }
    Ok(&c[..len])
}

fn squarefree_flag(c: &[f64], fast: &FastRoots) -> bool {
    if fast.repeated {
        return false;
    }
    match modular::certify_squarefree_f64(c) {
        Some(v) => v,
        None => descartes::squarefree_part(&IntPoly::from_f64s(c).expect("finite")).1,
    }
}

/// Position of an isolated root relative to `l`; `None` if not certified.
fn compare_root(f: &FastRoots, r: &Isolated, l: f64) -> Option<Ordering> {
    use Ordering::*;
    if l == f64::NEG_INFINITY {
        return Some(Greater);
    }
    if l == f64::INFINITY {
        return Some(Less);
    }
    let (lo, hi) = (r.lo, r.hi);
    // sign of the reduced polynomial at the left end of the x-image
    let left_sign = match r.domain {
        Domain::Pos => {
            if l <= lo {
                return Some(Greater);
            }
            if l >= hi {
                return Some(Less);
            }
            r.sign_lo
        }
        Domain::Neg => {
            if l <= -hi {
                return Some(Greater);
            }
            if l >= -lo {
                return Some(Less);
            }
            -r.sign_lo
        }
        Domain::RecPos => {
            // x in (1/hi, 1/lo)
            if l.mul_add(hi, -1.0) <= 0.0 {
                return Some(Greater);
            }
            if lo > 0.0 && l.mul_add(lo, -1.0) >= 0.0 {
                return Some(Less);
            }
            -r.sign_lo
        }
        Domain::RecNeg => {
            // x in (-1/lo, -1/hi)
            if lo > 0.0 && l.mul_add(lo, 1.0) <= 0.0 {
                return Some(Greater);
            }
            if l.mul_add(hi, 1.0) >= 0.0 {
                return Some(Less);
            }
            if (f.reduced.len() - 1) % 2 == 1 {
                -r.sign_lo
            } else {
                r.sign_lo
            }
        }
    };
    let s = bernstein::horner_sign(&f.reduced, l)?;
    Some(if s == left_sign { Greater } else { Less })
}

fn point_in(x: f64, iv: &RealInterval) -> bool {
    let above = x > iv.lo || (iv.lo_closed && x == iv.lo);
    let below = x < iv.hi || (iv.hi_closed && x == iv.hi);
    above && below
}

fn fast_count(c: &[f64], iv: &RealInterval) -> Option<(usize, bool)> {
    let f = bernstein::isolate(c)?;
    let mut n = 0;
    for r in &f.roots {
        let inside = compare_root(&f, r, iv.lo)? == Ordering::Greater
            && compare_root(&f, r, iv.hi)? == Ordering::Less;
        n += usize::from(inside);
    }
    for (present, x) in [(f.at_zero, 0.0), (f.at_one, 1.0), (f.at_neg_one, -1.0)] {
        n += usize::from(present && point_in(x, iv));
    }
    Some((n, squarefree_flag(c, &f)))
}

/// Distinct real roots of `sum c_j x^j` in an interval.
pub fn count_roots(coeffs: &[f64], iv: &RealInterval) -> Result<RootCount> {
    let c = trimmed(coeffs)?;
    let (count, squarefree) = match fast_count(c, iv) {
        Some(v) => v,
        None => descartes::count_exact(
            &IntPoly::from_f64s(c)?,
            &Endpoint::from_f64(iv.lo)?,
            iv.lo_closed,
            &Endpoint::from_f64(iv.hi)?,
            iv.hi_closed,
        )?,
    };
    Ok(RootCount { count, method: Method::DescartesIsolation, certified: true, squarefree })
}

/// Exact count for a big-integer polynomial and rational endpoints.
pub fn count_roots_exact(
    p: &IntPoly,
    lo: &Endpoint,
    lo_closed: bool,
    hi: &Endpoint,
    hi_closed: bool,
) -> Result<RootCount> {
    let (count, squarefree) = descartes::count_exact(p, lo, lo_closed, hi, hi_closed)?;
    Ok(RootCount { count, method: Method::DescartesIsolation, certified: true, squarefree })
}

/// Same interface as [`count_roots`], answered by the Sturm oracle.
pub fn count_roots_sturm(coeffs: &[f64], iv: &RealInterval) -> Result<RootCount> {
    let p = IntPoly::from_f64s(trimmed(coeffs)?)?;
    let count = sturm::sturm_count(
        &p,
        &Endpoint::from_f64(iv.lo)?,
        iv.lo_closed,
        &Endpoint::from_f64(iv.hi)?,
        iv.hi_closed,
    )?;
    let squarefree = descartes::squarefree_part(&p).1;
    Ok(RootCount { count, method: Method::SturmExact, certified: true, squarefree })
}

/// Root counts over the standard regions of one polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub inner: usize,
    pub neg_inner: usize,
    pub outer: usize,
    pub neg_outer: usize,
    pub real: usize,
    pub squarefree: bool,
    /// The count needed the big-integer path.
    pub exact_fallback: bool,
}

impl RegionCounts {
    pub fn get(&self, r: Region) -> usize {
        match r {
            Region::Inner => self.inner,
            Region::NegInner => self.neg_inner,
            Region::Outer => self.outer,
            Region::NegOuter => self.neg_outer,
            Region::Core => self.core(),
            Region::Rest => self.real - self.core(),
            Region::Real => self.real,
        }
    }

    pub fn core(&self) -> usize {
        self.inner + self.neg_inner + self.outer + self.neg_outer
    }

    fn band_mut(&mut self, d: Domain) -> &mut usize {
        match d {
            Domain::Pos => &mut self.inner,
            Domain::Neg => &mut self.neg_inner,
            Domain::RecPos => &mut self.outer,
            Domain::RecNeg => &mut self.neg_outer,
        }
    }
}

/// Whether an isolated root lies in the local band `[alpha, beta)`.
fn in_band(f: &FastRoots, r: &Isolated, alpha: f64, beta: f64) -> Option<bool> {
    let q = f.domain_poly(r.domain);
    let above = |t: f64| -> Option<bool> {
        if t <= r.lo {
            return Some(true);
        }
        if t >= r.hi {
            return Some(false);
        }
        Some(bernstein::horner_sign(q, t)? == r.sign_lo)
    };
    Some(above(alpha)? && !above(beta)?)
}

fn fast_regions(c: &[f64], spec: &RegionSpec) -> Option<RegionCounts> {
    let f = bernstein::isolate(c)?;
    let mut out = RegionCounts {
        inner: 0,
        neg_inner: 0,
        outer: 0,
        neg_outer: 0,
        real: f.roots.len() + usize::from(f.at_zero) + usize::from(f.at_one) + usize::from(f.at_neg_one),
        squarefree: true,
        exact_fallback: false,
    };
    for r in &f.roots {
        if in_band(&f, r, spec.alpha, spec.beta)? {
            *out.band_mut(r.domain) += 1;
        }
    }
    out.squarefree = squarefree_flag(c, &f);
    Some(out)
}

fn exact_regions(c: &[f64], spec: &RegionSpec) -> Result<RegionCounts> {
    let p = IntPoly::from_f64s(c)?;
    let (real, squarefree) = descartes::count_exact(&p, &Endpoint::NegInf, false, &Endpoint::PosInf, false)?;
    let mut rev = p.clone();
    rev.strip_x();
    let rev = rev.reverse();
    let a = Endpoint::from_f64(spec.alpha)?;
    let b = Endpoint::from_f64(spec.beta)?;
    let band = |q: &IntPoly| descartes::count_exact(q, &a, true, &b, false).map(|v| v.0);
    Ok(RegionCounts {
        inner: band(&p)?,
        neg_inner: band(&p.neg_x())?,
        outer: band(&rev)?,
        neg_outer: band(&rev.neg_x())?,
        real,
        squarefree,
        exact_fallback: true,
    })
}

/// Root counts in `I_n`, `-I_n`, `I_n^{-1}`, `-I_n^{-1}` and on the real line.
///
/// The outer bands are counted through the coefficient-reversed polynomial:
/// a root `x` of `p` with `|x| > 1` is a root `1/x` of `x^n p(1/x)`.
pub fn count_regions(coeffs: &[f64], spec: &RegionSpec) -> Result<RegionCounts> {
    let c = trimmed(coeffs)?;
    if c.len() == 1 {
        return Ok(RegionCounts {
            inner: 0,
            neg_inner: 0,
            outer: 0,
            neg_outer: 0,
            real: 0,
            squarefree: true,
            exact_fallback: false,
        });
    }
    match fast_regions(c, spec) {
        Some(r) => Ok(r),
        None => exact_regions(c, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_intervals() {
        let p = [-1.0, 0.0, 1.0];
        assert_eq!(count_roots(&p, &RealInterval::closed(-2.0, 2.0).unwrap()).unwrap().count, 2);
        assert_eq!(count_roots(&[1.0, 0.0, 1.0], &RealInterval::real()).unwrap().count, 0);
        assert_eq!(count_roots(&p, &RealInterval::open(-1.0, 1.0).unwrap()).unwrap().count, 0);
        assert_eq!(count_roots(&p, &RealInterval::half_open(-1.0, 1.0).unwrap()).unwrap().count, 1);
        assert!(count_roots(&[0.0, 0.0], &RealInterval::real()).is_err());
    }

    #[test]
    fn endpoint_on_root_falls_back() {
        // roots 0.5 and 3
        let p = [1.5, -3.5, 1.0];
        assert_eq!(count_roots(&p, &RealInterval::closed(0.5, 3.0).unwrap()).unwrap().count, 2);
        assert_eq!(count_roots(&p, &RealInterval::open(0.5, 3.0).unwrap()).unwrap().count, 0);
        assert_eq!(count_roots(&p, &RealInterval::half_open(0.5, 3.0).unwrap()).unwrap().count, 1);
    }

    #[test]
    fn far_roots_and_outer_domains() {
        // (x - 10)(x + 7)(x - 0.25)
        let p = [17.5, -67.75, -2.75, 1.0];
        let iv = RealInterval::open(5.0, 20.0).unwrap();
        assert_eq!(count_roots(&p, &iv).unwrap().count, 1);
        assert_eq!(count_roots(&p, &RealInterval::open(-8.0, -6.0).unwrap()).unwrap().count, 1);
        assert_eq!(count_roots(&p, &RealInterval::real()).unwrap().count, 3);
    }

    #[test]
    fn regions_of_x2_minus_1() {
        let spec = RegionSpec::new(100, 0.25).unwrap();
        let r = count_regions(&[-1.0, 0.0, 1.0], &spec).unwrap();
        assert_eq!(r.real, 2);
        assert_eq!(r.core(), 0);
        assert_eq!(r.get(Region::Rest), 2);
    }

    #[test]
    fn exact_and_fast_regions_agree() {
        let spec = RegionSpec::new(100, 0.25).unwrap();
        // roots 0.9, -0.95, 1/0.9, -1/0.85 and 0.1
        let roots = [0.9, -0.95, 1.0 / 0.9, -1.0 / 0.85, 0.1];
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        let fast = fast_regions(&c, &spec).unwrap();
        let exact = exact_regions(&c, &spec).unwrap();
        assert_eq!(
            (fast.inner, fast.neg_inner, fast.outer, fast.neg_outer, fast.real),
            (exact.inner, exact.neg_inner, exact.outer, exact.neg_outer, exact.real)
        );
        assert_eq!((fast.inner, fast.neg_inner, fast.outer, fast.neg_outer, fast.real), (1, 1, 1, 1, 5));
    }

    #[test]
    fn exact_literals() {
        assert_eq!(parse_exact("0.1").unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(parse_exact("-0x1.8p-1").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert_eq!(parse_exact("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_exact("2.5e2").unwrap(), BigRational::from_integer(250.into()));
        assert!(parse_exact("abc").is_err());
        assert!("inf".parse::<Endpoint>().unwrap() == Endpoint::PosInf);
    }
}

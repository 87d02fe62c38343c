//! Dense univariate polynomials over the integers, lowest degree first.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPoly {
    /// Coefficients, lowest degree first; no trailing zeros (empty = zero poly).
    pub c: Vec<BigInt>,
}

/// `m * 2^e` with `m` odd (or zero).
pub(crate) fn f64_parts(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if exp == 0 {
        (frac as i64, -1074)
    } else {
        ((frac | (1u64 << 52)) as i64, exp - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    (sign * m, e)
}

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        IntPoly { c }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Exact integer multiple `2^-e_min * p` of a polynomial with finite
    /// double coefficients. The positive scale does not move any root.
    pub fn from_f64s(c: &[f64]) -> Result<Self> {
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let parts: Vec<(i64, i32)> = c.iter().map(|&x| f64_parts(x)).collect();
        let e_min = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
        Ok(Self::new(
            parts
                .into_iter()
                .map(|(m, e)| if m == 0 { BigInt::zero() } else { BigInt::from(m) << (e - e_min) as usize })
                .collect(),
        ))
    }

    /// Clear denominators of rational coefficients.
    pub fn from_rationals(c: &[BigRational]) -> Self {
        let mut l = BigInt::one();
        for q in c {
            l = l.lcm(q.denom());
        }
        Self::new(c.iter().map(|q| q.numer() * (&l / q.denom())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has degree 0 here, callers check `is_zero`.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> &BigInt {
        self.c.last().expect("zero polynomial")
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| a * BigInt::from(j))
                .collect(),
        )
    }

    pub fn reverse(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Self::new(c)
    }

    /// `p(-x)`
    pub fn neg_x(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .map(|(j, a)| if j % 2 == 1 { -a } else { a.clone() })
                .collect(),
        )
    }

    /// Number of factors `x` dividing `p`; they are removed.
    pub fn strip_x(&mut self) -> usize {
        let k = self.c.iter().take_while(|a| a.is_zero()).count();
        self.c.drain(..k);
        k
    }

    pub fn content(&self) -> BigInt {
        self.c.iter().fold(BigInt::zero(), |g, a| g.gcd(a))
    }

    /// Divide by the positive content.
    pub fn primitive(mut self) -> Self {
        let g = self.content();
        if !g.is_zero() && !g.is_one() {
            for a in &mut self.c {
                *a /= &g;
            }
        }
        self
    }

    /// Divide out the largest common power of two.
    pub fn strip_pow2(&mut self) {
        let tz = self.c.iter().filter_map(|a| a.trailing_zeros()).min().unwrap_or(0);
        if tz > 0 {
            for a in &mut self.c {
                *a >>= tz as usize;
            }
        }
    }

    /// Sign of `p(num/den)` for `den > 0`, evaluated exactly.
    pub fn sign_at(&self, num: &BigInt, den: &BigInt) -> Sign {
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for a in self.c.iter().rev() {
            acc = acc * num + a * &dpow;
            dpow *= den;
        }
        acc.sign()
    }

    pub fn sign_at_rational(&self, x: &BigRational) -> Sign {
        self.sign_at(x.numer(), x.denom())
    }

    /// Sign of `p(x)` as `x -> +inf` (`pos`) or `x -> -inf`.
    pub fn sign_at_infinity(&self, pos: bool) -> Sign {
        match self.c.last() {
            None => Sign::NoSign,
            Some(lc) => {
                let s = lc.sign();
                if pos || self.degree() % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
        }
    }

    /// `p(x + 1)`, in place.
    pub fn taylor_shift_1(&mut self) {
        let n = self.c.len();
        for i in 0..n.saturating_sub(1) {
            for j in (i..n - 1).rev() {
                let t = self.c[j + 1].clone();
                self.c[j] += t;
            }
        }
    }

    /// `2^n p(x/2)`
    pub fn scale_half(&self) -> Self {
        let n = self.degree();
        Self::new(
            self.c
                .iter()
                .enumerate()
                .map(|(j, a)| a << (n - j))
                .collect(),
        )
    }

    /// Integer multiple of `p(a + w y)` as a polynomial in `y`, for rational
    /// `a` and `w`.
    pub fn affine(&self, a: &BigRational, w: &BigRational) -> Self {
        let d = a.denom().lcm(w.denom());
        let an = a.numer() * (&d / a.denom());
        let wn = w.numer() * (&d / w.denom());
        // h <- h (an + wn y) + c_j d^{n-j}
        let mut h: Vec<BigInt> = Vec::with_capacity(self.c.len());
        let mut dpow = BigInt::one();
        for cj in self.c.iter().rev() {
            let mut next = vec![BigInt::zero(); h.len() + 1];
            for (i, hi) in h.iter().enumerate() {
                next[i] += hi * &an;
                next[i + 1] += hi * &wn;
            }
            next[0] += cj * &dpow;
            dpow *= &d;
            h = next;
        }
        Self::new(h)
    }

    /// Exact division by `x - 1` when `p(1) = 0`.
    pub fn deflate_one(&self) -> Self {
        let n = self.degree();
        let mut q = vec![BigInt::zero(); n];
        let mut acc = BigInt::zero();
        for j in (1..=n).rev() {
            acc += &self.c[j];
            q[j - 1] = acc.clone();
        }
        debug_assert!((acc + &self.c[0]).is_zero());
        Self::new(q)
    }

    pub fn sign_variations(&self) -> usize {
        sign_variations(self.c.iter().map(|a| a.sign()))
    }

    /// `k` with every root strictly inside `(-2^k, 2^k)` (Cauchy bound).
    pub fn root_bound_log2(&self) -> u64 {
        let n = self.degree();
        let m = self.c[..n].iter().map(|a| a.bits()).max().unwrap_or(0) as i64;
        let l = self.lc().bits() as i64;
        ((m - l + 1).max(0) + 1) as u64
    }

    /// Pseudo-division: `lc(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn pseudo_divmod(&self, b: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(!b.is_zero());
        if self.c.len() < b.c.len() {
            return (IntPoly::default(), self.clone());
        }
        let db = b.degree();
        let lb = b.lc().clone();
        let mut r = self.c.clone();
        let steps = self.degree() - db + 1;
        let mut q = vec![BigInt::zero(); steps];
        for k in (0..steps).rev() {
            let top = r[k + db].clone();
            for qi in q.iter_mut() {
                *qi *= &lb;
            }
            q[k] = top.clone();
            for a in r.iter_mut() {
                *a *= &lb;
            }
            if !top.is_zero() {
                for (i, bi) in b.c.iter().enumerate() {
                    r[k + i] -= &top * bi;
                }
            }
            r.truncate(k + db);
        }
        (IntPoly::new(q), IntPoly::new(r))
    }

    pub fn prem(&self, b: &IntPoly) -> IntPoly {
        self.pseudo_divmod(b).1
    }

    /// Primitive gcd via the primitive remainder sequence.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let (mut a, mut b) = if self.c.len() >= other.c.len() {
            (self.clone().primitive(), other.clone().primitive())
        } else {
            (other.clone().primitive(), self.clone().primitive())
        };
        while !b.is_zero() {
            let r = a.prem(&b).primitive();
            a = b;
            b = r;
        }
        if a.c.last().is_some_and(|x| x.is_negative()) {
            for x in &mut a.c {
                *x = -&*x;
            }
        }
        a
    }

    /// Primitive part of `self / g` for a divisor `g`.
    pub fn exact_quotient(&self, g: &IntPoly) -> IntPoly {
        let (q, r) = self.pseudo_divmod(g);
        debug_assert!(r.is_zero());
        q.primitive()
    }
}

pub(crate) fn sign_variations(signs: impl Iterator<Item = Sign>) -> usize {
    let mut last = Sign::NoSign;
    let mut v = 0;
    for s in signs {
        if s == Sign::NoSign {
            continue;
        }
        if last != Sign::NoSign && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

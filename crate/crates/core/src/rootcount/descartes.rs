//! Exact real-root counting by Descartes' rule with bisection
//! (Vincent-Collins-Akritas) over big integers.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::intpoly::IntPoly;
use super::modular::certify_squarefree;
use super::Endpoint;
use crate::error::{Error, Result};

/// Squarefree part of `p` and whether `p` was already squarefree.
pub fn squarefree_part(p: &IntPoly) -> (IntPoly, bool) {
    if p.degree() <= 1 || certify_squarefree(p).is_some() {
        return (p.clone(), true);
    }
    let g = p.gcd(&p.derivative());
    if g.degree() == 0 {
        (p.clone(), true)
    } else {
        (p.exact_quotient(&g), false)
    }
}

/// Number of roots in the open unit interval of a squarefree `h` with
/// `h(0) != 0` and `h(1) != 0`.
fn count_unit(h: IntPoly) -> usize {
    let mut count = 0;
    let mut stack = vec![h];
    while let Some(mut h) = stack.pop() {
        if h.degree() == 0 {
            continue;
        }
        h.strip_pow2();
        let mut t = h.reverse();
        t.taylor_shift_1();
        match t.sign_variations() {
            0 => continue,
            1 => {
                count += 1;
                continue;
            }
            _ => {}
        }
        let left = h.scale_half();
        let mut right = left.clone();
        right.taylor_shift_1();
        if right.c[0].is_zero() {
            count += 1;
            right.strip_x();
        }
        stack.push(right);
        stack.push(left);
    }
    count
}

fn finite(e: &Endpoint, bound: &BigRational) -> BigRational {
    match e {
        Endpoint::NegInf => -bound.clone(),
        Endpoint::PosInf => bound.clone(),
        Endpoint::Finite(q) => q.clone(),
    }
}

pub fn is_root(p: &IntPoly, e: &Endpoint) -> bool {
    match e {
        Endpoint::Finite(q) => p.sign_at_rational(q) == Sign::NoSign,
        _ => false,
    }
}

/// Distinct roots of `p` in the interval with the given endpoint flags, and
/// whether `p` is squarefree.
pub fn count_exact(
    p: &IntPoly,
    lo: &Endpoint,
    lo_closed: bool,
    hi: &Endpoint,
    hi_closed: bool,
) -> Result<(usize, bool)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (s, sqf) = squarefree_part(p);
    if s.degree() == 0 {
        return Ok((0, sqf));
    }
    let bound = BigRational::from_integer(BigInt::one() << s.root_bound_log2() as usize);
    let (mut a, mut b) = (finite(lo, &bound), finite(hi, &bound));
    let mut extra = 0;
    if lo_closed && is_root(&s, lo) {
        extra += 1;
    }
    if hi_closed && is_root(&s, hi) && lo != hi {
        extra += 1;
    }
    if a >= b {
        return Ok((extra, sqf));
    }
    // clip to the root bound; nothing lies outside it
    if a < -bound.clone() {
        a = -bound.clone();
    }
    if b > bound {
        b = bound.clone();
    }
    if a >= b {
        return Ok((extra, sqf));
    }
    let w = &b - &a;
    let mut t = s.affine(&a, &w).primitive();
    t.strip_x();
    if t.sign_at(&BigInt::one(), &BigInt::one()) == Sign::NoSign {
        t = t.deflate_one();
    }
    Ok((count_unit(t) + extra, sqf))
}

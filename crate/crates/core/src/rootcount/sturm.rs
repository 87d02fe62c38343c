//! Sturm-sequence root counting, kept as an independent exact oracle.
//!
//! The chain is `S_0 = p`, `S_1 = p'`, `S_{i+1} = -rem(S_{i-1}, S_i)` up to
//! positive factors, computed with integer pseudo-remainders.

use num_bigint::Sign;
use num_traits::Signed;

use super::intpoly::{sign_variations, IntPoly};
use super::Endpoint;
use crate::error::{Error, Result};

pub fn sturm_chain(p: &IntPoly) -> Vec<IntPoly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let k = chain.len();
        let (a, b) = (&chain[k - 2], &chain[k - 1]);
        if b.is_zero() {
            chain.pop();
            break;
        }
        let steps = a.degree() + 1 - b.degree();
        let mut r = a.prem(b);
        if r.is_zero() {
            break;
        }
        // prem multiplies by lc(b)^steps; keep only its sign
        let flip = b.lc().is_negative() && steps % 2 == 1;
        if !flip {
            for x in &mut r.c {
                *x = -&*x;
            }
        }
        chain.push(r.primitive());
    }
    chain
}

fn variations_at(chain: &[IntPoly], e: &Endpoint) -> usize {
    sign_variations(chain.iter().map(|s| match e {
        Endpoint::NegInf => s.sign_at_infinity(false),
        Endpoint::PosInf => s.sign_at_infinity(true),
        Endpoint::Finite(q) => s.sign_at_rational(q),
    }))
}

/// Number of distinct real roots of `p` in the interval.
pub fn sturm_count(
    p: &IntPoly,
    lo: &Endpoint,
    lo_closed: bool,
    hi: &Endpoint,
    hi_closed: bool,
) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut chain = sturm_chain(p);
    let g = chain.last().unwrap().clone();
    if g.degree() > 0 {
        chain = sturm_chain(&p.exact_quotient(&g));
    }
    let s = &chain[0];
    let root_at = |e: &Endpoint| match e {
        Endpoint::Finite(q) => s.sign_at_rational(q) == Sign::NoSign,
        _ => false,
    };
    if lo >= hi {
        return Ok(usize::from(lo == hi && lo_closed && hi_closed && root_at(lo)));
    }
    // V(a) - V(b) counts (a, b]
    let half_open = variations_at(&chain, lo) - variations_at(&chain, hi);
    let mut n = half_open;
    if root_at(hi) && !hi_closed {
        n -= 1;
    }
    if root_at(lo) && lo_closed {
        n += 1;
    }
    Ok(n)
}

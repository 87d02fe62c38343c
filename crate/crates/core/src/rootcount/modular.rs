//! Squarefreeness certificates from `gcd(p, p')` modulo word-size primes.
//!
//! If for some prime `q` not dividing `n * lc(p)` the reduction of `p` is
//! coprime to the reduction of `p'`, then `p` is squarefree over the
//! rationals. A nontrivial gcd modulo every prime is inconclusive and the
//! caller falls back to an exact remainder sequence.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::intpoly::{f64_parts, IntPoly};

const PRIMES: [u64; 5] = [4294967291, 4294967279, 4294967231, 4294967197, 4294967189];

fn mul(a: u64, b: u64, q: u64) -> u64 {
    a * b % q
}

fn pow(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, q);
        }
        a = mul(a, a, q);
        e >>= 1;
    }
    r
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of `gcd(a, b)` over `Z/q`; inputs must be trimmed and nonzero.
fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, q: u64) -> usize {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = pow(*b.last().unwrap(), q - 2, q);
        let db = b.len() - 1;
        while a.len() >= b.len() {
            let k = a.len() - b.len();
            let f = mul(*a.last().unwrap(), inv, q);
            for i in 0..db {
                let t = mul(f, b[i], q);
                a[k + i] = (a[k + i] + q - t) % q;
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// `Some(true)` when certified squarefree, `None` when inconclusive.
fn test_residues(res: impl Fn(u64) -> Vec<u64>, lc_mod: impl Fn(u64) -> u64, n: usize) -> Option<bool> {
    if n <= 1 {
        return Some(true);
    }
    for &q in &PRIMES {
        let l = lc_mod(q);
        if l == 0 || mul(l, n as u64 % q, q) == 0 {
            continue;
        }
        let a = res(q);
        let d: Vec<u64> = a.iter().enumerate().skip(1).map(|(j, x)| mul(*x, j as u64 % q, q)).collect();
        if gcd_degree(a, d, q) == 0 {
            return Some(true);
        }
    }
    None
}

pub fn certify_squarefree(p: &IntPoly) -> Option<bool> {
    let n = p.degree();
    let to_mod = |x: &BigInt, q: u64| -> u64 {
        let r = x % BigInt::from(q);
        let r = r.to_i64().unwrap();
        if r < 0 {
            (r + q as i64) as u64
        } else {
            r as u64
        }
    };
    test_residues(
        |q| p.c.iter().map(|x| to_mod(x, q)).collect(),
        |q| to_mod(p.lc(), q),
        n,
    )
}

/// Same as [`certify_squarefree`] for exact double coefficients (trimmed,
/// nonzero leading coefficient), without building big integers.
pub fn certify_squarefree_f64(c: &[f64]) -> Option<bool> {
    let n = c.len() - 1;
    let parts: Vec<(i64, i32)> = c.iter().map(|&x| f64_parts(x)).collect();
    let e_min = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
    let residue = |(m, e): (i64, i32), q: u64| -> u64 {
        if m == 0 {
            return 0;
        }
        let mm = (m.unsigned_abs() % q) as u64;
        let v = mul(mm, pow(2, (e - e_min) as u64, q), q);
        if m < 0 {
            (q - v) % q
        } else {
            v
        }
    };
    test_residues(
        |q| {
            let mut v: Vec<u64> = parts.iter().map(|&pe| residue(pe, q)).collect();
            trim(&mut v);
            v
        },
        |q| residue(parts[n], q),
        n,
    )
}

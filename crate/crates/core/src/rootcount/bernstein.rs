//! Certified root isolation in double precision.
//!
//! The four maps `x = y`, `x = -y`, `x = 1/y`, `x = -1/y` send `y in (0, 1)`
//! onto `(0, 1)`, `(-1, 0)`, `(1, inf)` and `(-inf, -1)`. Each image polynomial
//! is converted to the Bernstein basis on `[0, 1]` and bisected with de
//! Casteljau until Descartes' rule excludes or isolates. Every coefficient sign
//! is only trusted when it clears a running rounding-error bound; whenever a
//! sign is in doubt the whole isolation is abandoned (`None`) and the caller
//! switches to exact arithmetic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::Sign;

use super::intpoly::IntPoly;

const U: f64 = f64::EPSILON / 2.0;
const MAX_DEPTH: u32 = 50;
const CACHE_MAX_DEGREE: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Domain {
    Pos,
    Neg,
    RecPos,
    RecNeg,
}

pub(crate) const DOMAINS: [Domain; 4] = [Domain::Pos, Domain::Neg, Domain::RecPos, Domain::RecNeg];

/// One real root, isolated to the open `y`-interval `(lo, hi)` of a domain.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Isolated {
    pub domain: Domain,
    pub lo: f64,
    pub hi: f64,
    /// Sign of the domain polynomial at `lo` (nonzero).
    pub sign_lo: i8,
}

#[derive(Debug, Clone)]
pub(crate) struct FastRoots {
    pub roots: Vec<Isolated>,
    pub at_zero: bool,
    pub at_one: bool,
    pub at_neg_one: bool,
    /// A repeated root at `0` or `+-1` was divided out.
    pub repeated: bool,
    /// The polynomial with roots at `0, +-1` removed.
    pub reduced: Vec<f64>,
    /// Monomial coefficients of the four domain polynomials.
    pub domain_coeffs: [Vec<f64>; 4],
}

impl FastRoots {
    pub fn domain_poly(&self, d: Domain) -> &[f64] {
        &self.domain_coeffs[d as usize]
    }
}

type Weights = Arc<Vec<f64>>;

fn weight_cache() -> &'static Mutex<HashMap<usize, Weights>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Weights>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `w[k(k+1)/2 + j] = C(k, j) / C(n, j)` for `0 <= j <= k <= n`.
fn build_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; (n + 1) * (n + 2) / 2];
    let row = |k: usize| k * (k + 1) / 2;
    for j in 0..=n {
        w[row(n) + j] = 1.0;
    }
    for k in (1..=n).rev() {
        let (rk, rk1) = (row(k), row(k - 1));
        for j in 0..k {
            w[rk1 + j] = w[rk + j] * (k - j) as f64 / k as f64;
        }
    }
    w
}

fn weights(n: usize) -> Weights {
    if n > CACHE_MAX_DEGREE {
        return Arc::new(build_weights(n));
    }
    let mut cache = weight_cache().lock().unwrap();
    cache.entry(n).or_insert_with(|| Arc::new(build_weights(n))).clone()
}

/// Bernstein coefficients on `[0, 1]` and the largest `sum_j |w_kj a_j|`.
fn to_bernstein(a: &[f64]) -> (Vec<f64>, f64) {
    let n = a.len() - 1;
    let w = weights(n);
    let mut b = vec![0.0; n + 1];
    let mut smax = 0.0f64;
    for (k, bk) in b.iter_mut().enumerate() {
        let r = &w[k * (k + 1) / 2..k * (k + 1) / 2 + k + 1];
        let (mut s, mut m) = (0.0, 0.0);
        for (wj, aj) in r.iter().zip(a) {
            let t = wj * aj;
            s += t;
            m += t.abs();
        }
        *bk = s;
        smax = smax.max(m);
    }
    (b, smax)
}

fn split(b: &[f64], left: &mut Vec<f64>, right: &mut Vec<f64>) {
    let n = b.len() - 1;
    left.clear();
    left.resize(n + 1, 0.0);
    right.clear();
    right.resize(n + 1, 0.0);
    let mut w = b.to_vec();
    left[0] = w[0];
    right[n] = w[n];
    for r in 1..=n {
        for i in 0..=n - r {
            w[i] = 0.5 * (w[i] + w[i + 1]);
        }
        left[r] = w[0];
        right[n - r] = w[n - r];
    }
}

fn sign_of(x: f64, e: f64) -> i8 {
    if x > e {
        1
    } else if x < -e {
        -1
    } else {
        0
    }
}

/// Isolating intervals `(lo, hi, sign at lo)` for the roots in `(0, 1)` of a
/// polynomial with nonzero values at `0` and `1`.
fn isolate_unit(a: &[f64]) -> Option<Vec<(f64, f64, i8)>> {
    let n = a.len() - 1;
    if n == 0 {
        return Some(Vec::new());
    }
    let (b, smax) = to_bernstein(a);
    let unit = U * smax * 1.01;
    let e0 = (3 * n + 3) as f64 * unit;
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<f64>, u64, u32)> = vec![(b, 0, 0)];
    let (mut left, mut right) = (Vec::new(), Vec::new());
    while let Some((b, num, depth)) = stack.pop() {
        let e = e0 + (depth as usize * n + 1) as f64 * unit + f64::MIN_POSITIVE;
        // the leftmost coefficient of the leftmost cell is exactly a_0
        let s0 = if num == 0 { a[0].signum() as i8 } else { sign_of(b[0], e) };
        let sn = sign_of(b[n], e);
        if s0 == 0 || sn == 0 {
            return None;
        }
        let mut v = 0;
        let mut last = s0;
        let mut doubtful = false;
        for &x in &b[1..] {
            match sign_of(x, e) {
                0 => doubtful = true,
                s => {
                    if s != last {
                        v += 1;
                    }
                    last = s;
                }
            }
        }
        if !doubtful && v <= 1 {
            if v == 1 {
                let scale = 0.5f64.powi(depth as i32);
                out.push((num as f64 * scale, (num + 1) as f64 * scale, s0));
            }
            continue;
        }
        if depth >= MAX_DEPTH {
            return None;
        }
        split(&b, &mut left, &mut right);
        stack.push((right.clone(), 2 * num + 1, depth + 1));
        stack.push((left.clone(), 2 * num, depth + 1));
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Some(out)
}

/// Sign of `sum a_j y^j` with a forward error bound; `None` if in doubt.
pub(crate) fn horner_sign(a: &[f64], y: f64) -> Option<i8> {
    let (mut v, mut m) = (0.0f64, 0.0f64);
    let ay = y.abs();
    for &c in a.iter().rev() {
        v = v * y + c;
        m = m * ay + c.abs();
    }
    if !v.is_finite() || !m.is_finite() {
        return None;
    }
    let bound = 2.0 * a.len() as f64 * U * m * 1.01 + f64::MIN_POSITIVE;
    match sign_of(v, bound) {
        0 => None,
        s => Some(s),
    }
}

fn vanishes_at(a: &[f64], s: f64) -> bool {
    let (mut v, mut m) = (0.0f64, 0.0f64);
    for &c in a.iter().rev() {
        v = v * s + c;
        m += c.abs();
    }
    let bound = 2.0 * a.len() as f64 * U * m * 1.01 + f64::MIN_POSITIVE;
    if v.abs() > bound {
        return false;
    }
    let p = IntPoly::from_f64s(a).expect("finite coefficients");
    p.sign_at(&(s as i64).into(), &1.into()) == Sign::NoSign
}

fn two_sum_exact(a: f64, b: f64) -> Option<f64> {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (err == 0.0 && s.is_finite()).then_some(s)
}

/// Exact quotient by `x - s` for `s = +-1`, if it is representable.
fn deflate(a: &[f64], s: f64) -> Option<Vec<f64>> {
    let n = a.len() - 1;
    let mut q = vec![0.0; n];
    let mut acc = 0.0;
    for j in (1..=n).rev() {
        acc = two_sum_exact(a[j], s * acc)?;
        q[j - 1] = acc;
    }
    (two_sum_exact(a[0], s * acc)? == 0.0).then_some(q)
}

/// Isolate all real roots of a polynomial with a nonzero leading coefficient.
pub(crate) fn isolate(c: &[f64]) -> Option<FastRoots> {
    let k0 = c.iter().take_while(|x| **x == 0.0).count();
    let mut a = c[k0..].to_vec();
    let mut repeated = k0 >= 2;
    let mut roots_pm = [false, false];
    for (i, s) in [1.0, -1.0].into_iter().enumerate() {
        while a.len() > 1 && vanishes_at(&a, s) {
            if roots_pm[i] {
                repeated = true;
            }
            roots_pm[i] = true;
            a = deflate(&a, s)?;
        }
    }
    let n = a.len() - 1;
    let alt: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(j, &x)| if j % 2 == 1 { -x } else { x })
        .collect();
    let mut rev = a.clone();
    rev.reverse();
    let rev_alt: Vec<f64> = rev
        .iter()
        .enumerate()
        .map(|(j, &x)| if j % 2 == 1 { -x } else { x })
        .collect();
    let domain_coeffs = [a.clone(), alt, rev, rev_alt];
    let mut roots = Vec::new();
    for d in DOMAINS {
        for (lo, hi, sign_lo) in isolate_unit(&domain_coeffs[d as usize])? {
            roots.push(Isolated { domain: d, lo, hi, sign_lo });
        }
    }
    debug_assert!(roots.len() <= n);
    Some(FastRoots {
        roots,
        at_zero: k0 > 0,
        at_one: roots_pm[0],
        at_neg_one: roots_pm[1],
        repeated,
        reduced: a,
        domain_coeffs,
    })
}
